"""Per-robot decision making: spacing forces, alignment, pause-and-go.

Force model: each neighbor pulls or pushes along its bearing with
magnitude k_f * (r - r_d) / r^2 (positive = attract).  Suspected-faulty
neighbors get one of three interaction rules: hard avoidance gated by a
Heaviside step at r_d, the nominal force at half gain, or a per-tick coin
flip between avoidance and the nominal force.

Pause-and-go: robots alternate a motionless observation phase, during
which neighbors whose perceived motion stays below both thresholds are
accumulated into a faulty set, and a movement phase that treats the two
sets differently.  Classification is reset at every pause entry; a track
that ever passes the motion test stays nominal for that pause.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .estimation import NeighborEstimate, below_motion_thresholds, motion_deltas
from .geometry import CartVec, PolarVec, wrap_angle
from .rng import SplitMix64


class ModelKind(enum.Enum):
    AA = "aa"            # oracle range/bearing sensing
    AAV = "aav"          # hybrid visual estimator
    AAVV = "aavv"        # vertical-angle-only estimator
    AAAV = "aaav"        # hybrid estimator + alignment
    AAPGV = "aapgv"      # hybrid estimator + pause-and-go
    AAAPGV = "aaapgv"    # hybrid + alignment + pause-and-go

    @property
    def uses_pause_go(self) -> bool:
        return self in (ModelKind.AAPGV, ModelKind.AAAPGV)

    @property
    def uses_alignment(self) -> bool:
        return self in (ModelKind.AAAV, ModelKind.AAAPGV)

    @property
    def estimator(self) -> str:
        if self is ModelKind.AA:
            return "oracle"
        if self is ModelKind.AAVV:
            return "vertical"
        return "hybrid"


class InteractionRule(enum.Enum):
    AVOID = "avoid"
    AVOID_HALF_FORCE = "avoid_half_force"
    AVOID_HALF_TIME = "avoid_half_time"


@dataclass(frozen=True)
class ModelParams:
    r_d: float = 0.10
    r_sense: float = 0.19
    k_f: float = 1.0
    k_3: float = 1.5


@dataclass(frozen=True)
class PGConfig:
    pause: tuple[int, int] = (6, 7)   # [P_min, P_max) in ticks
    go: tuple[int, int] = (11, 20)    # [G_min, G_max) in ticks
    u_min: float = 0.0                # m/s
    theta_min: float = 0.0            # relative angular-width change
    interaction: InteractionRule = InteractionRule.AVOID_HALF_TIME
    p_faulty: float = 0.5             # avoidance probability for the coin rule


@dataclass
class ClassificationSets:
    """Disjoint partition of tracked neighbors into nominal and faulty."""

    nominal: set[int] = field(default_factory=set)
    faulty: set[int] = field(default_factory=set)

    def drop(self, track_id: int) -> None:
        self.nominal.discard(track_id)
        self.faulty.discard(track_id)


def aa_pair_force(r_ij: float, beta_ij: float, r_d: float, k_f: float = 1.0) -> PolarVec:
    """Avoid-attract force of one nominal neighbor.

    Positive magnitude attracts along the bearing; repulsion is encoded as
    a positive magnitude with the bearing flipped by pi.
    """
    if r_ij <= 0.0:
        raise ValueError("pair force undefined at zero range")
    mag = k_f * (r_ij - r_d) / (r_ij * r_ij)
    if mag >= 0.0:
        return PolarVec(mag, beta_ij)
    return PolarVec(-mag, wrap_angle(beta_ij + math.pi))


def aa_total_force(centers: Iterable[PolarVec], params: ModelParams) -> CartVec:
    """Cartesian sum of pair forces over the selected neighbors."""
    fx = fy = 0.0
    for c in centers:
        mag = params.k_f * (c.r - params.r_d) / (c.r * c.r)
        fx += mag * math.cos(c.beta)
        fy += mag * math.sin(c.beta)
    return CartVec(fx, fy)


def faulty_pair_force(
    r_ij: float,
    beta_ij: float,
    r_d: float,
    rule: InteractionRule,
    rng: SplitMix64 | None = None,
    k_f: float = 1.0,
    p_faulty: float = 0.5,
) -> PolarVec:
    """Interaction force with a neighbor classified as faulty.

    AVOID zeroes the force beyond r_d and repels inside it; the half-force
    rule applies the nominal form at gain 0.5; the half-time rule draws one
    coin per neighbor per tick, avoidance with probability p_faulty.
    """
    if r_ij <= 0.0:
        raise ValueError("pair force undefined at zero range")
    if rule is InteractionRule.AVOID_HALF_FORCE:
        return aa_pair_force(r_ij, beta_ij, r_d, k_f=0.5)
    if rule is InteractionRule.AVOID_HALF_TIME:
        if rng is None:
            raise ValueError("half-time rule needs a random stream")
        if rng.next_float() < p_faulty:
            rule = InteractionRule.AVOID
        else:
            return aa_pair_force(r_ij, beta_ij, r_d, k_f=k_f)
    # hard avoidance: Heaviside(r_d - r) gates the nominal fraction
    if r_ij >= r_d:
        return PolarVec(0.0, beta_ij)
    mag = (r_ij - r_d) / (r_ij * r_ij)
    return PolarVec(-mag, wrap_angle(beta_ij + math.pi))


def align_force(rel_headings: Iterable[float]) -> CartVec:
    """Vicsek-style alignment from idealized heading readings.

    Each neighbor votes the unit vector of its heading difference relative
    to the focal robot; the force is the average over voting neighbors.
    Exactly aligned neighbors have a zero-magnitude difference and are
    skipped, so a fully aligned neighborhood exerts no alignment force.
    """
    fx = fy = 0.0
    count = 0
    for h in rel_headings:
        if h == 0.0:
            continue
        fx += math.cos(h)
        fy += math.sin(h)
        count += 1
    if count == 0:
        return CartVec(0.0, 0.0)
    return CartVec(fx / count, fy / count)


def recommended_sense_range(r_d: float) -> float:
    """Sensing radius that keeps the nearest interaction shell visible."""
    return 1.8 * 2.0 ** (1.0 / 6.0) * r_d


def classify_update(
    classif: ClassificationSets,
    prev_tracks: dict[int, NeighborEstimate],
    curr_tracks: dict[int, NeighborEstimate],
    cfg: PGConfig,
) -> ClassificationSets:
    """One pause-phase classification step over consecutive-tick track pairs.

    Tracks seen on both ticks are tested against the motion thresholds:
    new tracks land in the faulty set only if they fail the test, faulty
    tracks that pass move to nominal, and nominal status is sticky for the
    rest of the pause.  Vanished tracks drop out of both sets; brand-new
    tracks wait for their first motion measurement.
    """
    out = ClassificationSets(set(classif.nominal), set(classif.faulty))
    for tid in prev_tracks:
        if tid not in curr_tracks:
            out.drop(tid)
    for tid, curr in curr_tracks.items():
        prev = prev_tracks.get(tid)
        if prev is None:
            continue
        deltas = motion_deltas(prev, curr)
        below = below_motion_thresholds(deltas, cfg.u_min, cfg.theta_min)
        if tid in out.nominal:
            continue
        if tid in out.faulty:
            if not below:
                out.faulty.discard(tid)
                out.nominal.add(tid)
        else:
            (out.faulty if below else out.nominal).add(tid)
    return out


class TrackedNeighbor(NamedTuple):
    """Per-tick view of one tracked neighbor handed to the controller."""

    track_id: int
    robot_id: int
    estimate: NeighborEstimate
    rel_heading: float | None = None  # idealized orientation reading


class StepResult(NamedTuple):
    paused: bool
    force: CartVec
    pause_cycle_ended: bool
    faulty_robots_at_pause_end: frozenset[int]


class PauseGoController:
    """Reference pause-and-go state machine for a single robot.

    Owns the behavioral state, duration timer, classification sets, and
    the robot's random stream.  step() consumes exactly one tick's tracked
    detections (sorted internally by robot id so random draws are
    reproducible) and returns either a pause command or a motion force.
    """

    def __init__(self, params: ModelParams, cfg: PGConfig, rng: SplitMix64,
                 use_alignment: bool = False):
        self.params = params
        self.cfg = cfg
        self.rng = rng
        self.use_alignment = use_alignment
        self.paused = False
        self.timer = rng.randint(*cfg.go)
        self.classif = ClassificationSets()
        self._prev_estimates: dict[int, NeighborEstimate] = {}
        self._prev_track_robots: dict[int, int] = {}
        self._was_paused_last_tick = False

    def step(self, neighbors: list[TrackedNeighbor]) -> StepResult:
        neighbors = sorted(neighbors, key=lambda nb: nb.robot_id)
        cycle_ended = False
        faulty_robots: frozenset[int] = frozenset()

        if self.timer <= 0:
            if self.paused:
                # pause-end faulty set, mapped to ground-truth robot ids
                faulty_robots = frozenset(
                    rid for tid, rid in self._prev_track_robots.items()
                    if tid in self.classif.faulty
                )
                cycle_ended = True
                self.paused = False
                self.timer = self.rng.randint(*self.cfg.go)
            else:
                self.paused = True
                self.timer = self.rng.randint(*self.cfg.pause)
                self.classif = ClassificationSets()

        curr = {nb.track_id: nb.estimate for nb in neighbors}
        for tid in list(self._prev_estimates):
            if tid not in curr:
                self.classif.drop(tid)

        if self.paused:
            if self._was_paused_last_tick:
                self.classif = classify_update(
                    self.classif, self._prev_estimates, curr, self.cfg
                )
            force = CartVec(0.0, 0.0)
        else:
            force = self._go_force(neighbors)

        self._was_paused_last_tick = self.paused
        self._prev_estimates = curr
        self._prev_track_robots = {nb.track_id: nb.robot_id for nb in neighbors}
        self.timer -= 1
        return StepResult(self.paused, force, cycle_ended, faulty_robots)

    def _go_force(self, neighbors: list[TrackedNeighbor]) -> CartVec:
        fx = fy = 0.0
        headings = []
        for nb in neighbors:
            if nb.track_id not in self.classif.faulty and nb.track_id not in self.classif.nominal:
                self.classif.nominal.add(nb.track_id)  # new while moving: trust it
            c = nb.estimate.center
            if nb.track_id in self.classif.faulty:
                f = faulty_pair_force(
                    c.r, c.beta, self.params.r_d, self.cfg.interaction,
                    rng=self.rng, k_f=self.params.k_f, p_faulty=self.cfg.p_faulty,
                )
                fx += f.r * math.cos(f.beta)
                fy += f.r * math.sin(f.beta)
            else:
                mag = self.params.k_f * (c.r - self.params.r_d) / (c.r * c.r)
                fx += mag * math.cos(c.beta)
                fy += mag * math.sin(c.beta)
                if self.use_alignment and nb.rel_heading is not None:
                    headings.append(nb.rel_heading)
        if self.use_alignment:
            a = align_force(headings)
            fx += self.params.k_3 * a.x
            fy += self.params.k_3 * a.y
        return CartVec(fx, fy)
