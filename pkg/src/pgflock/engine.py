"""World construction, the deterministic tick loop, and fault injection.

A run is a pure function of its configuration (seed included): robots are
placed by the world stream, every behavioral draw comes from that robot's
own stream, and the tick stages execute in a fixed order: snapshot, sense,
behave, fault actuation, integrate, resolve contacts, record.

Two execution paths exist.  tick()/run() drive the compiled kernels; the
ReferenceEngine steps the same physics through the plain module functions
and exists to pin the kernels down in tests (and for small diagnostics).
Faulty robots keep running their controller; only actuation is clamped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .behavior import (
    ClassificationSets,
    InteractionRule,
    ModelKind,
    ModelParams,
    PGConfig,
    aa_pair_force,
    align_force,
    classify_update,
    faulty_pair_force,
)
from .estimation import BodyDims, NeighborEstimate, estimate_center, vertical_only_estimate
from .geometry import CartVec, OrientedRect, PolarVec, wrap_angle
from .kinematics import (
    TICK_SECONDS,
    ControlGains,
    FaultKind,
    mdmc,
    rect_overlap_mtv,
    resolve_collisions,
)
from .metrics import TickRecord, final_order, window_speed
from .rng import TAG_ROBOT, TAG_WORLD, SplitMix64, derive_seed
from .vision import OcclusionPolicy, sense

MAX_PLACEMENT_ATTEMPTS = 100_000
COLLISION_SWEEPS = 8

_POLICY_CODE = {
    OcclusionPolicy.XRAY: K.XRAY,
    OcclusionPolicy.OMID: K.OMID,
    OcclusionPolicy.CENTER: K.CENTER,
    OcclusionPolicy.COMPLID: K.COMPLID,
}
_ESTIMATOR_CODE = {"oracle": K.EST_ORACLE, "hybrid": K.EST_HYBRID,
                   "vertical": K.EST_VERTICAL}
_RULE_CODE = {
    InteractionRule.AVOID: K.RULE_AVOID,
    InteractionRule.AVOID_HALF_FORCE: K.RULE_HALF_FORCE,
    InteractionRule.AVOID_HALF_TIME: K.RULE_HALF_TIME,
}
_FAULT_CODE = {FaultKind.NOMINAL: 0, FaultKind.STUCK: 1, FaultKind.SLOWDOWN: 2}


@dataclass(frozen=True)
class WorldConfig:
    n_robots: int = 40
    model: ModelKind = ModelKind.AAV
    occlusion: OcclusionPolicy = OcclusionPolicy.COMPLID
    params: ModelParams = ModelParams()
    gains: ControlGains = ControlGains()
    dims: BodyDims = BodyDims()
    pg: PGConfig = PGConfig()
    faulty_fraction: float = 0.0
    fault_kind: FaultKind = FaultKind.STUCK
    slowdown_factor: float = 0.3
    fault_onset_tick: int = 0
    init_area: float = 0.5
    ticks: int = 12000
    seed: int = 1


@dataclass
class World:
    cfg: WorldConfig
    tick_index: int = 0
    # pose and actuation
    pos: np.ndarray = None
    psi: np.ndarray = None
    cmd_u: np.ndarray = None
    cmd_w: np.ndarray = None
    disp: np.ndarray = None
    # behavioral state
    paused: np.ndarray = None
    timer: np.ndarray = None
    was_paused: np.ndarray = None
    rng_states: np.ndarray = None
    fault_code: np.ndarray = None
    # per-pair sensing / tracking state
    vis: np.ndarray = None
    vis_prev: np.ndarray = None
    b_l: np.ndarray = None
    b_r: np.ndarray = None
    a_l: np.ndarray = None
    a_r: np.ndarray = None
    est_r: np.ndarray = None
    est_b: np.ndarray = None
    est_th: np.ndarray = None
    prev_r: np.ndarray = None
    prev_b: np.ndarray = None
    prev_th: np.ndarray = None
    relh: np.ndarray = None
    cls: np.ndarray = None
    fp_acc: np.ndarray = None
    records: list = field(default_factory=list)

    def effective_faulty(self) -> np.ndarray:
        if self.tick_index < self.cfg.fault_onset_tick:
            return np.zeros(self.cfg.n_robots, dtype=np.bool_)
        return self.fault_code != 0

    def rects(self) -> list[OrientedRect]:
        hl, hw = 0.5 * self.cfg.dims.length, 0.5 * self.cfg.dims.width
        return [
            OrientedRect(CartVec(self.pos[i, 0], self.pos[i, 1]),
                         float(self.psi[i]), hl, hw)
            for i in range(self.cfg.n_robots)
        ]


def init_world(cfg: WorldConfig) -> World:
    """Place robots uniformly (no initial overlap) and seed all streams."""
    n = cfg.n_robots
    if n < 1:
        raise ValueError("need at least one robot")
    world_rng = np.random.Generator(np.random.PCG64(derive_seed(cfg.seed, TAG_WORLD)))
    hl, hw = 0.5 * cfg.dims.length, 0.5 * cfg.dims.width
    half_area = 0.5 * cfg.init_area

    pos = np.empty((n, 2))
    psi = np.empty(n)
    placed: list[OrientedRect] = []
    attempts = 0
    for i in range(n):
        while True:
            attempts += 1
            if attempts > MAX_PLACEMENT_ATTEMPTS:
                raise RuntimeError(
                    f"could not place {n} robots in a "
                    f"{cfg.init_area} x {cfg.init_area} area without overlap"
                )
            x = world_rng.uniform(-half_area, half_area)
            y = world_rng.uniform(-half_area, half_area)
            h = wrap_angle(world_rng.uniform(0.0, 2.0 * math.pi))
            cand = OrientedRect(CartVec(x, y), h, hl, hw)
            if all(rect_overlap_mtv(cand, other) is None for other in placed):
                placed.append(cand)
                pos[i] = (x, y)
                psi[i] = h
                break

    fault_code = np.zeros(n, dtype=np.int8)
    n_faulty = int(cfg.faulty_fraction * n)
    if n_faulty >= n:
        raise ValueError("at least one robot must stay nominal")
    if n_faulty > 0:
        chosen = world_rng.choice(n, size=n_faulty, replace=False)
        fault_code[chosen] = _FAULT_CODE[cfg.fault_kind]

    rng_states = np.empty(n, dtype=np.uint64)
    timer = np.zeros(n, dtype=np.int64)
    for i in range(n):
        stream = SplitMix64(derive_seed(cfg.seed, TAG_ROBOT, i))
        if cfg.model.uses_pause_go:
            timer[i] = stream.randint(*cfg.pg.go)
        rng_states[i] = stream.state

    return World(
        cfg=cfg,
        pos=pos,
        psi=psi,
        cmd_u=np.zeros(n),
        cmd_w=np.zeros(n),
        disp=np.zeros((n, 2)),
        paused=np.zeros(n, dtype=np.bool_),
        timer=timer,
        was_paused=np.zeros(n, dtype=np.bool_),
        rng_states=rng_states,
        fault_code=fault_code,
        vis=np.zeros((n, n), dtype=np.bool_),
        vis_prev=np.zeros((n, n), dtype=np.bool_),
        b_l=np.zeros((n, n)),
        b_r=np.zeros((n, n)),
        a_l=np.zeros((n, n)),
        a_r=np.zeros((n, n)),
        est_r=np.zeros((n, n)),
        est_b=np.zeros((n, n)),
        est_th=np.zeros((n, n)),
        prev_r=np.zeros((n, n)),
        prev_b=np.zeros((n, n)),
        prev_th=np.zeros((n, n)),
        relh=np.zeros((n, n)),
        cls=np.zeros((n, n), dtype=np.int8),
        fp_acc=np.zeros(2, dtype=np.int64),
    )


def tick(world: World) -> World:
    """Advance the world one tick in place (also returns it)."""
    cfg = world.cfg
    n = cfg.n_robots
    hl, hw = 0.5 * cfg.dims.length, 0.5 * cfg.dims.width

    # rotate current measurements into the previous-tick slots
    world.vis_prev, world.vis = world.vis, world.vis_prev
    world.prev_r, world.est_r = world.est_r, world.prev_r
    world.prev_b, world.est_b = world.est_b, world.prev_b
    world.prev_th, world.est_th = world.est_th, world.prev_th

    K.sense_tick(
        world.pos, world.psi, hl, hw, cfg.dims.length, cfg.dims.width,
        cfg.dims.height, cfg.dims.eps, cfg.params.r_sense,
        _POLICY_CODE[cfg.occlusion], _ESTIMATOR_CODE[cfg.model.estimator],
        cfg.model.uses_alignment,
        world.vis, world.b_l, world.b_r, world.a_l, world.a_r,
        world.est_r, world.est_b, world.est_th, world.relh,
    )

    eff = world.effective_faulty()
    K.behavior_tick(
        cfg.model.uses_pause_go, cfg.model.uses_alignment,
        _RULE_CODE[cfg.pg.interaction], cfg.pg.p_faulty,
        cfg.params.r_d, cfg.params.k_f, cfg.params.k_3,
        cfg.gains.k1, cfg.gains.k2, cfg.gains.u_forward,
        cfg.gains.u_max, cfg.gains.omega_lim,
        cfg.pg.pause[0], cfg.pg.pause[1], cfg.pg.go[0], cfg.pg.go[1],
        cfg.pg.u_min * TICK_SECONDS, cfg.pg.theta_min,
        world.vis, world.vis_prev, world.est_r, world.est_b, world.est_th,
        world.prev_r, world.prev_b, world.prev_th, world.relh,
        world.cls, world.paused, world.timer, world.was_paused,
        world.rng_states, eff, world.fp_acc, world.cmd_u, world.cmd_w,
    )

    stuck = eff & (world.fault_code == 1)
    slow = eff & (world.fault_code == 2)
    world.cmd_u[stuck] = 0.0
    world.cmd_w[stuck] = 0.0
    world.cmd_u[slow] *= cfg.slowdown_factor
    world.cmd_w[slow] *= cfg.slowdown_factor

    before = world.pos.copy()
    K.integrate_tick(world.pos, world.psi, world.cmd_u, world.cmd_w, TICK_SECONDS)
    K.resolve_collisions_tick(world.pos, world.psi, hl, hw, stuck, COLLISION_SWEEPS)
    np.subtract(world.pos, before, out=world.disp)

    world.tick_index += 1
    world.records.append(_record(world, eff))
    return world


def _record(world: World, eff: np.ndarray) -> TickRecord:
    nominal = ~eff
    if not nominal.any():
        raise ValueError("metrics undefined with zero nominal robots")
    h = world.psi[nominal]
    ordr = float(np.hypot(np.cos(h).mean(), np.sin(h).mean()))
    d = world.disp[nominal]
    speed = float(np.hypot(d[:, 0], d[:, 1]).mean() / TICK_SECONDS)
    centroid_step = world.disp[nominal].mean(axis=0)
    centroid_speed = float(math.hypot(centroid_step[0], centroid_step[1]) / TICK_SECONDS)
    cycles = int(world.fp_acc[1])
    fp = float(world.fp_acc[0] / cycles) if cycles > 0 else 0.0
    comps = int(K.component_count(world.pos, world.cfg.params.r_sense))
    return TickRecord(world.tick_index, ordr, speed, centroid_speed, fp, comps)


@dataclass
class RunResult:
    cfg: WorldConfig
    records: list[TickRecord]
    trajectory: list[tuple] | None = None

    def final_order(self) -> float:
        return final_order(self.records)

    def window_speed(self) -> float:
        return window_speed(self.records)

    def fp_per_cycle(self) -> float:
        return self.records[-1].fp_per_cycle if self.records else 0.0


_HEALTH_NAMES = {0: "nominal", 1: "stuck", 2: "slowdown"}


def run(cfg: WorldConfig, record_trajectory: bool = False) -> RunResult:
    """Execute cfg.ticks ticks from a fresh world."""
    world = init_world(cfg)
    traj: list[tuple] | None = [] if record_trajectory else None
    for _ in range(cfg.ticks):
        tick(world)
        if traj is not None:
            eff = world.effective_faulty()
            for i in range(cfg.n_robots):
                traj.append((
                    world.tick_index, i,
                    float(world.pos[i, 0]), float(world.pos[i, 1]),
                    float(world.psi[i]),
                    "pause" if world.paused[i] else "go",
                    _HEALTH_NAMES[int(world.fault_code[i])] if eff[i] else "nominal",
                ))
    return RunResult(cfg=cfg, records=world.records, trajectory=traj)


class ReferenceEngine:
    """Slow twin of the kernel engine built from the module-level pieces.

    Starts from the identical initial world (same placement, same streams)
    and steps through vision.sense / estimation / behavior rules /
    kinematics directly.  Used by the test suite to cross-validate the
    kernels tick by tick; too slow for production runs.
    """

    def __init__(self, cfg: WorldConfig):
        self.cfg = cfg
        self.world = init_world(cfg)
        n = cfg.n_robots
        self.prev_estimates: list[dict[int, NeighborEstimate]] = [dict() for _ in range(n)]
        self.classif = [ClassificationSets() for _ in range(n)]

    def step(self) -> None:
        cfg = self.cfg
        w = self.world
        n = cfg.n_robots
        eff = w.effective_faulty()
        rects = w.rects()
        read_relh = cfg.model.uses_alignment

        w.vis_prev, w.vis = w.vis, w.vis_prev
        w.prev_r, w.est_r = w.est_r, w.prev_r
        w.prev_b, w.est_b = w.est_b, w.prev_b
        w.prev_th, w.est_th = w.est_th, w.prev_th

        all_estimates = []
        all_relh = []
        for i in range(n):
            det = sense(i, rects, cfg.occlusion, cfg.params.r_sense,
                        cfg.dims.height, read_headings=read_relh, tick=w.tick_index)
            est: dict[int, NeighborEstimate] = {}
            rel: dict[int, float] = {}
            w.vis[i, :] = False
            for nb in det.neighbors:
                j = nb.robot_id
                w.vis[i, j] = True
                if nb.rel_heading is not None:
                    rel[j] = nb.rel_heading
                if cfg.model.estimator == "oracle":
                    d = math.hypot(w.pos[j, 0] - w.pos[i, 0], w.pos[j, 1] - w.pos[i, 1])
                    bearing = wrap_angle(
                        math.atan2(w.pos[j, 1] - w.pos[i, 1], w.pos[j, 0] - w.pos[i, 0])
                        - w.psi[i]
                    )
                    e = NeighborEstimate(PolarVec(d, bearing), PolarVec(d, bearing),
                                         PolarVec(d, bearing), 0.0, nb.theta, None)
                elif cfg.model.estimator == "vertical":
                    e = vertical_only_estimate(nb, cfg.dims)
                else:
                    e = estimate_center(nb, cfg.dims)
                est[j] = e
                w.est_r[i, j] = e.center.r
                w.est_b[i, j] = e.center.beta
                w.est_th[i, j] = nb.theta
            all_estimates.append(est)
            all_relh.append(rel)

        for i in range(n):
            self._behave(i, all_estimates[i], all_relh[i], eff)

        stuck = eff & (w.fault_code == 1)
        slow = eff & (w.fault_code == 2)
        w.cmd_u[stuck] = 0.0
        w.cmd_w[stuck] = 0.0
        w.cmd_u[slow] *= cfg.slowdown_factor
        w.cmd_w[slow] *= cfg.slowdown_factor

        before = w.pos.copy()
        for i in range(n):
            h = w.psi[i]
            w.pos[i, 0] += w.cmd_u[i] * TICK_SECONDS * math.cos(h)
            w.pos[i, 1] += w.cmd_u[i] * TICK_SECONDS * math.sin(h)
            w.psi[i] = wrap_angle(h + w.cmd_w[i] * TICK_SECONDS)
        corrected = resolve_collisions(w.rects(), list(stuck), COLLISION_SWEEPS)
        for i in range(n):
            w.pos[i, 0] = corrected[i].x
            w.pos[i, 1] = corrected[i].y
        np.subtract(w.pos, before, out=w.disp)

        w.tick_index += 1
        w.records.append(_record(w, eff))

    def _behave(self, i: int, estimates: dict[int, NeighborEstimate],
                rel: dict[int, float], eff: np.ndarray) -> None:
        cfg = self.cfg
        w = self.world
        stream = SplitMix64(int(w.rng_states[i]))
        classif = self.classif[i]

        if cfg.model.uses_pause_go:
            if w.timer[i] <= 0:
                if w.paused[i]:
                    if not eff[i]:
                        w.fp_acc[0] += sum(
                            1 for j in classif.faulty if not eff[j]
                        )
                        w.fp_acc[1] += 1
                    w.paused[i] = False
                    w.timer[i] = stream.randint(*cfg.pg.go)
                else:
                    w.paused[i] = True
                    w.timer[i] = stream.randint(*cfg.pg.pause)
                    classif.nominal.clear()
                    classif.faulty.clear()
            for j in list(self.prev_estimates[i]):
                if j not in estimates:
                    classif.drop(j)

        if cfg.model.uses_pause_go and w.paused[i]:
            if w.was_paused[i]:
                self.classif[i] = classify_update(
                    classif, self.prev_estimates[i], estimates, cfg.pg
                )
            w.cmd_u[i] = 0.0
            w.cmd_w[i] = 0.0
            w.was_paused[i] = True
        else:
            fx = fy = 0.0
            headings: list[float] = []
            for j in sorted(estimates):
                c = estimates[j].center
                if cfg.model.uses_pause_go:
                    if j not in classif.nominal and j not in classif.faulty:
                        classif.nominal.add(j)
                    faulty = j in classif.faulty
                else:
                    faulty = False
                if faulty:
                    f = faulty_pair_force(
                        c.r, c.beta, cfg.params.r_d, cfg.pg.interaction,
                        rng=stream, k_f=cfg.params.k_f, p_faulty=cfg.pg.p_faulty,
                    )
                    fx += f.r * math.cos(f.beta)
                    fy += f.r * math.sin(f.beta)
                else:
                    f = aa_pair_force(c.r, c.beta, cfg.params.r_d, cfg.params.k_f)
                    fx += f.r * math.cos(f.beta)
                    fy += f.r * math.sin(f.beta)
                    if cfg.model.uses_alignment and j in rel:
                        headings.append(rel[j])
            if cfg.model.uses_alignment:
                a = align_force(headings)
                fx += cfg.params.k_3 * a.x
                fy += cfg.params.k_3 * a.y
            w.cmd_u[i], w.cmd_w[i] = mdmc(CartVec(fx, fy), cfg.gains)
            w.was_paused[i] = False

        if cfg.model.uses_pause_go:
            w.timer[i] -= 1
        w.rng_states[i] = stream.state
        self.prev_estimates[i] = estimates
        # mirror the sets into the array form for comparison with the kernels
        w.cls[i, :] = 0
        for j in self.classif[i].nominal:
            w.cls[i, j] = 1
        for j in self.classif[i].faulty:
            w.cls[i, j] = 2
