"""Monocular 360-degree sensing with occlusion policies and visual tracking.

The sensor reports, for each detected neighbor, the bearings of its two
outermost vertical edges and the vertical angles subtended at those edges.
No range is sensed directly; the estimation module recovers it.  Policies
differ only in which partially hidden neighbors count as detected:

* XRAY     -- every robot in range, occlusions ignored.
* OMID     -- only robots whose full angular extent is unobstructed.
* CENTER   -- robots whose center ray is unobstructed.
* COMPLID  -- robots with any visible sliver; edges are reported as if the
              robot were fully visible (cognitive completion).

Occlusion depth-orders robots by center distance to the observer, ties
broken by ascending robot index.  Measurements are synthesized noise-free
from ground truth; there is no pixelization or quantization model.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

from .geometry import (
    AngInterval,
    OrientedRect,
    interval_contains,
    intervals_overlap,
    interval_subtract,
    subtended_interval,
    wrap_angle,
)

# angular slivers thinner than this do not count as visible
MIN_VISIBLE_WIDTH = 1e-12


class OcclusionPolicy(enum.Enum):
    XRAY = "xray"
    OMID = "omid"
    CENTER = "center"
    COMPLID = "complid"


@dataclass(frozen=True)
class PerceivedNeighbor:
    """One tracked neighbor's angular measurements in the focal frame.

    beta_l <= beta_r on the unwrapped interval around the neighbor; theta
    is the angular width.  robot_id is the simulation-internal identity the
    tracker oracle uses for association; behavioral code must key on
    track_id only.
    """

    robot_id: int
    beta_l: float
    beta_r: float
    alpha_l: float
    alpha_r: float
    theta: float
    rel_heading: float | None = None
    track_id: int | None = None


@dataclass
class DetectionSet:
    observer_id: int
    tick: int = 0
    neighbors: list[PerceivedNeighbor] = field(default_factory=list)

    def __iter__(self):
        return iter(self.neighbors)

    def __len__(self):
        return len(self.neighbors)


def _vertical_angle(distance: float, height: float) -> float:
    return 2.0 * math.atan(height / (2.0 * distance))


def sense(
    observer: int,
    rects: Sequence[OrientedRect],
    policy: OcclusionPolicy,
    r_sense: float,
    height: float,
    read_headings: bool = False,
    tick: int = 0,
) -> DetectionSet:
    """Detect neighbors of one observer under the given occlusion policy.

    rects holds every robot's footprint, indexed by robot id; the observer
    senses from its own center.  Track ids are left unassigned (see
    NeighborTracker).
    """
    focal = rects[observer]
    ox, oy = focal.center
    n = len(rects)

    dists = [math.hypot(r.center.x - ox, r.center.y - oy) for r in rects]
    candidates = [
        j for j in range(n) if j != observer and dists[j] <= r_sense
    ]

    out = DetectionSet(observer_id=observer, tick=tick)
    for j in candidates:
        interval, left, right = subtended_interval(focal.center, rects[j])
        if policy is not OcclusionPolicy.XRAY:
            occluders = [
                subtended_interval(focal.center, rects[k])[0]
                for k in range(n)
                if k not in (observer, j) and (dists[k], k) < (dists[j], j)
            ]
            center_ray = math.atan2(rects[j].center.y - oy, rects[j].center.x - ox)
            if not _detectable(policy, interval, occluders, center_ray):
                continue
        d_left = math.hypot(left.x - ox, left.y - oy)
        d_right = math.hypot(right.x - ox, right.y - oy)
        # focal-frame bearings, unwrapped around the interval center
        raw_center = 0.5 * (interval.lo + interval.hi) - focal.heading
        shift = wrap_angle(raw_center) - raw_center
        out.neighbors.append(
            PerceivedNeighbor(
                robot_id=j,
                beta_l=interval.lo - focal.heading + shift,
                beta_r=interval.hi - focal.heading + shift,
                alpha_l=_vertical_angle(d_left, height),
                alpha_r=_vertical_angle(d_right, height),
                theta=interval.width,
                rel_heading=wrap_angle(rects[j].heading - focal.heading)
                if read_headings else None,
            )
        )
    return out


def _detectable(
    policy: OcclusionPolicy,
    interval: AngInterval,
    occluders: list[AngInterval],
    center_ray: float,
) -> bool:
    if policy is OcclusionPolicy.OMID:
        return not any(intervals_overlap(interval, occ) for occ in occluders)
    if policy is OcclusionPolicy.CENTER:
        return not any(interval_contains(occ, center_ray) for occ in occluders)
    if policy is OcclusionPolicy.COMPLID:
        visible = interval_subtract(interval, occluders)
        return any(v.width > MIN_VISIBLE_WIDTH for v in visible)
    return True


class NeighborTracker:
    """Assigns track identities that persist across continuous visibility.

    A detection inherits the previous tick's track id only if the same
    robot was detected on the immediately preceding update; any gap makes
    the next sighting a brand-new track.  update() must therefore be called
    once per tick, even with an empty detection set.
    """

    def __init__(self):
        self._next_id = 0
        self._active: dict[int, int] = {}

    def update(self, detections: DetectionSet) -> DetectionSet:
        current: dict[int, int] = {}
        tracked = []
        for nb in detections.neighbors:
            tid = self._active.get(nb.robot_id)
            if tid is None:
                tid = self._next_id
                self._next_id += 1
            current[nb.robot_id] = tid
            tracked.append(
                PerceivedNeighbor(
                    robot_id=nb.robot_id,
                    beta_l=nb.beta_l,
                    beta_r=nb.beta_r,
                    alpha_l=nb.alpha_l,
                    alpha_r=nb.alpha_r,
                    theta=nb.theta,
                    rel_heading=nb.rel_heading,
                    track_id=tid,
                )
            )
        self._active = current
        return DetectionSet(detections.observer_id, detections.tick, tracked)
