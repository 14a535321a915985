"""Range and bearing estimation from subtended angles, and motion deltas.

The vertical angle at each outermost edge gives the range to that edge
(the body height is known).  The midpoint of the two edge vectors is the
range to the facing chord; comparing the chord's metric span against the
known body length/width tells whether the view is broadside, in which case
the center sits half a width (or half a length) deeper.  Oblique views see
a corner-to-corner diagonal and take no correction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import PolarVec, polar_to_cart
from .kinematics import TICK_SECONDS
from .vision import PerceivedNeighbor


@dataclass(frozen=True)
class BodyDims:
    """Known physical dimensions of every robot (meters)."""

    length: float = 0.05
    width: float = 0.02
    height: float = 0.027
    eps: float = 1e-6  # tolerance when matching the visible span to a side


@dataclass(frozen=True)
class NeighborEstimate:
    center: PolarVec
    left: PolarVec
    right: PolarVec
    span: float
    theta: float
    track_id: int | None


@dataclass(frozen=True)
class MotionDeltas:
    delta_u: float       # meters per tick
    delta_theta: float   # relative change in angular width, signed


def range_from_vertical(alpha: float, height: float) -> float:
    """Range to a vertical edge from its subtended angle."""
    if not 0.0 < alpha < math.pi:
        raise ValueError(f"vertical angle outside (0, pi): {alpha}")
    return 0.5 * height / math.tan(0.5 * alpha)


def _edges_and_midpoint(p: PerceivedNeighbor, dims: BodyDims):
    r_l = range_from_vertical(p.alpha_l, dims.height)
    r_r = range_from_vertical(p.alpha_r, dims.height)
    left = PolarVec(r_l, p.beta_l)
    right = PolarVec(r_r, p.beta_r)
    lx, ly = polar_to_cart(left)
    rx, ry = polar_to_cart(right)
    span = math.hypot(rx - lx, ry - ly)
    r_mid = math.hypot(0.5 * (lx + rx), 0.5 * (ly + ry))
    return left, right, span, r_mid


def estimate_center(p: PerceivedNeighbor, dims: BodyDims) -> NeighborEstimate:
    """Hybrid estimate of the neighbor-center polar vector.

    Bearing is the mean of the edge bearings.  Range is the distance to the
    midpoint of the visible chord, plus the broadside depth correction when
    the chord's span matches a known side (length checked first; with
    eps < (length - width) / 2 the cases are exclusive).
    """
    left, right, span, r_mid = _edges_and_midpoint(p, dims)
    if abs(span - dims.length) <= dims.eps:
        correction = 0.5 * dims.width
    elif abs(span - dims.width) <= dims.eps:
        correction = 0.5 * dims.length
    else:
        correction = 0.0
    beta_c = 0.5 * (p.beta_l + p.beta_r)
    return NeighborEstimate(
        center=PolarVec(r_mid + correction, beta_c),
        left=left,
        right=right,
        span=span,
        theta=p.theta,
        track_id=p.track_id,
    )


def vertical_only_estimate(p: PerceivedNeighbor, dims: BodyDims) -> NeighborEstimate:
    """Baseline estimate from vertical angles alone: no depth correction."""
    left, right, span, r_mid = _edges_and_midpoint(p, dims)
    beta_c = 0.5 * (p.beta_l + p.beta_r)
    return NeighborEstimate(
        center=PolarVec(r_mid, beta_c),
        left=left,
        right=right,
        span=span,
        theta=p.theta,
        track_id=p.track_id,
    )


def motion_deltas(prev: NeighborEstimate, curr: NeighborEstimate) -> MotionDeltas:
    """Perceived per-tick motion of a tracked neighbor in the focal frame.

    delta_u is the Cartesian displacement of the center estimate between
    two consecutive ticks; delta_theta the relative change in angular
    width.  Valid only while the observer itself holds still.
    """
    if prev.track_id != curr.track_id:
        raise ValueError("motion deltas require the same track on both ticks")
    if curr.theta <= 0.0:
        raise ValueError("current angular width must be positive")
    px, py = polar_to_cart(prev.center)
    cx, cy = polar_to_cart(curr.center)
    return MotionDeltas(
        delta_u=math.hypot(cx - px, cy - py),
        delta_theta=(curr.theta - prev.theta) / curr.theta,
    )


def below_motion_thresholds(
    deltas: MotionDeltas, u_min: float, theta_min: float,
    dt: float = TICK_SECONDS,
) -> bool:
    """True when perceived motion stays at or below both fault thresholds.

    u_min is in m/s while delta_u is meters per tick, so the comparison
    divides by the tick duration.
    """
    return abs(deltas.delta_u) / dt <= u_min and abs(deltas.delta_theta) <= theta_min
