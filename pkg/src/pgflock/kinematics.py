"""Differential-drive state, motion control, integration, and contact resolution.

The control law maps a planar force command to (linear, angular) velocity
with a forward bias and hard clamps; integration is forward Euler at a
fixed 0.1 s tick.  Contact resolution is kinematic: overlapping rectangle
pairs are separated along the minimum-translation axis, with stuck robots
treated as immovable.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .geometry import CartVec, OrientedRect, rect_corners, wrap_angle

TICK_SECONDS = 0.1


class BehavioralState(enum.Enum):
    GO = "go"
    PAUSE = "pause"


class FaultKind(enum.Enum):
    NOMINAL = "nominal"
    STUCK = "stuck"
    SLOWDOWN = "slowdown"


@dataclass(frozen=True)
class ControlGains:
    k1: float = 2.5
    k2: float = 0.06
    u_forward: float = 0.0175
    u_max: float = 0.035
    omega_lim: float = 0.5236
    wheelbase: float = 0.018


@dataclass
class RobotState:
    position: CartVec = field(default_factory=lambda: CartVec(0.0, 0.0))
    heading: float = 0.0
    u: float = 0.0
    omega: float = 0.0
    displacement: CartVec = field(default_factory=lambda: CartVec(0.0, 0.0))
    behavioral_state: BehavioralState = BehavioralState.GO
    state_timer: int = 0
    health: FaultKind = FaultKind.NOMINAL


def mdmc(force: CartVec, gains: ControlGains) -> tuple[float, float]:
    """Magnitude-dependent motion control: force -> clamped (u, omega)."""
    if not (math.isfinite(force.x) and math.isfinite(force.y)):
        raise ValueError(f"non-finite force: {force}")
    u = gains.k1 * force.x + gains.u_forward
    u = min(max(u, 0.0), gains.u_max)
    omega = gains.k2 * force.y
    omega = min(max(omega, -gains.omega_lim), gains.omega_lim)
    return u, omega


def wheel_speeds(u: float, omega: float, wheelbase: float) -> tuple[float, float]:
    """(right, left) wheel velocities for a differential drive."""
    return u - omega * wheelbase / 2.0, u + omega * wheelbase / 2.0


def integrate(state: RobotState, u: float, omega: float,
              dt: float = TICK_SECONDS) -> RobotState:
    """Forward-Euler unicycle step; position uses the pre-update heading."""
    dx = u * dt * math.cos(state.heading)
    dy = u * dt * math.sin(state.heading)
    return RobotState(
        position=CartVec(state.position.x + dx, state.position.y + dy),
        heading=wrap_angle(state.heading + omega * dt),
        u=u,
        omega=omega,
        displacement=CartVec(dx, dy),
        behavioral_state=state.behavioral_state,
        state_timer=state.state_timer,
        health=state.health,
    )


def rect_overlap_mtv(a: OrientedRect, b: OrientedRect) -> CartVec | None:
    """Minimum translation vector pushing b away from a, or None if disjoint.

    Separating-axis test over the four face normals of the two rectangles.
    Touching (zero-depth) contact counts as disjoint.
    """
    corners_a = rect_corners(a)
    corners_b = rect_corners(b)
    best_depth = math.inf
    best_axis = (0.0, 0.0)
    for rect in (a, b):
        c, s = math.cos(rect.heading), math.sin(rect.heading)
        for ax, ay in ((c, s), (-s, c)):
            min_a = min(p.x * ax + p.y * ay for p in corners_a)
            max_a = max(p.x * ax + p.y * ay for p in corners_a)
            min_b = min(p.x * ax + p.y * ay for p in corners_b)
            max_b = max(p.x * ax + p.y * ay for p in corners_b)
            depth = min(max_a, max_b) - max(min_a, min_b)
            if depth <= 0.0:
                return None
            if depth < best_depth:
                best_depth = depth
                best_axis = (ax, ay)
    dx = b.center.x - a.center.x
    dy = b.center.y - a.center.y
    sign = 1.0 if dx * best_axis[0] + dy * best_axis[1] >= 0.0 else -1.0
    return CartVec(sign * best_depth * best_axis[0], sign * best_depth * best_axis[1])


def resolve_collisions(
    rects: list[OrientedRect],
    immovable: list[bool] | None = None,
    max_sweeps: int = 8,
) -> list[CartVec]:
    """Separate every overlapping rectangle pair; returns corrected centers.

    Pairs are visited in ascending index order, each moved half the overlap
    along the minimum-translation axis (an immovable robot passes its share
    to the other).  Sweeps repeat until no pair overlaps or the budget runs
    out.
    """
    centers = [r.center for r in rects]
    n = len(rects)
    if immovable is None:
        immovable = [False] * n
    for _ in range(max_sweeps):
        moved = False
        for i in range(n):
            for j in range(i + 1, n):
                ri = OrientedRect(centers[i], rects[i].heading,
                                  rects[i].half_length, rects[i].half_width)
                rj = OrientedRect(centers[j], rects[j].heading,
                                  rects[j].half_length, rects[j].half_width)
                mtv = rect_overlap_mtv(ri, rj)
                if mtv is None:
                    continue
                if immovable[i] and immovable[j]:
                    continue
                if immovable[i]:
                    share_i, share_j = 0.0, 1.0
                elif immovable[j]:
                    share_i, share_j = 1.0, 0.0
                else:
                    share_i, share_j = 0.5, 0.5
                centers[i] = CartVec(centers[i].x - share_i * mtv.x,
                                     centers[i].y - share_i * mtv.y)
                centers[j] = CartVec(centers[j].x + share_j * mtv.x,
                                     centers[j].y + share_j * mtv.y)
                moved = True
        if not moved:
            break
    return centers
