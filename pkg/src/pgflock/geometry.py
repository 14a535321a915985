"""Planar vector algebra, oriented rectangles, and angular-interval arithmetic.

All angles are radians normalized to (-pi, pi].  Angular intervals are kept
on an unwrapped real line anchored near the interval so the occlusion
algebra never has to branch on the +/-pi seam: an interval (lo, hi) with
lo <= hi and hi - lo < pi denotes the arc {wrap(t) : t in [lo, hi]}.
"""

from __future__ import annotations

import math
from typing import NamedTuple

TWO_PI = 2.0 * math.pi


class CartVec(NamedTuple):
    x: float
    y: float


class PolarVec(NamedTuple):
    r: float
    beta: float


class OrientedRect(NamedTuple):
    """Rectangle footprint: center, heading of the long axis, half extents."""

    center: CartVec
    heading: float
    half_length: float
    half_width: float


class AngInterval(NamedTuple):
    """Angular interval on the unwrapped line; width in [0, pi)."""

    lo: float
    hi: float

    @property
    def width(self) -> float:
        return self.hi - self.lo


def wrap_angle(a: float) -> float:
    """Normalize an angle to (-pi, pi]; in-range values pass through exactly."""
    if -math.pi < a <= math.pi:
        return a
    w = (a + math.pi) % TWO_PI
    if w <= 0.0:
        w += TWO_PI
    return w - math.pi


def _check_finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"non-finite input: {v!r}")


def polar_to_cart(p: PolarVec) -> CartVec:
    _check_finite(p.r, p.beta)
    return CartVec(p.r * math.cos(p.beta), p.r * math.sin(p.beta))


def cart_to_polar(c: CartVec) -> PolarVec:
    """Inverse of polar_to_cart; the zero vector maps to (r=0, beta=0)."""
    _check_finite(c.x, c.y)
    r = math.hypot(c.x, c.y)
    if r == 0.0:
        return PolarVec(0.0, 0.0)
    return PolarVec(r, wrap_angle(math.atan2(c.y, c.x)))


def rect_corners(rect: OrientedRect) -> list[CartVec]:
    """Four corners in counterclockwise order, starting front-left."""
    c, s = math.cos(rect.heading), math.sin(rect.heading)
    hl, hw = rect.half_length, rect.half_width
    cx, cy = rect.center
    out = []
    for bx, by in ((hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw)):
        out.append(CartVec(cx + bx * c - by * s, cy + bx * s + by * c))
    return out


def point_in_rect(p: CartVec, rect: OrientedRect) -> bool:
    """Inclusive containment test in the rectangle's body frame."""
    c, s = math.cos(rect.heading), math.sin(rect.heading)
    dx, dy = p.x - rect.center.x, p.y - rect.center.y
    bx = dx * c + dy * s
    by = -dx * s + dy * c
    return abs(bx) <= rect.half_length and abs(by) <= rect.half_width


def subtended_interval(
    observer: CartVec, rect: OrientedRect
) -> tuple[AngInterval, CartVec, CartVec]:
    """Minimal angular interval containing all corner bearings.

    Returns (interval, left_corner, right_corner) where left is the corner
    at the interval's low edge and right at the high edge.  Endpoints are
    unwrapped around the bearing of the rectangle center, so the interval
    never straddles the seam; wrap_angle(endpoint) recovers the bearing.
    """
    if point_in_rect(observer, rect):
        raise ValueError("observer inside rectangle: subtended view degenerate")
    anchor = math.atan2(rect.center.y - observer.y, rect.center.x - observer.x)
    corners = rect_corners(rect)
    lo = math.inf
    hi = -math.inf
    left = right = corners[0]
    for corner in corners:
        b = math.atan2(corner.y - observer.y, corner.x - observer.x)
        off = wrap_angle(b - anchor)
        if off < lo:
            lo, left = off, corner
        if off > hi:
            hi, right = off, corner
    return AngInterval(anchor + lo, anchor + hi), left, right


def rebase_interval(iv: AngInterval, anchor: float) -> AngInterval:
    """Translate iv by a multiple of 2*pi so its center lies within
    (anchor - pi, anchor + pi]."""
    center = 0.5 * (iv.lo + iv.hi)
    shift = anchor + wrap_angle(center - anchor) - center
    return AngInterval(iv.lo + shift, iv.hi + shift)


def interval_subtract(
    base: AngInterval, occluders: list[AngInterval]
) -> list[AngInterval]:
    """Portions of base covered by no occluder, disjoint and sorted.

    Occluders may sit anywhere on the circle; each is rebased next to the
    base interval before clipping.  Total visible width plus covered width
    equals the base width exactly (up to float rounding).
    """
    anchor = 0.5 * (base.lo + base.hi)
    clipped = []
    for occ in occluders:
        occ = rebase_interval(occ, anchor)
        lo = max(occ.lo, base.lo)
        hi = min(occ.hi, base.hi)
        if hi > lo:
            clipped.append((lo, hi))
    clipped.sort()

    visible = []
    cursor = base.lo
    for lo, hi in clipped:
        if lo > cursor:
            visible.append(AngInterval(cursor, lo))
        if hi > cursor:
            cursor = hi
    if cursor < base.hi:
        visible.append(AngInterval(cursor, base.hi))
    return visible


def intervals_overlap(a: AngInterval, b: AngInterval) -> bool:
    """True if the two arcs share a positive-width overlap."""
    b = rebase_interval(b, 0.5 * (a.lo + a.hi))
    return b.lo < a.hi and b.hi > a.lo


def interval_contains(iv: AngInterval, angle: float) -> bool:
    """True if the wrapped angle lies inside the arc (inclusive)."""
    center = 0.5 * (iv.lo + iv.hi)
    a = center + wrap_angle(angle - center)
    return iv.lo <= a <= iv.hi
