import math
import random

import pytest

from pgflock.geometry import CartVec, OrientedRect
from pgflock.kinematics import (
    ControlGains,
    RobotState,
    integrate,
    mdmc,
    rect_overlap_mtv,
    resolve_collisions,
    wheel_speeds,
)

GAINS = ControlGains()


def test_mdmc_zero_force_cruises_forward():
    assert mdmc(CartVec(0.0, 0.0), GAINS) == (0.0175, 0.0)


def test_mdmc_clamps_linear_speed():
    u, w = mdmc(CartVec(0.01, 0.0), GAINS)
    assert (u, w) == (0.035, 0.0)  # raw 0.0425 clamped


def test_mdmc_clamps_angular_speed():
    u, w = mdmc(CartVec(0.0, -10.0), GAINS)
    assert w == -0.5236  # raw -0.6 clamped
    assert u == 0.0175


def test_mdmc_rejects_non_finite_force():
    with pytest.raises(ValueError):
        mdmc(CartVec(math.nan, 0.0), GAINS)


def test_mdmc_command_bounds_property():
    rng = random.Random(3)
    for _ in range(300):
        f = CartVec(rng.uniform(-50, 50), rng.uniform(-50, 50))
        u, w = mdmc(f, GAINS)
        assert 0.0 <= u <= GAINS.u_max
        assert -GAINS.omega_lim <= w <= GAINS.omega_lim


def test_wheel_speeds_straight():
    assert wheel_speeds(0.02, 0.0, 0.018) == (0.02, 0.02)


def test_wheel_speeds_pure_rotation():
    wr, wl = wheel_speeds(0.0, 0.5, 0.018)
    assert wr == pytest.approx(-0.0045)
    assert wl == pytest.approx(0.0045)


def test_wheel_speeds_combined():
    wr, wl = wheel_speeds(0.0175, -0.5236, 0.018)
    assert wr == pytest.approx(0.0175 + 0.5236 * 0.009)
    assert wl == pytest.approx(0.0175 - 0.5236 * 0.009)


def test_wheel_speeds_linearity():
    rng = random.Random(9)
    for _ in range(100):
        u = rng.uniform(0, 0.035)
        w = rng.uniform(-0.5236, 0.5236)
        wr, wl = wheel_speeds(u, w, 0.018)
        assert wr + wl == pytest.approx(2 * u, abs=1e-15)
        assert wl - wr == pytest.approx(w * 0.018, abs=1e-15)


def test_integrate_straight_motion():
    s = integrate(RobotState(), 0.035, 0.0, 0.1)
    assert s.position == pytest.approx((0.0035, 0.0))
    assert s.heading == 0.0


def test_integrate_pure_rotation():
    s = integrate(RobotState(), 0.0, 0.5236, 0.1)
    assert s.position == (0.0, 0.0)
    assert s.heading == pytest.approx(0.05236)


def test_integrate_identity():
    start = RobotState(position=CartVec(0.3, -0.2), heading=1.1)
    s = integrate(start, 0.0, 0.0, 0.1)
    assert s.position == start.position
    assert s.heading == start.heading


def test_integrate_uses_pre_update_heading():
    s = integrate(RobotState(heading=0.0), 0.02, 1.0, 0.1)
    # displacement along the old heading even though the heading turned
    assert s.position == pytest.approx((0.002, 0.0))
    assert s.heading == pytest.approx(0.1)


def _rect(x, y, heading=0.0):
    return OrientedRect(CartVec(x, y), heading, 0.025, 0.01)


def test_resolve_collisions_untouched_pair():
    rects = [_rect(0.0, 0.0), _rect(0.2, 0.0)]
    centers = resolve_collisions(rects)
    assert centers[0] == (0.0, 0.0)
    assert centers[1] == (0.2, 0.0)


def test_resolve_collisions_splits_overlap():
    # axis-aligned, overlapping 0.004 m along x
    rects = [_rect(0.0, 0.0), _rect(0.046, 0.0)]
    centers = resolve_collisions(rects)
    assert centers[0].x == pytest.approx(-0.002, abs=1e-12)
    assert centers[1].x == pytest.approx(0.048, abs=1e-12)
    assert centers[0].y == centers[1].y == 0.0


def test_resolve_collisions_stuck_robot_is_immovable():
    rects = [_rect(0.0, 0.0), _rect(0.046, 0.0)]
    centers = resolve_collisions(rects, immovable=[False, True])
    assert centers[0].x == pytest.approx(-0.004, abs=1e-12)
    assert centers[1] == (0.046, 0.0)


def test_resolve_collisions_separates_random_clusters():
    rng = random.Random(21)
    for _ in range(20):
        rects = [
            _rect(rng.uniform(-0.04, 0.04), rng.uniform(-0.04, 0.04),
                  rng.uniform(-math.pi, math.pi))
            for _ in range(6)
        ]
        centers = resolve_collisions(rects, max_sweeps=64)
        moved = [
            OrientedRect(c, r.heading, r.half_length, r.half_width)
            for c, r in zip(centers, rects)
        ]
        for i in range(len(moved)):
            for j in range(i + 1, len(moved)):
                mtv = rect_overlap_mtv(moved[i], moved[j])
                depth = 0.0 if mtv is None else math.hypot(mtv.x, mtv.y)
                assert depth <= 1e-9
