import math
import random

import pytest

from twocars.capture import pair_circles
from twocars.dubins import (
    CCW,
    CW,
    EVADER,
    PURSUER,
    GameConfig,
    Pose,
    TurningCircle,
    VehicleParams,
    turning_circles,
)
from twocars.oracle import verify_tangent
from twocars.tangents import ALL_PAIRS, PEPair, common_tangents, valid_tangent

PI = math.pi
CFG = GameConfig(VehicleParams(2, 2), VehicleParams(1, 1))


def circle(center, r, orientation, owner=PURSUER):
    return TurningCircle(center=center, radius=r, orientation=orientation, owner=owner)


def test_tangent_count_far_apart():
    cp = circle((-0.5, 0.0), 0.5, CCW)
    ce = circle((-1.0, 10.0), 1.0, CCW, EVADER)
    assert len(common_tangents(cp, ce)) == 4


def test_tangent_count_concentric():
    cp = circle((0.0, 0.0), 0.5, CCW)
    ce = circle((0.0, 0.0), 1.0, CW, EVADER)
    assert common_tangents(cp, ce) == []


def test_tangent_count_overlapping():
    # distance 1.3 between centers: outer tangents only (1.3 < r_p + r_e)
    cp = circle((-0.5, 0.0), 0.5, CCW)
    ce = circle((0.8, 0.0), 1.0, CW, EVADER)
    assert len(common_tangents(cp, ce)) == 2


def test_tangency_residuals_for_all_candidates():
    rng = random.Random(3)
    for _ in range(200):
        cp = circle((rng.uniform(-5, 5), rng.uniform(-5, 5)), rng.uniform(0.3, 2), CCW)
        ce = circle((rng.uniform(-5, 5), rng.uniform(-5, 5)), rng.uniform(0.3, 2), CW, EVADER)
        for t in common_tangents(cp, ce):
            assert cp.radial_distance(t.t_p) < 1e-9
            assert ce.radial_distance(t.t_e) < 1e-9
            rpx, rpy = t.t_p[0] - cp.center[0], t.t_p[1] - cp.center[1]
            assert abs(rpx * t.direction[0] + rpy * t.direction[1]) < 1e-9 * cp.radius
            rex, rey = t.t_e[0] - ce.center[0], t.t_e[1] - ce.center[1]
            assert abs(rex * t.direction[0] + rey * t.direction[1]) < 1e-9 * ce.radius


def test_valid_tangent_tail_chase_outer():
    p, e = Pose(0, 0, PI / 2), Pose(0, 10, PI / 2)
    cp, ce = pair_circles(PEPair("A", "A"), p, e, CFG)
    t = valid_tangent(PEPair("A", "A"), cp, ce)
    assert t is not None
    assert t.t_p == pytest.approx((0.0, 0.0), abs=1e-12)
    assert t.t_e == pytest.approx((0.0, 10.0), abs=1e-12)
    assert t.direction == pytest.approx((0.0, 1.0), abs=1e-12)


def test_valid_tangent_tail_chase_crossing():
    p, e = Pose(0, 0, PI / 2), Pose(0, 10, PI / 2)
    cp, ce = pair_circles(PEPair("A", "C"), p, e, CFG)
    t = valid_tangent(PEPair("A", "C"), cp, ce)
    assert t is not None
    report = verify_tangent(t, cp, ce)
    assert report.max_residual < 1e-9
    assert report.all_ok
    # crossing line separates the two centers
    nx, ny = -t.direction[1], t.direction[0]
    side_p = (cp.center[0] - t.t_p[0]) * nx + (cp.center[1] - t.t_p[1]) * ny
    side_e = (ce.center[0] - t.t_e[0]) * nx + (ce.center[1] - t.t_e[1]) * ny
    assert side_p * side_e < 0


def test_valid_tangent_missing_when_circles_too_close():
    p, e = Pose(0, 0, PI / 2), Pose(-0.2, 0, PI / 2)
    cp, ce = pair_circles(PEPair("A", "C"), p, e, CFG)
    assert math.hypot(ce.center[0] - cp.center[0], ce.center[1] - cp.center[1]) < 1.5
    assert valid_tangent(PEPair("A", "C"), cp, ce) is None


def test_valid_tangent_rejects_mismatched_circles():
    p, e = Pose(0, 0, PI / 2), Pose(0, 10, PI / 2)
    cp, ce = pair_circles(PEPair("A", "A"), p, e, CFG)
    with pytest.raises(ValueError):
        valid_tangent(PEPair("C", "A"), cp, ce)


def _random_state(rng):
    p = Pose(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-PI, PI))
    e = Pose(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-PI, PI))
    return p, e


def test_uniqueness_when_all_four_tangents_exist():
    rng = random.Random(4)
    checked = 0
    for _ in range(300):
        p, e = _random_state(rng)
        for pair in ALL_PAIRS:
            cp, ce = pair_circles(pair, p, e, CFG)
            candidates = common_tangents(cp, ce)
            if len(candidates) != 4:
                continue
            hits = [
                t
                for t in candidates
                if verify_tangent(t, cp, ce).all_ok
                and verify_tangent(t, cp, ce).max_residual < 1e-9
            ]
            assert len(hits) == 1
            checked += 1
    assert checked > 400


def reflect_pose(pose: Pose) -> Pose:
    """Mirror across the y axis."""
    return Pose(-pose.x, pose.y, math.pi - pose.theta)


def test_mirror_symmetry_swaps_circle_choices():
    rng = random.Random(5)
    for _ in range(100):
        p, e = _random_state(rng)
        pm, em = reflect_pose(p), reflect_pose(e)
        for pair in ALL_PAIRS:
            mirrored = PEPair(
                "C" if pair.pursuer_choice == "A" else "A",
                "C" if pair.evader_choice == "A" else "A",
            )
            t = valid_tangent(pair, *pair_circles(pair, p, e, CFG))
            tm = valid_tangent(mirrored, *pair_circles(mirrored, pm, em, CFG))
            assert (t is None) == (tm is None)
            if t is None:
                continue
            assert tm.t_p == pytest.approx((-t.t_p[0], t.t_p[1]), abs=1e-9)
            assert tm.t_e == pytest.approx((-t.t_e[0], t.t_e[1]), abs=1e-9)
