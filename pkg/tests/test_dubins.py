import math
import random

import pytest

from twocars.dubins import (
    CCW,
    CW,
    GameConfig,
    PointOffCircle,
    Pose,
    TurningCircle,
    VehicleParams,
    arc_time,
    step_exact,
    turning_circles,
    wrap_angle,
)

PI = math.pi


def test_params_validation():
    with pytest.raises(ValueError):
        VehicleParams(0.0, 1.0)
    with pytest.raises(ValueError):
        VehicleParams(1.0, -2.0)
    p = VehicleParams(2.0, 2.0)
    assert p.r * p.w_max == 1.0


def test_game_config_requires_faster_more_agile_pursuer():
    with pytest.raises(ValueError):
        GameConfig(VehicleParams(1.0, 2.0), VehicleParams(1.0, 1.0))
    with pytest.raises(ValueError):
        GameConfig(VehicleParams(2.0, 1.0), VehicleParams(1.0, 1.0))
    GameConfig(VehicleParams(2.0, 2.0), VehicleParams(1.0, 1.0))


def test_heading_normalized_into_half_open_interval():
    assert Pose(0, 0, 3 * PI).theta == pytest.approx(PI)
    assert Pose(0, 0, -PI).theta == pytest.approx(PI)
    assert Pose(0, 0, PI).theta == pytest.approx(PI)
    assert wrap_angle(2 * PI) == pytest.approx(0.0)


def test_turning_circle_centers():
    ccw, cw = turning_circles(Pose(0, 0, PI / 2), VehicleParams(2, 2))
    assert ccw.center == pytest.approx((-0.5, 0.0))
    assert cw.center == pytest.approx((0.5, 0.0))

    ccw, cw = turning_circles(Pose(0, 0, 0), VehicleParams(1, 1))
    assert ccw.center == pytest.approx((0.0, 1.0))
    assert cw.center == pytest.approx((0.0, -1.0))

    ccw, cw = turning_circles(Pose(1, 2, PI), VehicleParams(2, 2))
    assert ccw.center == pytest.approx((1.0, 1.5))
    assert cw.center == pytest.approx((1.0, 2.5))


def test_turning_circles_pass_through_pose():
    rng = random.Random(0)
    for _ in range(50):
        pose = Pose(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-PI, PI))
        params = VehicleParams(rng.uniform(0.5, 3), rng.uniform(0.5, 3))
        for circle in turning_circles(pose, params):
            assert circle.radial_distance(pose.position) < 1e-9
            assert circle.radius == pytest.approx(params.r)


def test_step_exact_examples():
    p = step_exact(Pose(0, 0, 0), v=2, w=0, dt=1)
    assert (p.x, p.y, p.theta) == pytest.approx((2, 0, 0))

    p = step_exact(Pose(0, 0, 0), v=2, w=2, dt=PI / 8)
    assert (p.x, p.y, p.theta) == pytest.approx((0.5, 0.5, PI / 2))

    p = step_exact(Pose(0, 0, 0), v=2, w=-2, dt=PI / 8)
    assert (p.x, p.y, p.theta) == pytest.approx((0.5, -0.5, -PI / 2))


def test_step_composition():
    rng = random.Random(1)
    for _ in range(100):
        pose = Pose(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-PI, PI))
        v = rng.uniform(0, 3)
        w = rng.uniform(-2, 2)
        a, b = rng.uniform(0, 2), rng.uniform(0, 2)
        two = step_exact(step_exact(pose, v, w, a), v, w, b)
        one = step_exact(pose, v, w, a + b)
        assert two.x == pytest.approx(one.x, abs=1e-9)
        assert two.y == pytest.approx(one.y, abs=1e-9)
        assert abs(wrap_angle(two.theta - one.theta)) < 1e-9


def test_full_rate_turn_stays_on_circle():
    params = VehicleParams(2, 2)
    pose = Pose(0.3, -1.2, 0.7)
    ccw, cw = turning_circles(pose, params)
    for w, circle in ((params.w_max, ccw), (-params.w_max, cw)):
        for k in range(1, 40):
            q = step_exact(pose, params.v_max, w, k * 0.05)
            assert circle.radial_distance(q.position) < 1e-9


def test_turn_radius_independent_of_speed():
    params = VehicleParams(2, 2)
    pose = Pose(0, 0, 0)
    ccw, _ = turning_circles(pose, params)
    for v in (0.5, 2.0):
        for k in range(1, 30):
            q = step_exact(pose, v, params.w_max, k * 0.1)
            assert ccw.radial_distance(q.position) < 1e-9


def test_arc_time_quarter_turn():
    circle = TurningCircle(center=(-0.5, 0.0), radius=0.5, orientation=CCW, owner="pursuer")
    t = arc_time(circle, (0.0, 0.0), (-0.5, 0.5), v=2.0)
    assert t == pytest.approx(PI / 8)


def test_arc_time_identity():
    circle = TurningCircle(center=(1.0, 1.0), radius=1.0, orientation=CW, owner="evader")
    assert arc_time(circle, (2.0, 1.0), (2.0, 1.0), v=1.0) == 0.0


def test_arc_time_clockwise_west_to_north():
    # Oracle: clockwise motion sweeps the position angle downward, so the
    # sweep from the west point (angle pi) to the north point (angle pi/2)
    # is pi - pi/2 = pi/2.  Cross-checked by integrating the dynamics: a
    # vehicle at (0,10) heading +y with w=-1 reaches (1,11) at t=pi/2.
    circle = TurningCircle(center=(1.0, 10.0), radius=1.0, orientation=CW, owner="evader")
    t = arc_time(circle, (0.0, 10.0), (1.0, 11.0), v=1.0)
    assert t == pytest.approx(PI / 2)
    pose = Pose(0.0, 10.0, PI / 2)
    q = step_exact(pose, 1.0, -1.0, t)
    assert (q.x, q.y) == pytest.approx((1.0, 11.0))


def test_arc_time_rejects_far_point():
    circle = TurningCircle(center=(0.0, 0.0), radius=1.0, orientation=CCW, owner="pursuer")
    with pytest.raises(PointOffCircle):
        arc_time(circle, (1.5, 0.0), (0.0, 1.0), v=1.0)


def test_arc_time_matches_simulation():
    rng = random.Random(2)
    for _ in range(50):
        params = VehicleParams(rng.uniform(0.5, 3), rng.uniform(0.5, 3))
        pose = Pose(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-PI, PI))
        sign = rng.choice((1.0, -1.0))
        circle = turning_circles(pose, params)[0 if sign > 0 else 1]
        dt = rng.uniform(0.01, 0.9 * params.turn_period)
        q = step_exact(pose, params.v_max, sign * params.w_max, dt)
        t = arc_time(circle, pose.position, q.position, params.v_max)
        assert t == pytest.approx(dt, abs=1e-9)
