"""Reachable-set boundaries, containment races, and blocking regions.

The set of points a vehicle can reach by one full-rate arc followed by a
straight run admits a closed-form boundary parameterized by the switch
time.  This module samples those boundaries into polygons and answers
set questions with them: when does the pursuer's left / right / full
reachable region first swallow the evader's, and what part of the plane
does a pair of arc-plus-tangent curves parallel to the line of sight
seal off.  All region work is desk-scale computational geometry on
sampled simple polygons.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import shapely
from shapely.geometry import LineString, Point, Polygon
from shapely.ops import unary_union

from .dubins import (
    CCW,
    CW,
    EVADER,
    PURSUER,
    TAU,
    GameConfig,
    Pose,
    VehicleParams,
    step_exact,
    turning_circles,
)

LEFT = "left"
RIGHT = "right"
FULL = "full"
BLOCKING = "blocking"

#: Boundary samples per side used by the polygon constructions.
DEFAULT_SAMPLES = 256

#: Absolute tolerance (time units) of the containment-time bisection.
BISECTION_TOL = 1e-3


class HorizonTooShort(ValueError):
    """Horizon below one full turn period: boundary has a different shape."""


class DegenerateDirection(ValueError):
    """Pursuer and evader coincide: no line of sight to build from."""


class HypothesisViolated(UserWarning):
    """Separation below the containment lemma's hypothesis; results advisory."""


@dataclass(frozen=True)
class BoundaryCurve:
    """Sampled arc-then-straight frontier of one reachable set side.

    Each sample is the endpoint of: turn at full rate for switch time t1,
    then go straight at top speed for the remaining horizon.
    """

    owner: str
    side: str
    horizon: float
    switch_times: np.ndarray
    points: np.ndarray  # shape (n, 2)


@dataclass(frozen=True)
class RegionPolygon:
    """Closed polygon realization of one reachable or blocking region."""

    vertices: np.ndarray  # shape (n, 2)
    kind: str
    horizon: float
    owner: str = PURSUER

    def as_shapely(self) -> Polygon:
        if len(self.vertices) < 3:
            return Polygon()
        return Polygon(self.vertices)


def _boundary(
    pose: Pose, params: VehicleParams, t_bar: float, n_samples: int, sign: float
) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form boundary endpoints for arc direction `sign` (+1 left)."""
    v, w = params.v_max, sign * params.w_max
    turn_period = TAU * params.r / v
    t1 = np.linspace(0.0, turn_period, n_samples)
    theta1 = pose.theta + v * w * t1
    x = pose.x + (np.sin(theta1) - math.sin(pose.theta)) / w
    y = pose.y - (np.cos(theta1) - math.cos(pose.theta)) / w
    run = v * (t_bar - t1)
    return t1, np.column_stack([x + run * np.cos(theta1), y + run * np.sin(theta1)])


def left_boundary(
    pose: Pose, params: VehicleParams, t_bar: float, n_samples: int = DEFAULT_SAMPLES
) -> BoundaryCurve:
    """Boundary of the set reachable by one full-left arc then a straight run.

    Requires the horizon to cover at least one full turn period, the
    regime in which the boundary is this single spiral of endpoints; the
    switch-time grid spans [0, 2*pi*r/v_max].
    """
    if n_samples < 16:
        raise ValueError(f"n_samples must be at least 16, got {n_samples}")
    if t_bar < TAU * params.r / params.v_max - 1e-12:
        raise HorizonTooShort(
            f"horizon {t_bar} is below the full turn period "
            f"{TAU * params.r / params.v_max}"
        )
    t1, pts = _boundary(pose, params, t_bar, n_samples, sign=+1.0)
    return BoundaryCurve(owner=PURSUER, side=LEFT, horizon=t_bar, switch_times=t1, points=pts)


def right_boundary(
    pose: Pose, params: VehicleParams, t_bar: float, n_samples: int = DEFAULT_SAMPLES
) -> BoundaryCurve:
    """Mirror of `left_boundary` for the full-right arc."""
    if n_samples < 16:
        raise ValueError(f"n_samples must be at least 16, got {n_samples}")
    if t_bar < TAU * params.r / params.v_max - 1e-12:
        raise HorizonTooShort(
            f"horizon {t_bar} is below the full turn period "
            f"{TAU * params.r / params.v_max}"
        )
    t1, pts = _boundary(pose, params, t_bar, n_samples, sign=-1.0)
    return BoundaryCurve(owner=PURSUER, side=RIGHT, horizon=t_bar, switch_times=t1, points=pts)


def side_region(
    pose: Pose,
    params: VehicleParams,
    t_bar: float,
    side: str,
    n_samples: int = DEFAULT_SAMPLES,
) -> RegionPolygon:
    """Polygon of one side's reachable region at horizon `t_bar`.

    The boundary spiral runs from the pure-straight endpoint around to
    the full-circle endpoint; both lie on the heading ray, so closing the
    ring with that chord reproduces the region.
    """
    curve = left_boundary(pose, params, t_bar, n_samples) if side == LEFT else right_boundary(
        pose, params, t_bar, n_samples
    )
    return RegionPolygon(vertices=curve.points, kind=f"{side}_set", horizon=t_bar)


def full_region(
    pose: Pose,
    params: VehicleParams,
    t_bar: float,
    n_samples: int = DEFAULT_SAMPLES,
) -> RegionPolygon:
    """Union of the left and right reachable regions."""
    left = Polygon(side_region(pose, params, t_bar, LEFT, n_samples).vertices)
    right = Polygon(side_region(pose, params, t_bar, RIGHT, n_samples).vertices)
    union = unary_union([left, right])
    if union.geom_type != "Polygon":
        union = union.convex_hull
    return RegionPolygon(
        vertices=np.asarray(union.exterior.coords[:-1]), kind="full_set", horizon=t_bar
    )


def kinematic_upper_bound(p0: Pose, e0: Pose, cfg: GameConfig) -> float:
    """Containment-time bound from the turn-free chaser comparison.

    A chaser that can turn in place but waits (2*pi + 2)*r_p / v_p before
    moving is outrun by every arc-then-line path, so the time at which
    its disk swallows the evader's disk bounds every containment time:
    (d0 + v_p * delay) / (v_p - v_e).
    """
    delay = (TAU + 2.0) * cfg.pursuer.r / cfg.pursuer.v_max
    d0 = p0.distance_to(e0)
    return (d0 + cfg.pursuer.v_max * delay) / (cfg.pursuer.v_max - cfg.evader.v_max)


def distance_thresholds(cfg: GameConfig) -> tuple[float, float]:
    """The two separation thresholds that delimit the law's clean regime.

    Returns (evader_regime, pursuer_circle_guard): beyond the first the
    chase provably resolves as one arc plus one line for both vehicles;
    beyond the second the evader can no longer reach the pursuer's own
    turning circles before being cut off.
    """
    r_e, r_p = cfg.evader.r, cfg.pursuer.r
    evader_regime = 2.0 * r_e + TAU * r_e * (cfg.pursuer.v_max / cfg.evader.v_max)
    pursuer_circle_guard = 2.0 * r_p + TAU * r_p * (cfg.evader.v_max / cfg.pursuer.v_max)
    return evader_regime, pursuer_circle_guard


def _evader_boundary_points(e0: Pose, cfg: GameConfig, t: float, n_samples: int) -> np.ndarray:
    left = left_boundary(e0, cfg.evader, t, n_samples)
    right = right_boundary(e0, cfg.evader, t, n_samples)
    return np.vstack([left.points, right.points])


def _covers_all(polygon: Polygon, points: np.ndarray) -> bool:
    return bool(np.all(shapely.covers(polygon, shapely.points(points))))


def _pursuer_polygon(p0: Pose, e0: Pose, cfg: GameConfig, t: float, side: str, n: int) -> Polygon:
    if side == BLOCKING:
        return blocking_set(p0, e0, cfg, t, n).as_shapely()
    if side == FULL:
        return full_region(p0, cfg.pursuer, t, n).as_shapely()
    return Polygon(side_region(p0, cfg.pursuer, t, side, n).vertices)


def _blocking_seal(p0: Pose, e0: Pose, cfg: GameConfig, horizon: float):
    """Territory sealed off behind the two blocking curves.

    The evader cannot cross a blocking trajectory, so anything beyond the
    band between the two curves (built out to a generous horizon) is
    unreachable and must not count as an escape during the blocking
    containment race.  The raw ring can self-touch where the two arcs
    loop over the turning circles; validity repair keeps the union.
    """
    left_c, right_c = blocking_curves(p0, e0, cfg, horizon, 128)
    ring = np.vstack([left_c, right_c[::-1]])
    poly = shapely.make_valid(Polygon(ring))
    return poly


def containment_time(
    p0: Pose,
    e0: Pose,
    cfg: GameConfig,
    side: str = FULL,
    n_samples: int = DEFAULT_SAMPLES,
) -> float | None:
    """First time the chosen pursuer region swallows the evader's reachable set.

    Containment is the sampled surrogate: every boundary sample of the
    evader's reachable set (both sides) lies inside the pursuer region
    polygon.  For the blocking region, samples landing in the sealed
    territory behind the blocking curves are forgiven: the evader cannot
    get there without being intercepted.  The answer is found by
    bisection between the first horizon at which both boundary shapes
    are defined and the kinematic upper bound; None means not contained
    even at the bound.
    """
    _, guard = distance_thresholds(cfg)
    if p0.distance_to(e0) < guard:
        warnings.warn(
            f"separation {p0.distance_to(e0):.3f} below the containment "
            f"hypothesis {guard:.3f}; result is advisory",
            HypothesisViolated,
            stacklevel=2,
        )

    t_lo = max(cfg.pursuer.turn_period, cfg.evader.turn_period) + 1e-9
    t_hi = max(kinematic_upper_bound(p0, e0, cfg), t_lo + 1e-6)

    seal = _blocking_seal(p0, e0, cfg, 2.0 * t_hi) if side == BLOCKING else None

    def contained(t: float) -> bool:
        pts = _evader_boundary_points(e0, cfg, t, n_samples)
        polygon = _pursuer_polygon(p0, e0, cfg, t, side, n_samples)
        ok = shapely.covers(polygon, shapely.points(pts))
        if seal is not None and not ok.all():
            ok |= shapely.covers(seal, shapely.points(pts))
        return bool(ok.all())

    if not contained(t_hi):
        return None
    if contained(t_lo):
        return t_lo
    while t_hi - t_lo > BISECTION_TOL:
        mid = 0.5 * (t_lo + t_hi)
        if contained(mid):
            t_hi = mid
        else:
            t_lo = mid
    return 0.5 * (t_lo + t_hi)


def blocking_set(
    p0: Pose,
    e0: Pose,
    cfg: GameConfig,
    t_bar: float,
    n_samples: int = DEFAULT_SAMPLES,
) -> RegionPolygon:
    """Region the pursuer seals off with two arc-plus-tangent curves.

    Both curves run parallel to the evader-to-pursuer direction: ride the
    matching turning circle to the point where travel aligns with that
    direction, then go straight until the horizon.  They split the
    pursuer's reachable region in two; the blocking set is the part
    containing the evader's position.
    """
    dx, dy = p0.x - e0.x, p0.y - e0.y
    d = math.hypot(dx, dy)
    if d < 1e-9:
        raise DegenerateDirection("pursuer and evader coincide")
    if t_bar < cfg.pursuer.turn_period - 1e-12:
        raise HorizonTooShort(
            f"horizon {t_bar} is below the pursuer turn period {cfg.pursuer.turn_period}"
        )
    ux, uy = dx / d, dy / d

    region = full_region(p0, cfg.pursuer, t_bar, n_samples).as_shapely()
    cut_width = 1e-6
    curves = []
    for curve in blocking_curves(p0, e0, cfg, t_bar, n_samples // 2):
        curves.append(LineString(curve).buffer(cut_width))
    pieces = region.difference(unary_union(curves))
    target = Point(e0.x, e0.y)
    best = None
    if pieces.geom_type == "Polygon":
        pieces = [pieces]
    else:
        pieces = list(pieces.geoms)
    for piece in pieces:
        if piece.covers(target) or piece.distance(target) < 10 * cut_width:
            if best is None or piece.area > best.area:
                best = piece
    if best is None:
        # evader outside the pursuer's reachable region at this horizon:
        # the blocking construction degenerates to the empty region
        return RegionPolygon(
            vertices=np.empty((0, 2)), kind="blocking_set", horizon=t_bar
        )
    best = best.buffer(cut_width).intersection(region)
    if best.geom_type != "Polygon":
        best = max(best.geoms, key=lambda g: g.area)
    return RegionPolygon(
        vertices=np.asarray(best.exterior.coords[:-1]), kind="blocking_set", horizon=t_bar
    )


def blocking_curves(
    p0: Pose, e0: Pose, cfg: GameConfig, t_bar: float, n_samples: int = 128
) -> list[np.ndarray]:
    """The two arc-then-straight curves bounding the blocking set.

    Each is a genuine vehicle trajectory: full-rate arc from the current
    pose to the point where the circle's travel direction matches the
    evader-to-pursuer direction, then a straight run to the horizon.
    """
    dx, dy = p0.x - e0.x, p0.y - e0.y
    d = math.hypot(dx, dy)
    if d < 1e-9:
        raise DegenerateDirection("pursuer and evader coincide")
    ux, uy = dx / d, dy / d
    heading = math.atan2(uy, ux)

    v, w_m = cfg.pursuer.v_max, cfg.pursuer.w_max
    curves = []
    for sign in (+1.0, -1.0):
        # arc until the pose heading (= travel direction) reaches u
        dtheta = (sign * (heading - p0.theta)) % TAU
        t1 = dtheta / (v * w_m)
        ts = np.linspace(0.0, t1, max(8, n_samples // 2))
        arc = [step_exact(p0, v, sign * w_m, float(t)) for t in ts]
        pts = [(q.x, q.y) for q in arc]
        run = v * (t_bar - t1)
        if run > 0.0:
            end = arc[-1]
            steps = np.linspace(0.0, run, max(8, n_samples // 2))[1:]
            pts.extend((end.x + s * ux, end.y + s * uy) for s in steps)
        curves.append(np.asarray(pts))
    return curves


@dataclass(frozen=True)
class ActiveSetReport:
    """Containment race between the three candidate capturing regions."""

    winner: str
    T_a: float
    times: dict = field(default_factory=dict)
    reliable: bool = True


def active_set_analysis(
    p0: Pose, e0: Pose, cfg: GameConfig, n_samples: int = DEFAULT_SAMPLES
) -> ActiveSetReport:
    """Race the left, right, and blocking regions to contain the evader's set.

    The winner is the region with the smallest containment time and its
    time is the forecast capture time.  Blocking-versus-side ties within
    the bisection tolerance are decided by the evader's half-plane: a
    behind evader shares its deciding frontier with one of the side
    regions, so the side label is the informative one, while for a front
    evader the blocking region is the one doing the work.
    """
    evader_regime, _ = distance_thresholds(cfg)
    reliable = p0.distance_to(e0) >= evader_regime
    if not reliable:
        warnings.warn(
            f"separation {p0.distance_to(e0):.3f} below the clean-regime "
            f"threshold {evader_regime:.3f}; active-set race is advisory",
            HypothesisViolated,
            stacklevel=2,
        )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", HypothesisViolated)
        times = {
            LEFT: containment_time(p0, e0, cfg, LEFT, n_samples),
            RIGHT: containment_time(p0, e0, cfg, RIGHT, n_samples),
            BLOCKING: containment_time(p0, e0, cfg, BLOCKING, n_samples),
        }
    finite = {k: v for k, v in times.items() if v is not None}
    if not finite:
        raise RuntimeError("no candidate region contains the evader set by the bound")
    t_min = min(finite.values())
    side_best = min(
        (v for k, v in finite.items() if k in (LEFT, RIGHT)), default=math.inf
    )
    behind = (
        (e0.x - p0.x) * math.cos(p0.theta) + (e0.y - p0.y) * math.sin(p0.theta)
    ) <= 0.0
    prefer_side = behind and side_best <= t_min + 2.0 * BISECTION_TOL
    blocking_ties = finite.get(BLOCKING, math.inf) <= t_min + 2.0 * BISECTION_TOL
    if prefer_side:
        winner = LEFT if finite.get(LEFT, math.inf) <= finite.get(RIGHT, math.inf) else RIGHT
    elif not behind and blocking_ties:
        winner = BLOCKING
    else:
        winner = min(finite, key=lambda k: finite[k])
    return ActiveSetReport(winner=winner, T_a=finite[winner], times=times, reliable=reliable)


def region_to_csv(region: RegionPolygon, path) -> None:
    """Write a region polygon as an x,y point list."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("x,y\n")
        for x, y in region.vertices:
            fh.write(f"{x:.17g},{y:.17g}\n")
