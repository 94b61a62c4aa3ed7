"""Vehicle kinematics: poses, turning circles, and exact motion integration.

Both vehicles follow planar unicycle dynamics with a speed bound and a
curvature bound.  The heading rate is the product of speed and commanded
curvature, so the turning radius depends only on the curvature command.
With piecewise-constant inputs the dynamics integrate in closed form,
which is what `step_exact` does; no ODE stepping is involved anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

TAU = 2.0 * math.pi

CCW = "ccw"
CW = "cw"
PURSUER = "pursuer"
EVADER = "evader"


class PointOffCircle(ValueError):
    """A point handed to `arc_time` is too far from the circle."""


def wrap_angle(a: float) -> float:
    """Normalize an angle to (-pi, pi]."""
    r = math.remainder(a, TAU)
    if r <= -math.pi:
        r += TAU
    return r


@dataclass(frozen=True)
class VehicleParams:
    """Speed and curvature limits of one vehicle.

    The turning radius `r` is always 1/w_max; it is computed, never stored.
    """

    v_max: float
    w_max: float

    def __post_init__(self) -> None:
        if not (self.v_max > 0.0 and math.isfinite(self.v_max)):
            raise ValueError(f"v_max must be positive and finite, got {self.v_max}")
        if not (self.w_max > 0.0 and math.isfinite(self.w_max)):
            raise ValueError(f"w_max must be positive and finite, got {self.w_max}")

    @property
    def r(self) -> float:
        return 1.0 / self.w_max

    @property
    def turn_period(self) -> float:
        """Time to traverse one full turning circle at v_max."""
        return TAU * self.r / self.v_max


@dataclass(frozen=True)
class GameConfig:
    """Parameter pair for one pursuit-evasion game.

    The pursuer must be strictly faster and strictly more agile than the
    evader; otherwise capture cannot be forced and the tangent-aimed law
    is meaningless.
    """

    pursuer: VehicleParams
    evader: VehicleParams

    def __post_init__(self) -> None:
        if not self.pursuer.v_max > self.evader.v_max:
            raise ValueError(
                "pursuer must be faster than evader: "
                f"{self.pursuer.v_max} <= {self.evader.v_max}"
            )
        if not self.pursuer.w_max > self.evader.w_max:
            raise ValueError(
                "pursuer must be more agile than evader: "
                f"{self.pursuer.w_max} <= {self.evader.w_max}"
            )

    def params(self, owner: str) -> VehicleParams:
        return self.pursuer if owner == PURSUER else self.evader


@dataclass(frozen=True)
class Pose:
    """Planar position plus heading (radians, normalized to (-pi, pi])."""

    x: float
    y: float
    theta: float = field(default=0.0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta", wrap_angle(self.theta))

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)

    def distance_to(self, other: "Pose") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class TurningCircle:
    """Minimum-radius circle traced under a saturated turn command.

    `orientation` is CCW for a full-left command (+w_max) and CW for a
    full-right command (-w_max); `owner` records which vehicle it belongs
    to so downstream code can look up the right speed limit.
    """

    center: tuple[float, float]
    radius: float
    orientation: str
    owner: str

    def point_angle(self, point: tuple[float, float]) -> float:
        """Polar angle of `point` as seen from the circle center."""
        return math.atan2(point[1] - self.center[1], point[0] - self.center[0])

    def point_at(self, angle: float) -> tuple[float, float]:
        return (
            self.center[0] + self.radius * math.cos(angle),
            self.center[1] + self.radius * math.sin(angle),
        )

    def radial_distance(self, point: tuple[float, float]) -> float:
        """Distance of `point` from the circle (0 when exactly on it)."""
        d = math.hypot(point[0] - self.center[0], point[1] - self.center[1])
        return abs(d - self.radius)

    def tangent_direction(self, point: tuple[float, float]) -> tuple[float, float]:
        """Unit direction of travel at `point` when riding this circle."""
        phi = self.point_angle(point)
        if self.orientation == CCW:
            return (-math.sin(phi), math.cos(phi))
        return (math.sin(phi), -math.cos(phi))


def turning_circles(
    pose: Pose, params: VehicleParams, owner: str = PURSUER
) -> tuple[TurningCircle, TurningCircle]:
    """Both turning circles through `pose`: (ccw, cw).

    The CCW circle sits to the left of the heading, the CW circle to the
    right, each at center distance r = 1/w_max.
    """
    r = params.r
    s, c = math.sin(pose.theta), math.cos(pose.theta)
    ccw = TurningCircle(
        center=(pose.x - r * s, pose.y + r * c),
        radius=r,
        orientation=CCW,
        owner=owner,
    )
    cw = TurningCircle(
        center=(pose.x + r * s, pose.y - r * c),
        radius=r,
        orientation=CW,
        owner=owner,
    )
    return ccw, cw


def step_exact(pose: Pose, v: float, w: float, dt: float) -> Pose:
    """Advance a pose by `dt` under constant speed `v` and curvature `w`.

    Closed-form integral of the unicycle dynamics: for nonzero curvature
    the pose slides along the circle of radius 1/|w|, sweeping a heading
    change of v*w*dt; for w == 0 it advances on a straight line.
    """
    if dt < 0.0:
        raise ValueError(f"dt must be nonnegative, got {dt}")
    if w == 0.0:
        return Pose(
            pose.x + v * dt * math.cos(pose.theta),
            pose.y + v * dt * math.sin(pose.theta),
            pose.theta,
        )
    theta1 = pose.theta + v * w * dt
    x1 = pose.x + (math.sin(theta1) - math.sin(pose.theta)) / w
    y1 = pose.y - (math.cos(theta1) - math.cos(pose.theta)) / w
    return Pose(x1, y1, theta1)


def arc_time(
    circle: TurningCircle,
    start: tuple[float, float],
    end: tuple[float, float],
    v: float,
    tol: float = 1e-6,
) -> float:
    """Time to ride `circle` from `start` to `end` in its own direction.

    Both points must lie on the circle within `tol`; they are projected
    onto it before the sweep is measured, since tangent points arrive
    from floating-point constructions.  A point measured against itself
    gives 0; the result is always in [0, 2*pi*r/v).
    """
    for label, point in (("start", start), ("end", end)):
        off = circle.radial_distance(point)
        if off > tol:
            raise PointOffCircle(
                f"{label} point {point} is {off:.3e} from circle "
                f"(center {circle.center}, r={circle.radius}), tol={tol}"
            )
    a0 = circle.point_angle(start)
    a1 = circle.point_angle(end)
    if circle.orientation == CCW:
        sweep = (a1 - a0) % TAU
    else:
        sweep = (a0 - a1) % TAU
    # Coincident points can land an epsilon past the start angle and read
    # as a full revolution; snap those back to zero.  The angular slack
    # mirrors the radial projection tolerance.
    if sweep > TAU - max(1e-12, tol / circle.radius):
        sweep = 0.0
    return circle.radius * sweep / v
