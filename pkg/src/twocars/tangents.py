"""Directed common tangents between a pursuer circle and an evader circle.

Each instant the pursuer and the evader own one CCW and one CW turning
circle, giving four circle pairs.  A pair has up to four common tangent
lines; exactly one of them (when it exists) is traversable by both
vehicles without reversing, namely the one whose direction matches the
rotation sense of both circles at the touch points.  That unique tangent
is what the feedback law aims along.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

from .dubins import CCW, CW, EVADER, PURSUER, TurningCircle

A = "A"  # full-left choice: the CCW circle
C = "C"  # full-right choice: the CW circle

# Slack on the center-distance comparisons that decide tangent existence;
# exactly-touching circles are accepted with a zero-clearance tangent.
EXISTENCE_SLACK = 1e-9

ORIENTATION_OF = {A: CCW, C: CW}


@dataclass(frozen=True, order=True)
class PEPair:
    """One pursuer circle choice paired with one evader circle choice."""

    pursuer_choice: str
    evader_choice: str

    def __post_init__(self) -> None:
        if self.pursuer_choice not in (A, C) or self.evader_choice not in (A, C):
            raise ValueError(f"choices must be 'A' or 'C', got {self}")

    @property
    def key(self) -> str:
        return self.pursuer_choice.lower() + self.evader_choice.lower()


ALL_PAIRS = tuple(PEPair(p, e) for p, e in product((A, C), (A, C)))


@dataclass(frozen=True)
class DirectedTangent:
    """A common tangent segment, directed from the pursuer's circle to the evader's.

    `t_p` and `t_e` are the touch points; `direction` is the unit vector
    from `t_p` toward `t_e` (for a zero-length crossing tangent it is the
    line direction consistent with both circle orientations).
    """

    t_p: tuple[float, float]
    t_e: tuple[float, float]
    direction: tuple[float, float]

    @property
    def length(self) -> float:
        return math.hypot(self.t_e[0] - self.t_p[0], self.t_e[1] - self.t_p[1])

    @property
    def heading(self) -> float:
        return math.atan2(self.direction[1], self.direction[0])


def _rot90(v: tuple[float, float]) -> tuple[float, float]:
    return (-v[1], v[0])


def common_tangents(cp: TurningCircle, ce: TurningCircle) -> list[DirectedTangent]:
    """All distinct lines tangent to both circles, directed pursuer -> evader.

    Outer tangents exist when the center distance is at least |r_p - r_e|,
    crossing tangents when it is at least r_p + r_e; a circle strictly
    inside the other yields no tangents at all.  Construction: a common
    tangent line has a unit normal n with n.(center) - offset = s*r on
    each circle for side signs s in {+1,-1}; sweeping the four sign
    combinations enumerates the four lines.
    """
    (x1, y1), r1 = cp.center, cp.radius
    (x2, y2), r2 = ce.center, ce.radius
    dx, dy = x2 - x1, y2 - y1
    d = math.hypot(dx, dy)
    if d < 1e-12:
        return []
    phi = math.atan2(dy, dx)

    tangents: list[DirectedTangent] = []
    for s1, s2 in ((1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)):
        sin_a = (s2 * r2 - s1 * r1) / d
        if abs(sin_a) > 1.0 + EXISTENCE_SLACK / d:
            continue
        sin_a = max(-1.0, min(1.0, sin_a))
        # common line normal: centerline direction swung past a quarter
        # turn by the radius-mismatch angle
        ang = phi + 0.5 * math.pi + math.asin(sin_a)
        nx, ny = math.cos(ang), math.sin(ang)
        t_p = (x1 + s1 * r1 * nx, y1 + s1 * r1 * ny)
        t_e = (x2 + s2 * r2 * nx, y2 + s2 * r2 * ny)
        ex, ey = t_e[0] - t_p[0], t_e[1] - t_p[1]
        elen = math.hypot(ex, ey)
        if elen > 1e-12:
            direction = (ex / elen, ey / elen)
        else:
            # zero-clearance crossing tangent: fall back to the line
            # direction, oriented to run from the pursuer side over
            line = _rot90((nx, ny))
            if line[0] * dx + line[1] * dy < 0.0:
                line = (-line[0], -line[1])
            direction = line
        tangents.append(DirectedTangent(t_p=t_p, t_e=t_e, direction=direction))
    return tangents


def _matches_orientation(
    circle: TurningCircle,
    touch: tuple[float, float],
    direction: tuple[float, float],
    tol: float = 1e-9,
) -> bool:
    """True when `direction` equals the travel direction of `circle` at `touch`."""
    tx, ty = circle.tangent_direction(touch)
    cross = tx * direction[1] - ty * direction[0]
    dot = tx * direction[0] + ty * direction[1]
    return abs(cross) <= tol and dot > 0.0


def valid_tangent(
    pair: PEPair, cp: TurningCircle, ce: TurningCircle
) -> DirectedTangent | None:
    """The unique tangent of the pair that both vehicles can ride, or None.

    A tangent qualifies when its direction agrees with the circle rotation
    at both touch points: at a CCW circle the travel direction is the
    radius vector rotated a quarter turn left, at a CW circle a quarter
    turn right.  At most one of the four candidates passes; None means
    the required tangent does not exist (circles too close for a crossing
    tangent, or one contained in the other).
    """
    if cp.orientation != ORIENTATION_OF[pair.pursuer_choice]:
        raise ValueError(
            f"pursuer circle orientation {cp.orientation} does not match pair {pair}"
        )
    if ce.orientation != ORIENTATION_OF[pair.evader_choice]:
        raise ValueError(
            f"evader circle orientation {ce.orientation} does not match pair {pair}"
        )
    if cp.owner != PURSUER or ce.owner != EVADER:
        raise ValueError(
            f"expected pursuer/evader circles, got owners {cp.owner}/{ce.owner}"
        )
    for tangent in common_tangents(cp, ce):
        if _matches_orientation(cp, tangent.t_p, tangent.direction) and _matches_orientation(
            ce, tangent.t_e, tangent.direction
        ):
            return tangent
    return None
