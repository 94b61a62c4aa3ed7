"""Independent validators for the feedback law.

Nothing here reuses the tangent/matrix machinery it checks.  The
exhaustive oracle enumerates every bang/coast control sequence of a
short discrete game; the arc-then-line oracle searches switch times on a
grid and scores strategy pairs by direct simulation of the two paths;
the tangent verifier re-measures a tangent's defining residuals from
plain vector arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dubins import TAU, GameConfig, Pose, TurningCircle
from .reachsets import kinematic_upper_bound
from .tangents import DirectedTangent

MAX_HORIZON_STEPS = 9


class BudgetExceeded(ValueError):
    """Discrete game too large to enumerate exhaustively."""


@dataclass(frozen=True)
class DiscreteGameSpec:
    """Setup of the exhaustive discrete game.

    Each player picks one turn command per step from {-w_max, 0, +w_max};
    with `horizon_steps` = H there are 3^H sequences per player, so H is
    capped at MAX_HORIZON_STEPS.  A pair of sequences scores the first
    step time at which the separation is within `eps_capture`, or the
    no-capture payoff (ten times the horizon) if that never happens.
    """

    horizon_steps: int
    dt: float
    eps_capture: float

    def __post_init__(self) -> None:
        if self.horizon_steps < 1:
            raise ValueError("horizon_steps must be positive")
        if self.horizon_steps > MAX_HORIZON_STEPS:
            raise BudgetExceeded(
                f"horizon of {self.horizon_steps} steps exceeds the "
                f"enumerable cap of {MAX_HORIZON_STEPS}"
            )
        if self.dt <= 0.0 or self.eps_capture <= 0.0:
            raise ValueError("dt and eps_capture must be positive")

    @property
    def no_capture_payoff(self) -> float:
        return 10.0 * self.horizon_steps * self.dt

    @property
    def n_sequences(self) -> int:
        return 3 ** self.horizon_steps


def _advance(states: np.ndarray, v: float, w: float, dt: float) -> np.ndarray:
    """Vectorized exact step for an (n, 3) array of poses."""
    out = np.empty_like(states)
    theta = states[:, 2]
    if w == 0.0:
        out[:, 0] = states[:, 0] + v * dt * np.cos(theta)
        out[:, 1] = states[:, 1] + v * dt * np.sin(theta)
        out[:, 2] = theta
        return out
    theta1 = theta + v * w * dt
    out[:, 0] = states[:, 0] + (np.sin(theta1) - np.sin(theta)) / w
    out[:, 1] = states[:, 1] - (np.cos(theta1) - np.cos(theta)) / w
    out[:, 2] = theta1
    return out


def _all_position_histories(
    pose: Pose, v: float, w_max: float, spec: DiscreteGameSpec
) -> np.ndarray:
    """Positions of every control sequence: shape (3^H, H+1, 2).

    Sequence index is base-3 with the FIRST step as the most significant
    digit and digit order (-w_max, 0, +w_max), so row order equals
    lexicographic sequence order.
    """
    h = spec.horizon_steps
    controls = (-w_max, 0.0, w_max)
    states = np.array([[pose.x, pose.y, pose.theta]])
    hist = [np.repeat(states[:, :2], spec.n_sequences, axis=0)]
    for step in range(h):
        states = np.concatenate(
            [_advance(states, v, w, spec.dt) for w in controls], axis=0
        )
        # After expanding step k the row index is (digits of steps 0..k in
        # base 3, most recent digit most significant); reorder so that the
        # FIRST step stays most significant.
        n = states.shape[0]
        idx = np.arange(n).reshape(3, n // 3).T.reshape(-1)
        states = states[idx]
        reps = spec.n_sequences // n
        hist.append(np.repeat(states[:, :2], reps, axis=0))
    return np.stack(hist, axis=1)


def sequence_controls(index: int, w_max: float, horizon_steps: int) -> list[float]:
    """Decode a sequence row index into its per-step turn commands."""
    digits = []
    for _ in range(horizon_steps):
        digits.append(index % 3)
        index //= 3
    controls = (-w_max, 0.0, w_max)
    return [controls[d] for d in reversed(digits)]


def brute_force_minmax(
    p0: Pose, e0: Pose, cfg: GameConfig, spec: DiscreteGameSpec
) -> tuple[float, list[float], list[float]]:
    """Exhaustive open-loop min-max of the discrete game.

    The pursuer commits to a full sequence first and the evader answers
    with the worst reply, so the value is min over pursuer sequences of
    max over evader sequences of the first-capture time.  Both players
    move at top speed; ties break toward lexicographically smallest
    sequences.  Suitable only for short-horizon sanity checks.
    """
    p_hist = _all_position_histories(p0, cfg.pursuer.v_max, cfg.pursuer.w_max, spec)
    e_hist = _all_position_histories(e0, cfg.evader.v_max, cfg.evader.w_max, spec)
    n = spec.n_sequences
    steps = spec.horizon_steps + 1
    times = np.arange(steps) * spec.dt

    best_value = math.inf
    best_p = -1
    best_e = -1
    chunk = max(1, min(256, (2 ** 24) // (n * steps)))
    for start in range(0, n, chunk):
        block = p_hist[start : start + chunk]  # (c, steps, 2)
        diff = block[:, None, :, :] - e_hist[None, :, :, :]
        caught = (diff[..., 0] ** 2 + diff[..., 1] ** 2) <= spec.eps_capture**2
        any_caught = caught.any(axis=2)
        first = np.where(any_caught, times[np.argmax(caught, axis=2)], spec.no_capture_payoff)
        worst_e = first.max(axis=1)
        i = int(np.argmin(worst_e))
        if worst_e[i] < best_value - 1e-15:
            best_value = float(worst_e[i])
            best_p = start + i
            row = first[i]
            best_e = int(np.argmax(row == worst_e[i]))
    w_p, w_e = cfg.pursuer.w_max, cfg.evader.w_max
    return (
        best_value,
        sequence_controls(best_p, w_p, spec.horizon_steps),
        sequence_controls(best_e, w_e, spec.horizon_steps),
    )


# --- arc-then-line restricted game -------------------------------------------


@dataclass(frozen=True)
class CSStrategy:
    """One arc-then-line open-loop strategy: circle choice plus switch time."""

    circle: str  # 'A' (full left) or 'C' (full right)
    switch_time: float

    @property
    def turn_sign(self) -> float:
        return 1.0 if self.circle == "A" else -1.0


@dataclass(frozen=True)
class _CommittedPath:
    """Geometry of a committed arc-then-line path."""

    center: tuple[float, float]
    radius: float
    a_start: float  # polar angle of the start position on the circle
    omega: float  # signed angular rate v * w
    arc_time: float
    exit: tuple[float, float]
    heading: tuple[float, float]
    speed: float

    def point_at(self, t: float) -> tuple[float, float]:
        if t <= self.arc_time:
            ang = self.a_start + self.omega * t
            return (
                self.center[0] + self.radius * math.cos(ang),
                self.center[1] + self.radius * math.sin(ang),
            )
        run = self.speed * (t - self.arc_time)
        return (self.exit[0] + run * self.heading[0], self.exit[1] + run * self.heading[1])


def _committed_path(pose: Pose, params, strategy: CSStrategy) -> _CommittedPath:
    v = params.v_max
    w = strategy.turn_sign * params.w_max
    t1 = strategy.switch_time
    cx = pose.x - math.sin(pose.theta) / w
    cy = pose.y + math.cos(pose.theta) / w
    theta1 = pose.theta + v * w * t1
    return _CommittedPath(
        center=(cx, cy),
        radius=params.r,
        a_start=math.atan2(pose.y - cy, pose.x - cx),
        omega=v * w,
        arc_time=t1,
        exit=(
            pose.x + (math.sin(theta1) - math.sin(pose.theta)) / w,
            pose.y - (math.cos(theta1) - math.cos(pose.theta)) / w,
        ),
        heading=(math.cos(theta1), math.sin(theta1)),
        speed=v,
    )


@dataclass(frozen=True)
class _ArrivalPlan:
    """Fastest arc-then-line arrival at one target point."""

    time: float
    strategy: CSStrategy


def _fastest_arrival(pose: Pose, params, target: tuple[float, float]) -> _ArrivalPlan:
    """Minimum-time arc-then-line path from `pose` to the target point.

    For each turning circle, ride it to the touch point whose forward
    tangent passes through the target, then run the ray; the touch point
    comes from the point-to-circle tangent construction.  Targets inside
    both circles are unreachable by this path class (infinite time).
    """
    v, w_m, r = params.v_max, params.w_max, params.r
    best = _ArrivalPlan(math.inf, CSStrategy("A", 0.0))
    for circle, sign in (("A", 1.0), ("C", -1.0)):
        cx = pose.x - sign * math.sin(pose.theta) * r
        cy = pose.y + sign * math.cos(pose.theta) * r
        gx, gy = target[0] - cx, target[1] - cy
        g = math.hypot(gx, gy)
        if g < r - 1e-12:
            continue
        g = max(g, r)
        # touch point: rotate the target bearing by the tangent half-angle,
        # to the side matching the travel sense of this circle
        beta = math.acos(min(1.0, r / g))
        phi = math.atan2(gy, gx) - sign * beta
        tx, ty = cx + r * math.cos(phi), cy + r * math.sin(phi)
        a0 = math.atan2(pose.y - cy, pose.x - cx)
        sweep = (sign * (phi - a0)) % TAU
        arc_time = sweep * r / v
        run = math.hypot(target[0] - tx, target[1] - ty)
        total = arc_time + run / v
        if total < best.time:
            best = _ArrivalPlan(total, CSStrategy(circle, arc_time))
    return best


def _earliest_interception(
    p0: Pose, cfg: GameConfig, e_path: _CommittedPath, horizon: float
) -> tuple[float, CSStrategy | None]:
    """Earliest time the pursuer can sit on the committed path when the evader is there.

    The pursuer may pace itself, so a point of the evader's path is
    captured as soon as the fastest arc-then-line arrival beats the
    evader's own schedule there.  The slack (evader time minus pursuer
    arrival) is scanned over the evader's timeline and its first zero is
    bisected; the scan grid is fine enough that the slack, whose slope is
    bounded by 1 + v_p/v_e, cannot cross zero and back inside one cell.
    """
    params = cfg.pursuer

    def slack(t: float) -> tuple[float, _ArrivalPlan]:
        plan = _fastest_arrival(p0, params, e_path.point_at(t))
        return t - plan.time, plan

    n = max(64, int(horizon / 0.25))
    ts = np.linspace(0.0, horizon, n)
    prev_t, (prev_s, prev_plan) = ts[0], slack(ts[0])
    if prev_s >= 0.0:
        return float(ts[0]), prev_plan.strategy
    for t in ts[1:]:
        s, plan = slack(float(t))
        if s >= 0.0:
            lo, hi = prev_t, float(t)
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if slack(mid)[0] >= 0.0:
                    hi = mid
                else:
                    lo = mid
            return hi, slack(hi)[1].strategy
        prev_t, prev_s = float(t), s
    return math.inf, None


def first_interception_time(
    p0: Pose,
    e0: Pose,
    cfg: GameConfig,
    e_strategy: CSStrategy,
    horizon: float,
) -> tuple[float, CSStrategy | None]:
    """Best arc-then-line response time against one committed evader path."""
    e_path = _committed_path(e0, cfg.evader, e_strategy)
    return _earliest_interception(p0, cfg, e_path, horizon)


def cs_minmax(
    p0: Pose,
    e0: Pose,
    cfg: GameConfig,
    grid: int = 32,
) -> tuple[float, CSStrategy, CSStrategy]:
    """Value of the game restricted to arc-then-line strategies.

    The evader commits to a circle choice and a switch time from a
    uniform grid over its full turn period, runs the tangent forever, and
    the pursuer answers with its fastest arc-then-line interception (the
    pursuer may pace itself, so interception is an arrive-no-later race
    along the evader's committed path).  The value is the max over the
    evader grid of the response times, with the winning switch time
    refined by local grid subdivision.  The committing-player order is
    forced: an evader answering a committed open-loop pursuer path always
    slips it, which would make every value the no-capture payoff.
    """
    if grid < 32:
        raise ValueError(f"grid must be at least 32, got {grid}")
    horizon = 4.0 * kinematic_upper_bound(p0, e0, cfg)
    payoff = 10.0 * horizon

    def response(e_strategy: CSStrategy) -> tuple[float, CSStrategy | None]:
        val, resp = first_interception_time(p0, e0, cfg, e_strategy, horizon)
        return (min(val, payoff), resp)

    e_period = TAU * cfg.evader.r / cfg.evader.v_max
    e_strats = [
        CSStrategy(circle, float(t1))
        for circle in ("A", "C")
        for t1 in np.linspace(0.0, e_period, grid)
    ]
    scored = [(response(s), s) for s in e_strats]
    (best_val, best_p), best_e = max(scored, key=lambda item: item[0][0])

    width = e_period / (grid - 1)
    while width > 1e-3 * e_period:
        lo = max(0.0, best_e.switch_time - width)
        hi = min(e_period, best_e.switch_time + width)
        for t1 in np.linspace(lo, hi, 9):
            cand = CSStrategy(best_e.circle, float(t1))
            val, resp = response(cand)
            if val > best_val:
                best_val, best_p, best_e = val, resp, cand
        width /= 4.0

    if best_p is None:
        best_p = CSStrategy("A", 0.0)
    return best_val, best_p, best_e


# --- tangent verification -----------------------------------------------------


@dataclass(frozen=True)
class TangentResiduals:
    """Numeric re-check of everything that makes a directed tangent valid."""

    radial_p: float
    radial_e: float
    perpendicular_p: float
    perpendicular_e: float
    orientation_ok_p: bool
    orientation_ok_e: bool

    @property
    def max_residual(self) -> float:
        return max(self.radial_p, self.radial_e, self.perpendicular_p, self.perpendicular_e)

    @property
    def all_ok(self) -> bool:
        return self.orientation_ok_p and self.orientation_ok_e


def verify_tangent(
    t: DirectedTangent, cp: TurningCircle, ce: TurningCircle
) -> TangentResiduals:
    """Re-measure a tangent's radii, perpendicularity, and orientations.

    Uses nothing from the construction: radial residuals compare touch
    point distances against the circle radii, perpendicularity residuals
    are |direction . radial-unit| at each touch point, and orientation
    agreement checks that the travel direction of each circle at its
    touch point points along the tangent.
    """

    def residuals(circle: TurningCircle, touch):
        rx, ry = touch[0] - circle.center[0], touch[1] - circle.center[1]
        rho = math.hypot(rx, ry)
        radial = abs(rho - circle.radius)
        if rho < 1e-15:
            return radial, math.inf, False
        perp = abs((rx * t.direction[0] + ry * t.direction[1]) / rho)
        travel = circle.tangent_direction(touch)
        dot = travel[0] * t.direction[0] + travel[1] * t.direction[1]
        return radial, perp, dot > 0.0

    radial_p, perp_p, ok_p = residuals(cp, t.t_p)
    radial_e, perp_e, ok_e = residuals(ce, t.t_e)
    return TangentResiduals(
        radial_p=radial_p,
        radial_e=radial_e,
        perpendicular_p=perp_p,
        perpendicular_e=perp_e,
        orientation_ok_p=ok_p,
        orientation_ok_e=ok_e,
    )
