"""Closed-loop rollout of both vehicles under pluggable policies.

A policy maps (t, pursuer pose, evader pose, config) to one vehicle's
(v, w) command.  Both policies observe the same pre-step state, both
vehicles advance with the exact integrator, and capture is declared the
first time the separation drops to the capture radius, with the capture
instant interpolated inside the final step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .dubins import EVADER, PURSUER, GameConfig, Pose, step_exact, wrap_angle
from .law import ControlPair, feedback

Control = tuple[float, float]  # (v, w)


class PolicyFailure(RuntimeError):
    """A policy raised while being queried; `time` records the failing instant."""

    def __init__(self, time: float, side: str, cause: Exception):
        super().__init__(f"{side} policy failed at t={time:.6f}: {cause}")
        self.time = time
        self.side = side
        self.cause = cause


def close_range_guard(cfg: GameConfig) -> float:
    """Separation below which tangent aiming stops being trustworthy.

    Inside 2*r_p + 2*pi*r_p*(v_e/v_p) the evader can reach the pursuer's
    own turning circles before an arc-then-line path cuts it off, so the
    circle-pair forecasts no longer bound the engagement.
    """
    r_p = cfg.pursuer.r
    return 2.0 * r_p + 2.0 * math.pi * r_p * (cfg.evader.v_max / cfg.pursuer.v_max)


def lead_intercept_control(p: Pose, e: Pose, cfg: GameConfig, arc_epsilon: float) -> Control:
    """Bang-bang steering toward the constant-course intercept point.

    Models the evader as holding its current heading at top speed, solves
    the quadratic intercept for a faster pursuer (always solvable since
    v_p > v_e), and turns at full rate until the heading error is within
    one arc_epsilon worth of turn.
    """
    v_p, v_e = cfg.pursuer.v_max, cfg.evader.v_max
    rx, ry = e.x - p.x, e.y - p.y
    hx, hy = v_e * math.cos(e.theta), v_e * math.sin(e.theta)
    a = v_p * v_p - v_e * v_e
    b = -2.0 * (rx * hx + ry * hy)
    c = -(rx * rx + ry * ry)
    tau = (-b + math.sqrt(max(0.0, b * b - 4.0 * a * c))) / (2.0 * a)
    aim_x, aim_y = e.x + hx * tau, e.y + hy * tau
    if math.hypot(aim_x - p.x, aim_y - p.y) < 1e-12:
        return v_p, 0.0
    err = wrap_angle(math.atan2(aim_y - p.y, aim_x - p.x) - p.theta)
    if abs(err) <= v_p * cfg.pursuer.w_max * arc_epsilon:
        return v_p, 0.0
    return v_p, cfg.pursuer.w_max if err > 0.0 else -cfg.pursuer.w_max


class MatrixLaw:
    """Feedback policy that replays the matrix-game solution each step.

    One instance serves one side ('pursuer' or 'evader').  Because both
    sides of a law-vs-law run query the same joint state, the most recent
    evaluation is memoized class-wide; the law is a pure function of the
    state, so a stale entry can only cost a recompute.

    The pursuer side hands over to plain lead-intercept steering once the
    separation drops inside the close-range guard: tangent forecasts
    degenerate there and chasing them lets a swerving evader provoke a
    flyby the pursuer then pays seconds to recover from.  Pass
    ``intercept_guard=0`` for the pure matrix law at every range.
    """

    _memo_key: tuple | None = None
    _memo_val: ControlPair | None = None

    def __init__(
        self,
        side: str,
        arc_epsilon: float = 0.01,
        intercept_guard: float | None = None,
    ):
        if side not in (PURSUER, EVADER):
            raise ValueError(f"side must be 'pursuer' or 'evader', got {side!r}")
        self.side = side
        self.arc_epsilon = arc_epsilon
        self.intercept_guard = intercept_guard
        self.last_choice: ControlPair | None = None

    def __call__(self, t: float, p: Pose, e: Pose, cfg: GameConfig) -> Control:
        if self.side == PURSUER:
            guard = self.intercept_guard
            if guard is None:
                guard = close_range_guard(cfg)
            if p.distance_to(e) < guard:
                self.last_choice = None
                return lead_intercept_control(p, e, cfg, self.arc_epsilon)

        key = (p.x, p.y, p.theta, e.x, e.y, e.theta, id(cfg), self.arc_epsilon)
        if key == MatrixLaw._memo_key and MatrixLaw._memo_val is not None:
            choice = MatrixLaw._memo_val
        else:
            choice = feedback(p, e, cfg, arc_epsilon=self.arc_epsilon)
            MatrixLaw._memo_key = key
            MatrixLaw._memo_val = choice
        self.last_choice = choice
        if self.side == PURSUER:
            return choice.v_p, choice.w_p
        return choice.v_e, choice.w_e


class Scripted:
    """Fixed control schedule: a list of (t_end, v, w) segments.

    The command of the first segment whose end time exceeds t applies;
    past the last segment the final command keeps holding.
    """

    def __init__(self, segments: Sequence[tuple[float, float, float]]):
        if not segments:
            raise ValueError("need at least one segment")
        self.segments = sorted(segments)

    @classmethod
    def constant(cls, v: float, w: float) -> "Scripted":
        return cls([(math.inf, v, w)])

    def __call__(self, t: float, p: Pose, e: Pose, cfg: GameConfig) -> Control:
        for t_end, v, w in self.segments:
            if t < t_end:
                return v, w
        _, v, w = self.segments[-1]
        return v, w


class Perturbed:
    """Wraps another policy and overrides it inside one time window."""

    def __init__(self, base, t_start: float, t_stop: float, v: float, w: float):
        if t_stop <= t_start:
            raise ValueError("empty perturbation window")
        self.base = base
        self.t_start = t_start
        self.t_stop = t_stop
        self.override: Control = (v, w)

    def __call__(self, t: float, p: Pose, e: Pose, cfg: GameConfig) -> Control:
        if self.t_start <= t < self.t_stop:
            return self.override
        return self.base(t, p, e, cfg)


class OracleReplay:
    """Plays back a recorded per-step control sequence at its native dt."""

    def __init__(self, controls: Sequence[Control], dt: float):
        self.controls = list(controls)
        self.dt = dt

    def __call__(self, t: float, p: Pose, e: Pose, cfg: GameConfig) -> Control:
        idx = min(int(t / self.dt + 1e-9), len(self.controls) - 1)
        return self.controls[idx]


@dataclass(frozen=True)
class Sample:
    t: float
    p: Pose
    e: Pose
    w_p: float
    w_e: float
    v_p: float
    v_e: float
    d_pe: float


@dataclass
class Trajectory:
    """Time-stamped joint history of one run."""

    dt: float
    eps_capture: float = 0.05
    samples: list[Sample] = field(default_factory=list)
    capture_time: float | None = None
    capture_point: tuple[float, float] | None = None
    meta: dict = field(default_factory=dict)

    @property
    def duration(self) -> float:
        return self.samples[-1].t if self.samples else 0.0


def _query(policy, t: float, p: Pose, e: Pose, cfg: GameConfig, side: str) -> Control:
    try:
        v, w = policy(t, p, e, cfg)
    except Exception as exc:  # noqa: BLE001 - deliberately wrapping policy errors
        raise PolicyFailure(t, side, exc) from exc
    limits = cfg.params(side)
    if not (-1e-12 <= v <= limits.v_max + 1e-12):
        raise PolicyFailure(t, side, ValueError(f"speed {v} outside [0, {limits.v_max}]"))
    if abs(w) > limits.w_max + 1e-12:
        raise PolicyFailure(t, side, ValueError(f"curvature {w} outside bound {limits.w_max}"))
    return v, w


def run(
    cfg: GameConfig,
    p0: Pose,
    e0: Pose,
    pursuer_policy,
    evader_policy,
    dt: float = 0.01,
    eps_capture: float = 0.05,
    t_max: float = 100.0,
) -> Trajectory:
    """Roll the game forward until capture or t_max.

    Capture is the first recorded sample with separation <= eps_capture;
    the reported capture time interpolates linearly inside that final
    step.  Run metadata records the law's chosen pair per step when a
    policy exposes it, and flags runs whose chosen pair flips more than
    twice (a symptom of symmetric-state chattering).
    """
    if dt <= 0.0 or eps_capture <= 0.0 or t_max <= 0.0:
        raise ValueError("dt, eps_capture and t_max must all be positive")

    traj = Trajectory(dt=dt, eps_capture=eps_capture)
    pairs: list[str] = []
    gaps: list[float] = []
    p, e = p0, e0
    n_steps = int(math.ceil(t_max / dt))

    for k in range(n_steps + 1):
        t = k * dt
        v_p, w_p = _query(pursuer_policy, t, p, e, cfg, PURSUER)
        v_e, w_e = _query(evader_policy, t, p, e, cfg, EVADER)
        d = p.distance_to(e)
        traj.samples.append(Sample(t, p, e, w_p, w_e, v_p, v_e, d))

        choice = getattr(pursuer_policy, "last_choice", None) or getattr(
            evader_policy, "last_choice", None
        )
        if isinstance(choice, ControlPair):
            pairs.append(choice.chosen_pair.key)
            gaps.append(choice.saddle_gap)

        if d <= eps_capture:
            if len(traj.samples) == 1:
                traj.capture_time = 0.0
                traj.capture_point = (
                    0.5 * (p.x + e.x),
                    0.5 * (p.y + e.y),
                )
            else:
                prev = traj.samples[-2]
                frac = (prev.d_pe - eps_capture) / (prev.d_pe - d)
                traj.capture_time = prev.t + frac * dt
                px = prev.p.x + frac * (p.x - prev.p.x)
                py = prev.p.y + frac * (p.y - prev.p.y)
                ex = prev.e.x + frac * (e.x - prev.e.x)
                ey = prev.e.y + frac * (e.y - prev.e.y)
                traj.capture_point = (0.5 * (px + ex), 0.5 * (py + ey))
            break

        if t >= t_max:
            break
        p = step_exact(p, v_p, w_p, dt)
        e = step_exact(e, v_e, w_e, dt)

    flips = sum(1 for a, b in zip(pairs, pairs[1:]) if a != b)
    traj.meta = {
        "chosen_pairs": pairs,
        "saddle_gaps": gaps,
        "pair_flips": flips,
        "pair_flip_flagged": flips > 2,
    }
    return traj


# --- trajectory structure analysis -------------------------------------------

#: Runs of foreign control shorter than this many steps are treated as
#: discretization transients when classifying arc-then-line structure.
TRANSIENT_STEPS = 2


def _control_runs(ws: Sequence[float]) -> list[tuple[int, int]]:
    """Run-length encode the sign of a control stream: [(sign, length)]."""
    runs: list[tuple[int, int]] = []
    for w in ws:
        s = 0 if w == 0.0 else (1 if w > 0.0 else -1)
        if runs and runs[-1][0] == s:
            runs[-1] = (s, runs[-1][1] + 1)
        else:
            runs.append((s, 1))
    return runs


def _absorb_transients(runs: list[tuple[int, int]], budget: int) -> list[tuple[int, int]] | None:
    """Merge runs of <= TRANSIENT_STEPS into their surroundings.

    A short run is absorbed when it sits between two runs of equal sign,
    or at either end of the sequence.  Gives up (returns None) once more
    than `budget` samples have been reassigned, so a genuinely chattering
    stream is not smoothed into a clean one.
    """
    spent = 0
    runs = list(runs)
    changed = True
    while changed:
        changed = False
        for i, (s, n) in enumerate(runs):
            if len(runs) == 1 or n > TRANSIENT_STEPS:
                continue
            prev_s = runs[i - 1][0] if i > 0 else None
            next_s = runs[i + 1][0] if i + 1 < len(runs) else None
            if prev_s is not None and next_s is not None and prev_s != next_s:
                continue
            spent += n
            if spent > budget:
                return None
            target = prev_s if prev_s is not None else next_s
            runs[i] = (target, n)
            merged: list[tuple[int, int]] = []
            for sign, length in runs:
                if merged and merged[-1][0] == sign:
                    merged[-1] = (sign, merged[-1][1] + length)
                else:
                    merged.append((sign, length))
            runs = merged
            changed = True
            break
    return runs


@dataclass(frozen=True)
class CSReport:
    is_cs: bool
    switch_time: float | None = None
    circle_choice: str | None = None


def classify_cs_structure(traj: Trajectory, vehicle: str) -> CSReport:
    """Decide whether one vehicle's run is a single arc followed by a line.

    The applied control stream must reduce (after absorbing transients of
    at most TRANSIENT_STEPS steps) to one maximal saturated-turn run and
    then one zero run, either of which may be empty.  Reports the time the
    straight phase begins and which circle the arc used ('A' for the
    full-left circle, 'C' for full-right).

    The trailing capture zone (separation within a few capture radii) is
    ignored: the last few steps of a run are an endgame scramble at a
    scale where the circle geometry has degenerated.
    """
    samples = traj.samples[:-1] if len(traj.samples) > 1 else traj.samples
    terminal = 3.0 * traj.eps_capture
    while len(samples) > 1 and samples[-1].d_pe <= terminal:
        samples = samples[:-1]
    ws = [s.w_p if vehicle == PURSUER else s.w_e for s in samples]
    if not ws:
        return CSReport(is_cs=True, switch_time=0.0)

    runs = _absorb_transients(_control_runs(ws), budget=max(4, len(ws) // 10))
    if runs is None:
        return CSReport(is_cs=False)

    signs = [s for s, _ in runs]
    if signs == [0]:
        return CSReport(is_cs=True, switch_time=0.0)
    if len(signs) == 1:
        return CSReport(is_cs=True, switch_time=None, circle_choice="A" if signs[0] > 0 else "C")
    if len(signs) == 2 and signs[0] != 0 and signs[1] == 0:
        switch_index = runs[0][1]
        return CSReport(
            is_cs=True,
            switch_time=samples[min(switch_index, len(samples) - 1)].t,
            circle_choice="A" if signs[0] > 0 else "C",
        )
    return CSReport(is_cs=False)


@dataclass(frozen=True)
class LineReport:
    """Comparison of the two final straight segments of a run."""

    angle_between: float
    lateral_offset: float
    pursuer_heading: float
    evader_heading: float


def _fit_direction(points: list[tuple[float, float]], fallback: float) -> float:
    """Principal direction of a point cloud, oriented along net motion."""
    n = len(points)
    if n < 3:
        return fallback
    mx = sum(p[0] for p in points) / n
    my = sum(p[1] for p in points) / n
    sxx = sum((p[0] - mx) ** 2 for p in points)
    syy = sum((p[1] - my) ** 2 for p in points)
    sxy = sum((p[0] - mx) * (p[1] - my) for p in points)
    angle = 0.5 * math.atan2(2.0 * sxy, sxx - syy)
    dx, dy = math.cos(angle), math.sin(angle)
    net = (points[-1][0] - points[0][0], points[-1][1] - points[0][1])
    if dx * net[0] + dy * net[1] < 0.0:
        angle += math.pi
    return angle


def _longest_straight_window(traj: Trajectory, vehicle: str) -> list[tuple[float, float]]:
    """Positions over the vehicle's longest zero-curvature run (latest on ties)."""
    samples = traj.samples
    best: tuple[int, int] | None = None
    start = None
    applied = len(samples) - 1 if len(samples) > 1 else len(samples)
    for i in range(applied + 1):
        w = None
        if i < applied:
            w = samples[i].w_p if vehicle == PURSUER else samples[i].w_e
        if w == 0.0:
            if start is None:
                start = i
        elif start is not None:
            if best is None or i - start >= best[1] - best[0]:
                best = (start, i)
            start = None
    if best is None:
        raise ValueError(f"{vehicle} run has no straight segment")
    lo, hi = best
    hi = min(hi + 1, len(samples))  # include the pose the last command produced
    pts = []
    for s in samples[lo:hi]:
        pose = s.p if vehicle == PURSUER else s.e
        pts.append((pose.x, pose.y))
    return pts


def final_line_report(traj: Trajectory) -> LineReport:
    """Compare the straight lines both vehicles ride at the end of a run.

    Each vehicle's dominant straight segment (its longest zero-curvature
    run, which is the line phase of a clean arc-then-line trajectory) is
    fitted through its positions.  The angle is between the two fitted
    directions; the lateral offset is the gap between the two fitted
    lines, measured where the evader's segment ends, so two vehicles
    riding the same tangent report an offset near zero regardless of the
    capture-radius gap along the line.
    """
    windows = {v: _longest_straight_window(traj, v) for v in (PURSUER, EVADER)}
    last = traj.samples[-1]
    fits = {
        PURSUER: _fit_direction(windows[PURSUER], fallback=last.p.theta),
        EVADER: _fit_direction(windows[EVADER], fallback=last.e.theta),
    }

    dp = (math.cos(fits[PURSUER]), math.sin(fits[PURSUER]))
    de = (math.cos(fits[EVADER]), math.sin(fits[EVADER]))
    cross = dp[0] * de[1] - dp[1] * de[0]
    dot = dp[0] * de[0] + dp[1] * de[1]
    angle = abs(math.atan2(cross, dot))

    we = windows[EVADER]
    n = len(we)
    cx, cy = sum(q[0] for q in we) / n, sum(q[1] for q in we) / n
    along = (we[-1][0] - cx) * de[0] + (we[-1][1] - cy) * de[1]
    e_on_line = (cx + along * de[0], cy + along * de[1])
    p_anchor = windows[PURSUER][-1]
    lateral = abs(
        (e_on_line[0] - p_anchor[0]) * dp[1] - (e_on_line[1] - p_anchor[1]) * dp[0]
    )
    return LineReport(
        angle_between=angle,
        lateral_offset=lateral,
        pursuer_heading=last.p.theta,
        evader_heading=last.e.theta,
    )
