"""The tangent-aimed feedback law: a 2x2 matrix game over turn directions.

At every instant each vehicle has two circle choices (full left or full
right), giving four circle pairs, each with a capture-time forecast along
its valid tangent.  Those four times form a matrix game: the pursuer
picks the row minimizing the worst-case column, the evader the column
maximizing the worst-case row.  Replaying that choice at every instant
yields the closed-loop law; a vehicle already sitting on its chosen
tangent (arc time below a small threshold) stops turning and goes
straight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .capture import CaptureEstimate, time_to_capture
from .dubins import GameConfig, Pose
from .tangents import A, C, PEPair

INF = math.inf

#: Default arc-time threshold below which a vehicle is treated as already
#: on its tangent: one simulation step at the default dt of 0.01.  A full
#: step (not half) is needed so that a single corrective turn step lands
#: back inside the straight-phase band; with a half-step band every
#: correction overshoots it and the control chatters.
DEFAULT_ARC_EPSILON = 0.01


class AllPairsInfeasible(RuntimeError):
    """No circle pair has a valid tangent (vehicles too entangled for the law)."""


@dataclass(frozen=True)
class GameMatrix:
    """Capture-time forecasts for the four circle pairs at one instant.

    Entry names follow row-then-column: rows are the pursuer's choice
    (a = full left, c = full right), columns the evader's.  A pair with
    no valid tangent contributes +inf.
    """

    t_aa: float
    t_ac: float
    t_ca: float
    t_cc: float

    def entry(self, row: str, col: str) -> float:
        return getattr(self, f"t_{row.lower()}{col.lower()}")

    def as_rows(self) -> list[list[float]]:
        return [[self.t_aa, self.t_ac], [self.t_ca, self.t_cc]]


@dataclass(frozen=True)
class ControlPair:
    """Controls emitted for both vehicles by one evaluation of the law."""

    w_p: float
    v_p: float
    w_e: float
    v_e: float
    chosen_pair: PEPair
    saddle_gap: float
    estimate: CaptureEstimate


def build_estimates(
    p: Pose, e: Pose, cfg: GameConfig
) -> dict[str, CaptureEstimate | None]:
    """Capture estimate (or None) for each of the four circle pairs."""
    estimates: dict[str, CaptureEstimate | None] = {}
    for row in (A, C):
        for col in (A, C):
            pair = PEPair(row, col)
            estimates[pair.key] = time_to_capture(pair, p, e, cfg)
    return estimates


def build_matrix(p: Pose, e: Pose, cfg: GameConfig) -> GameMatrix:
    """The four capture forecasts at the current joint state.

    Entries are the estimates' game values: identical to the capture time
    T except for degenerate pairs, where the uncapped race value is used
    so the entry keeps signalling how bad the forced long arc is instead
    of flattening at the arc time.
    """
    estimates = build_estimates(p, e, cfg)
    entries = {
        key: (est.game_value if est is not None else INF)
        for key, est in estimates.items()
    }
    if all(v == INF for v in entries.values()):
        raise AllPairsInfeasible(
            f"no circle pair has a valid tangent for pursuer {p} vs evader {e}"
        )
    return GameMatrix(
        t_aa=entries["aa"], t_ac=entries["ac"], t_ca=entries["ca"], t_cc=entries["cc"]
    )


def solve_matrix(
    m: GameMatrix,
    row_tiebreak: dict[str, float] | None = None,
    col_tiebreak: dict[str, float] | None = None,
) -> tuple[str, str, float, float]:
    """Security strategies of the 2x2 game: (row, col, minmax, maxmin).

    The row minimizes the worst column, the column maximizes the worst
    row.  Ties fall back on the optional tiebreak scores (lower wins) and
    then on 'A' before 'C'; minmax >= maxmin always holds.
    """
    rows = m.as_rows()
    if all(v == INF for row in rows for v in row):
        raise AllPairsInfeasible("matrix has no finite entry")

    labels = (A, C)
    row_worst = [max(rows[i]) for i in range(2)]
    col_worst = [min(rows[0][j], rows[1][j]) for j in range(2)]

    def tied(a: float, b: float) -> bool:
        if a == b:
            return True
        if math.isinf(a) or math.isinf(b):
            return False
        return abs(a - b) <= 1e-9 * max(1.0, abs(a), abs(b))

    def pick(values: list[float], better, tiebreak: dict[str, float] | None) -> int:
        best = 0
        for i in (1,):
            if tied(values[i], values[best]):
                if tiebreak is not None and tiebreak.get(labels[i], INF) < tiebreak.get(
                    labels[best], INF
                ):
                    best = i
            elif better(values[i], values[best]):
                best = i
        return best

    ri = pick(row_worst, lambda a, b: a < b, row_tiebreak)
    ci = pick(col_worst, lambda a, b: a > b, col_tiebreak)
    return labels[ri], labels[ci], row_worst[ri], col_worst[ci]


def applicability(p: Pose, e: Pose, cfg: GameConfig) -> str:
    """'InRegime' when the separation meets the arc-then-line distance bound.

    The bound 2*r_e + 2*pi*r_e*(v_p/v_e) guarantees the chase resolves as
    one arc plus one straight line for both sides.  Below it the law is
    still usable in practice, so 'BelowThreshold' is advisory only.
    """
    r_e = cfg.evader.r
    threshold = 2.0 * r_e + 2.0 * math.pi * r_e * (cfg.pursuer.v_max / cfg.evader.v_max)
    return "InRegime" if p.distance_to(e) >= threshold else "BelowThreshold"


def feedback(
    p: Pose, e: Pose, cfg: GameConfig, arc_epsilon: float = DEFAULT_ARC_EPSILON
) -> ControlPair:
    """One evaluation of the closed-loop law at the current joint state.

    Solves the matrix game, maps the chosen row/column to saturated turn
    commands (row A -> +w_max, row C -> -w_max, same for columns), and
    replaces a turn by straight motion once the corresponding arc time
    has shrunk to `arc_epsilon` or less.  Speeds are always the maxima.
    """
    estimates = build_estimates(p, e, cfg)
    entries = {
        key: (est.game_value if est is not None else INF)
        for key, est in estimates.items()
    }
    if all(v == INF for v in entries.values()):
        raise AllPairsInfeasible(
            f"no circle pair has a valid tangent for pursuer {p} vs evader {e}"
        )
    m = GameMatrix(
        t_aa=entries["aa"], t_ac=entries["ac"], t_ca=entries["ca"], t_cc=entries["cc"]
    )

    # Tie scores: own arc time of the entry that realizes the row's (column's)
    # worst case.  Keeping the option already in progress (smallest remaining
    # arc) avoids chattering between mirror-symmetric tangents.
    def row_score(row: str) -> float:
        worst = max(m.entry(row, A), m.entry(row, C))
        times = [
            estimates[PEPair(row, col).key].t_p
            for col in (A, C)
            if m.entry(row, col) == worst and estimates[PEPair(row, col).key] is not None
        ]
        return min(times) if times else INF

    def col_score(col: str) -> float:
        worst = min(m.entry(A, col), m.entry(C, col))
        times = [
            estimates[PEPair(row, col).key].t_e
            for row in (A, C)
            if m.entry(row, col) == worst and estimates[PEPair(row, col).key] is not None
        ]
        return min(times) if times else INF

    row, col, minmax, maxmin = solve_matrix(
        m,
        row_tiebreak={A: row_score(A), C: row_score(C)},
        col_tiebreak={A: col_score(A), C: col_score(C)},
    )
    chosen = PEPair(row, col)
    estimate = estimates[chosen.key]
    if estimate is None:
        # The security row/column can intersect at an infeasible pair even
        # though each is justified by a finite entry elsewhere; fall back
        # to the best finite pair for the arc-time gate.
        finite = [est for est in estimates.values() if est is not None]
        estimate = min(finite, key=lambda est: est.T)
        chosen = estimate.pair
        row, col = chosen.pursuer_choice, chosen.evader_choice

    w_p = cfg.pursuer.w_max if row == A else -cfg.pursuer.w_max
    if estimate.t_p <= arc_epsilon:
        w_p = 0.0
    w_e = cfg.evader.w_max if col == A else -cfg.evader.w_max
    if estimate.t_e <= arc_epsilon:
        w_e = 0.0

    return ControlPair(
        w_p=w_p,
        v_p=cfg.pursuer.v_max,
        w_e=w_e,
        v_e=cfg.evader.v_max,
        chosen_pair=chosen,
        saddle_gap=minmax - maxmin,
        estimate=estimate,
    )
