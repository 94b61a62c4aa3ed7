"""Time to capture along the valid tangent of one circle pair.

Both vehicles ride their chosen turning circles to the tangent touch
points, then race along the tangent line at top speed.  Whoever exits
first travels on the line while the other finishes its arc; after both
are on the line the gap closes at the speed difference.  The capture
point is where the pursuer finally draws level with the evader.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dubins import EVADER, PURSUER, GameConfig, Pose, arc_time, turning_circles
from .tangents import A, DirectedTangent, PEPair, valid_tangent


class DegenerateEstimate(ValueError):
    """Asked for line-phase data of an estimate that never enters the line phase."""


@dataclass(frozen=True)
class CaptureEstimate:
    """Interception forecast for one circle pair.

    `t_p` / `t_e` are arc times to the tangent touch points, `T` the total
    time to capture and `capture_point` where it happens.  `degenerate`
    marks configurations where the pursuer would overshoot the evader's
    exit point before the evader even reaches it; the pursuer can always
    slow down to avoid that, so T is clamped to the evader's arc time.
    """

    pair: PEPair
    tangent: DirectedTangent
    t_p: float
    t_e: float
    T: float
    capture_point: tuple[float, float]
    degenerate: bool = False
    #: Uncapped race value t_e + d~/(v_p - v_e).  Equals T except in the
    #: degenerate case, where it keeps falling below t_e instead of being
    #: clamped.  The matrix game scores pairs with this so that entries
    #: stay continuous in the state and a forced long arc is never
    #: mistaken for a good evader option.
    game_value: float = math.nan


def pair_circles(pair: PEPair, p: Pose, e: Pose, cfg: GameConfig):
    """Turning circles selected by `pair` at the current poses."""
    p_ccw, p_cw = turning_circles(p, cfg.pursuer, owner=PURSUER)
    e_ccw, e_cw = turning_circles(e, cfg.evader, owner=EVADER)
    cp = p_ccw if pair.pursuer_choice == A else p_cw
    ce = e_ccw if pair.evader_choice == A else e_cw
    return cp, ce


def time_to_capture(
    pair: PEPair, p: Pose, e: Pose, cfg: GameConfig
) -> CaptureEstimate | None:
    """Capture forecast along the pair's valid tangent, or None if it has none.

    With d the tangent length: if the pursuer is still on its arc when the
    evader exits (t_p > t_e) the evader stretches the gap to
    d + v_e*(t_p - t_e) before the line race starts, so
    T = t_p + (d + v_e*(t_p - t_e)) / (v_p - v_e).  Otherwise the pursuer
    eats into the gap first, leaving d~ = d - v_p*(t_e - t_p) at the
    evader's exit and T = t_e + d~ / (v_p - v_e).  A negative d~ means
    the pursuer arrives early and can simply pace itself: T = t_e,
    flagged degenerate.
    """
    cp, ce = pair_circles(pair, p, e, cfg)
    tangent = valid_tangent(pair, cp, ce)
    if tangent is None:
        return None

    v_p, v_e = cfg.pursuer.v_max, cfg.evader.v_max
    t_p = arc_time(cp, p.position, tangent.t_p, v_p)
    t_e = arc_time(ce, e.position, tangent.t_e, v_e)
    d = tangent.length

    degenerate = False
    if t_p > t_e:
        gap = d + v_e * (t_p - t_e)
        T = t_p + gap / (v_p - v_e)
        game_value = T
    else:
        d_rem = d - v_p * (t_e - t_p)
        game_value = t_e + d_rem / (v_p - v_e)
        if d_rem >= 0.0:
            T = game_value
        else:
            T = t_e
            degenerate = True

    run = v_e * (T - t_e)
    capture_point = (
        tangent.t_e[0] + run * tangent.direction[0],
        tangent.t_e[1] + run * tangent.direction[1],
    )
    return CaptureEstimate(
        pair=pair,
        tangent=tangent,
        t_p=t_p,
        t_e=t_e,
        T=T,
        capture_point=capture_point,
        degenerate=degenerate,
        game_value=game_value,
    )


def capture_point_heading(estimate: CaptureEstimate) -> float:
    """Common heading of both vehicles at capture: the tangent direction."""
    if estimate.degenerate:
        raise DegenerateEstimate(
            "degenerate estimate: capture happens at the evader's arc exit, "
            "not on the tangent line"
        )
    return estimate.tangent.heading
