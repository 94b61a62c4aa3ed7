"""Pursuit-evasion between two turn-rate-limited vehicles.

A faster, more agile pursuer chases an evader; both steer with bounded
curvature.  The package provides the tangent-aimed matrix-game feedback
law, an exact closed-loop simulator, reachable-set and blocking-set
analysis, and independent brute-force validators.
"""

from .capture import CaptureEstimate, DegenerateEstimate, capture_point_heading, time_to_capture
from .dubins import (
    CCW,
    CW,
    EVADER,
    PURSUER,
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
from .law import (
    AllPairsInfeasible,
    ControlPair,
    GameMatrix,
    applicability,
    build_matrix,
    feedback,
    solve_matrix,
)
from .oracle import (
    BudgetExceeded,
    CSStrategy,
    DiscreteGameSpec,
    TangentResiduals,
    brute_force_minmax,
    cs_minmax,
    verify_tangent,
)
from .reachsets import (
    ActiveSetReport,
    BoundaryCurve,
    DegenerateDirection,
    HorizonTooShort,
    HypothesisViolated,
    RegionPolygon,
    active_set_analysis,
    blocking_set,
    containment_time,
    distance_thresholds,
    full_region,
    kinematic_upper_bound,
    left_boundary,
    right_boundary,
)
from .sim import (
    CSReport,
    LineReport,
    MatrixLaw,
    OracleReplay,
    Perturbed,
    PolicyFailure,
    Sample,
    Scripted,
    Trajectory,
    classify_cs_structure,
    final_line_report,
    run,
)
from .tangents import ALL_PAIRS, DirectedTangent, PEPair, common_tangents, valid_tangent

__version__ = "0.1.0"
