"""Command-line entry points: simulate, matrix, tangents, reachsets, verify."""

from __future__ import annotations

import argparse
import math
import random
import sys
import warnings
from pathlib import Path

from .capture import time_to_capture
from .dubins import EVADER, PURSUER, GameConfig, Pose, VehicleParams, turning_circles
from .io import ConfigError, load_scenario, write_metadata, write_trajectory_csv
from .law import applicability, build_matrix, feedback, solve_matrix
from .oracle import (
    BudgetExceeded,
    DiscreteGameSpec,
    brute_force_minmax,
    verify_tangent,
)
from .reachsets import (
    BLOCKING,
    FULL,
    LEFT,
    RIGHT,
    HypothesisViolated,
    RegionPolygon,
    blocking_set,
    containment_time,
    distance_thresholds,
    full_region,
    kinematic_upper_bound,
    left_boundary,
    region_to_csv,
    right_boundary,
    side_region,
)
from .sim import MatrixLaw, Perturbed, PolicyFailure, classify_cs_structure, run
from .tangents import ALL_PAIRS

EXIT_CAPTURE = 0
EXIT_NO_CAPTURE = 1
EXIT_CONFIG = 2
EXIT_POLICY = 3


def cmd_simulate(args) -> int:
    try:
        scenario = load_scenario(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out or scenario.out_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    try:
        traj = run(
            scenario.cfg,
            scenario.p0,
            scenario.e0,
            scenario.build_policy(PURSUER),
            scenario.build_policy(EVADER),
            dt=scenario.dt,
            eps_capture=scenario.eps_capture,
            t_max=scenario.t_max,
        )
    except PolicyFailure as exc:
        print(f"policy failure: {exc}", file=sys.stderr)
        return EXIT_POLICY
    verdict = applicability(scenario.p0, scenario.e0, scenario.cfg)
    write_trajectory_csv(traj, out / "trajectory.csv")
    write_metadata(traj, scenario, verdict, out / "metadata.json")
    if traj.capture_time is not None:
        print(f"capture at t={traj.capture_time:.6f} point={traj.capture_point}")
        print(f"wrote {out / 'trajectory.csv'} and {out / 'metadata.json'}")
        return EXIT_CAPTURE
    print(f"no capture within t_max={scenario.t_max}")
    print(f"wrote {out / 'trajectory.csv'} and {out / 'metadata.json'}")
    return EXIT_NO_CAPTURE


def _fmt(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.3f}"


def cmd_matrix(args) -> int:
    try:
        scenario = load_scenario(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    m = build_matrix(scenario.p0, scenario.e0, scenario.cfg)
    row, col, minmax, maxmin = solve_matrix(m)
    print("capture-time matrix (rows: pursuer turn, cols: evader turn)")
    print("             evader +w      evader -w")
    print(f"pursuer +w   {_fmt(m.t_aa):>10}    {_fmt(m.t_ac):>10}")
    print(f"pursuer -w   {_fmt(m.t_ca):>10}    {_fmt(m.t_cc):>10}")
    print(f"security solution: row {row}, col {col}; minmax={_fmt(minmax)} maxmin={_fmt(maxmin)}")
    choice = feedback(scenario.p0, scenario.e0, scenario.cfg, arc_epsilon=scenario.dt)
    print(
        f"controls at t=0: pursuer (v={choice.v_p:g}, w={choice.w_p:+g}), "
        f"evader (v={choice.v_e:g}, w={choice.w_e:+g}), pair {choice.chosen_pair.key}"
    )
    print(f"applicability: {applicability(scenario.p0, scenario.e0, scenario.cfg)}")
    return 0


def cmd_tangents(args) -> int:
    try:
        scenario = load_scenario(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for pair in ALL_PAIRS:
        est = time_to_capture(pair, scenario.p0, scenario.e0, scenario.cfg)
        if est is None:
            print(f"pair {pair.key}: no valid tangent")
            continue
        t = est.tangent
        print(
            f"pair {pair.key}: touch p=({t.t_p[0]:.4f},{t.t_p[1]:.4f}) "
            f"e=({t.t_e[0]:.4f},{t.t_e[1]:.4f}) len={t.length:.4f} "
            f"arc_p={est.t_p:.4f} arc_e={est.t_e:.4f} T={est.T:.4f}"
            + (" degenerate" if est.degenerate else "")
        )
    return 0


def cmd_reachsets(args) -> int:
    try:
        scenario = load_scenario(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out or scenario.out_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    horizon = args.horizon or kinematic_upper_bound(scenario.p0, scenario.e0, scenario.cfg)
    cfg = scenario.cfg
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", HypothesisViolated)
        regions = {
            "left_set": side_region(scenario.p0, cfg.pursuer, horizon, LEFT),
            "right_set": side_region(scenario.p0, cfg.pursuer, horizon, RIGHT),
            "full_set": full_region(scenario.p0, cfg.pursuer, horizon),
            "blocking_set": blocking_set(scenario.p0, scenario.e0, cfg, horizon),
        }
        for name, region in regions.items():
            region_to_csv(region, out / f"{name}.csv")
        for side, curve_fn in ((LEFT, left_boundary), (RIGHT, right_boundary)):
            curve = curve_fn(scenario.e0, cfg.evader, horizon)
            region_to_csv(
                RegionPolygon(curve.points, f"evader_{side}_boundary", horizon, EVADER),
                out / f"evader_{side}_boundary.csv",
            )
    print(f"wrote region CSVs at horizon {horizon:.3f} to {out}")
    return 0


def _verify_tangent_suite(rng: random.Random, count: int = 1000) -> tuple[int, int]:
    from .capture import pair_circles
    from .tangents import common_tangents, valid_tangent

    failures = 0
    for _ in range(count):
        cfg = GameConfig(
            VehicleParams(rng.uniform(1.5, 4.0), rng.uniform(1.5, 4.0)),
            VehicleParams(rng.uniform(0.5, 1.4), rng.uniform(0.5, 1.4)),
        )
        p = Pose(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-math.pi, math.pi))
        e = Pose(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-math.pi, math.pi))
        for pair in ALL_PAIRS:
            cp, ce = pair_circles(pair, p, e, cfg)
            tangent = valid_tangent(pair, cp, ce)
            candidates = common_tangents(cp, ce)
            if tangent is not None:
                report = verify_tangent(tangent, cp, ce)
                if report.max_residual > 1e-9 or not report.all_ok:
                    failures += 1
            if len(candidates) == 4:
                valid = [
                    t
                    for t in candidates
                    if verify_tangent(t, cp, ce).all_ok
                    and verify_tangent(t, cp, ce).max_residual < 1e-9
                ]
                if len(valid) != 1:
                    failures += 1
    return count, failures


def _verify_oracle_suite(rng: random.Random, horizon_steps: int) -> tuple[int, int]:
    cfg = GameConfig(VehicleParams(2, 2), VehicleParams(1, 1))
    spec = DiscreteGameSpec(horizon_steps=horizon_steps, dt=0.5, eps_capture=0.6)
    checks, failures = 0, 0
    a = brute_force_minmax(Pose(0, 0, math.pi / 2), Pose(0, 1, math.pi / 2), cfg, spec)
    b = brute_force_minmax(Pose(0, 0, math.pi / 2), Pose(0, 1, math.pi / 2), cfg, spec)
    checks += 1
    failures += 0 if a == b else 1
    val, _, _ = brute_force_minmax(
        Pose(0, 0, 0), Pose(0.1, 0, 0), cfg, DiscreteGameSpec(min(horizon_steps, 3), 0.5, 0.25)
    )
    checks += 1
    failures += 0 if val == 0.0 else 1
    return checks, failures


def _verify_reachsets_suite(rng: random.Random) -> tuple[int, int]:
    import numpy as np

    from .dubins import step_exact

    cfg = GameConfig(VehicleParams(2, 2), VehicleParams(1, 1))
    checks, failures = 0, 0

    pose = Pose(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-math.pi, math.pi))
    for curve_fn, sign in ((left_boundary, 1.0), (right_boundary, -1.0)):
        curve = curve_fn(pose, cfg.pursuer, 8.0, 256)
        worst = 0.0
        for t1, pt in zip(curve.switch_times, curve.points):
            q = step_exact(pose, cfg.pursuer.v_max, sign * cfg.pursuer.w_max, float(t1))
            q = step_exact(q, cfg.pursuer.v_max, 0.0, 8.0 - float(t1))
            worst = max(worst, math.hypot(q.x - pt[0], q.y - pt[1]))
        checks += 1
        failures += 0 if worst < 1e-9 else 1

    ev, guard = distance_thresholds(cfg)
    checks += 1
    failures += 0 if abs(ev - (2 + 4 * math.pi)) < 1e-12 else 1
    checks += 1
    failures += 0 if abs(guard - (1 + math.pi / 2)) < 1e-12 else 1

    for _ in range(10):
        d = rng.uniform(8.0, 25.0)
        ang = rng.uniform(0, 2 * math.pi)
        p0 = Pose(0, 0, rng.uniform(-math.pi, math.pi))
        e0 = Pose(d * math.cos(ang), d * math.sin(ang), rng.uniform(-math.pi, math.pi))
        bound = kinematic_upper_bound(p0, e0, cfg)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", HypothesisViolated)
            t_full = containment_time(p0, e0, cfg, FULL)
        checks += 1
        failures += 0 if (t_full is not None and t_full <= bound + 1e-6) else 1
    return checks, failures


def _verify_saddle_suite(rng: random.Random) -> tuple[int, int]:
    cfg = GameConfig(VehicleParams(2, 2), VehicleParams(1, 1))
    cases = [
        (Pose(0, 0, math.pi / 2), Pose(-3, -6, math.pi / 2)),
        (Pose(0, 0, math.pi / 2), Pose(6, 3, math.pi / 2)),
        (Pose(0, 0, math.pi / 2), Pose(0, -6, math.pi / 2)),
        (Pose(0, 0, math.pi / 2), Pose(0, 6, math.pi / 2 + math.pi / 6)),
    ]
    dt, eps = 0.01, 0.05
    tol = 5 * dt * 1.0
    checks, failures = 0, 0
    for p0, e0 in cases:
        base = run(cfg, p0, e0, MatrixLaw(PURSUER), MatrixLaw(EVADER), dt, eps, 60)
        for _ in range(13):
            t0 = rng.uniform(0, 0.9 * base.capture_time)
            dur = rng.uniform(0.1, 1.5)
            ev = Perturbed(MatrixLaw(EVADER), t0, t0 + dur, rng.uniform(0, 1.0), rng.uniform(-1.0, 1.0))
            tr = run(cfg, p0, e0, MatrixLaw(PURSUER), ev, dt, eps, 150)
            checks += 1
            gained = (tr.capture_time or math.inf) - base.capture_time
            failures += 0 if gained <= tol else 1
            pu = Perturbed(MatrixLaw(PURSUER), t0, t0 + dur, rng.uniform(0, 2.0), rng.uniform(-2.0, 2.0))
            tr2 = run(cfg, p0, e0, pu, MatrixLaw(EVADER), dt, eps, 150)
            checks += 1
            saved = base.capture_time - (tr2.capture_time or math.inf)
            failures += 0 if saved <= tol else 1
    return checks, failures


def cmd_verify(args) -> int:
    rng = random.Random(args.seed)
    try:
        if args.suite == "tangents":
            checks, failures = _verify_tangent_suite(rng)
        elif args.suite == "oracle":
            checks, failures = _verify_oracle_suite(rng, args.horizon_steps)
        elif args.suite == "reachsets":
            checks, failures = _verify_reachsets_suite(rng)
        else:
            checks, failures = _verify_saddle_suite(rng)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"suite {args.suite}: {checks - failures}/{checks} checks passed")
    return 0 if failures == 0 else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="twocars",
        description="Pursuit-evasion between two turn-rate-limited vehicles",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn in (
        ("simulate", cmd_simulate),
        ("matrix", cmd_matrix),
        ("tangents", cmd_tangents),
        ("reachsets", cmd_reachsets),
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="scenario JSON file")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=0)
        if name == "reachsets":
            p.add_argument("--horizon", type=float, default=None)
        p.set_defaults(fn=fn)

    v = sub.add_parser("verify")
    v.add_argument("--suite", required=True, choices=["tangents", "oracle", "reachsets", "saddle"])
    v.add_argument("--config", default=None)
    v.add_argument("--out", default=None)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--horizon-steps", type=int, default=4)
    v.set_defaults(fn=cmd_verify)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
