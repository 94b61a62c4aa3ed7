"""Scenario configuration and trajectory serialization.

Scenario files are flat JSON; trajectories go to CSV with a fixed column
contract (one row per step, 17 significant digits so values round-trip
bit for bit) and run metadata goes to a sibling JSON document.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .dubins import EVADER, PURSUER, GameConfig, Pose, VehicleParams
from .sim import MatrixLaw, Scripted, Trajectory, Sample

CSV_HEADER = "t,xp,yp,thp,xe,ye,the,vp,wp,ve,we,dpe"


class ConfigError(ValueError):
    """Scenario file failed validation."""


@dataclass
class ScenarioConfig:
    """One runnable scenario: vehicles, initial states, and run settings."""

    cfg: GameConfig
    p0: Pose
    e0: Pose
    dt: float = 0.01
    eps_capture: float = 0.05
    t_max: float = 60.0
    pursuer_policy: dict = field(default_factory=lambda: {"type": "matrix_law"})
    evader_policy: dict = field(default_factory=lambda: {"type": "matrix_law"})
    out_dir: str | None = None

    def build_policy(self, side: str):
        spec = self.pursuer_policy if side == PURSUER else self.evader_policy
        kind = spec.get("type", "matrix_law")
        if kind == "matrix_law":
            return MatrixLaw(side, arc_epsilon=spec.get("arc_epsilon", self.dt))
        if kind == "scripted":
            if "segments" in spec:
                segments = [tuple(map(float, seg)) for seg in spec["segments"]]
                return Scripted(segments)
            return Scripted.constant(float(spec["v"]), float(spec["w"]))
        raise ConfigError(f"unknown policy type {kind!r} for {side}")


def _require_finite(name: str, value) -> float:
    try:
        out = float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field {name!r} is not a number: {value!r}") from exc
    if not math.isfinite(out):
        raise ConfigError(f"field {name!r} must be finite, got {out}")
    return out


def load_scenario(path) -> ScenarioConfig:
    """Load and validate a flat-JSON scenario file."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc

    required = ("v_pm", "w_pm", "v_em", "w_em", "p0", "e0")
    for key in required:
        if key not in raw:
            raise ConfigError(f"missing required field {key!r}")

    try:
        cfg = GameConfig(
            pursuer=VehicleParams(_require_finite("v_pm", raw["v_pm"]), _require_finite("w_pm", raw["w_pm"])),
            evader=VehicleParams(_require_finite("v_em", raw["v_em"]), _require_finite("w_em", raw["w_em"])),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    def pose(key: str) -> Pose:
        vals = raw[key]
        if not isinstance(vals, (list, tuple)) or len(vals) != 3:
            raise ConfigError(f"field {key!r} must be [x, y, theta]")
        return Pose(*(_require_finite(f"{key}[{i}]", v) for i, v in enumerate(vals)))

    scenario = ScenarioConfig(
        cfg=cfg,
        p0=pose("p0"),
        e0=pose("e0"),
        dt=_require_finite("dt", raw.get("dt", 0.01)),
        eps_capture=_require_finite("eps_capture", raw.get("eps_capture", 0.05)),
        t_max=_require_finite("t_max", raw.get("t_max", 60.0)),
        pursuer_policy=raw.get("pursuer_policy", {"type": "matrix_law"}),
        evader_policy=raw.get("evader_policy", {"type": "matrix_law"}),
        out_dir=raw.get("out_dir"),
    )
    if scenario.dt <= 0 or scenario.eps_capture <= 0 or scenario.t_max <= 0:
        raise ConfigError("dt, eps_capture and t_max must all be positive")
    for side, spec in ((PURSUER, scenario.pursuer_policy), (EVADER, scenario.evader_policy)):
        if not isinstance(spec, dict):
            raise ConfigError(f"{side} policy must be an object")
        scenario.build_policy(side)
    return scenario


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """One row per sample, 17 significant digits per value."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(CSV_HEADER + "\n")
        for s in traj.samples:
            row = (
                s.t, s.p.x, s.p.y, s.p.theta, s.e.x, s.e.y, s.e.theta,
                s.v_p, s.w_p, s.v_e, s.w_e, s.d_pe,
            )
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def read_trajectory_csv(path, dt: float | None = None, eps_capture: float = 0.05) -> Trajectory:
    """Parse a trajectory CSV back into sample records."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].strip() != CSV_HEADER:
        raise ValueError(f"unexpected header in {path}: {lines[0] if lines else '<empty>'}")
    samples = []
    for line in lines[1:]:
        if not line.strip():
            continue
        vals = [float(v) for v in line.split(",")]
        t, xp, yp, thp, xe, ye, the, vp, wp, ve, we, dpe = vals
        samples.append(
            Sample(t, Pose(xp, yp, thp), Pose(xe, ye, the), wp, we, vp, ve, dpe)
        )
    if dt is None:
        dt = samples[1].t - samples[0].t if len(samples) > 1 else 0.01
    return Trajectory(dt=dt, eps_capture=eps_capture, samples=samples)


def write_metadata(traj: Trajectory, scenario: ScenarioConfig, verdict: str, path) -> None:
    """Sibling JSON with capture results and law diagnostics."""
    doc = {
        "capture_time": traj.capture_time,
        "capture_point": list(traj.capture_point) if traj.capture_point else None,
        "applicability": verdict,
        "pair_switch_count": traj.meta.get("pair_flips", 0),
        "pair_flip_flagged": traj.meta.get("pair_flip_flagged", False),
        "saddle_gaps": traj.meta.get("saddle_gaps", []),
        "chosen_pairs": traj.meta.get("chosen_pairs", []),
        "dt": scenario.dt,
        "eps_capture": scenario.eps_capture,
        "t_max": scenario.t_max,
        "v_pm": scenario.cfg.pursuer.v_max,
        "w_pm": scenario.cfg.pursuer.w_max,
        "v_em": scenario.cfg.evader.v_max,
        "w_em": scenario.cfg.evader.w_max,
        "p0": [scenario.p0.x, scenario.p0.y, scenario.p0.theta],
        "e0": [scenario.e0.x, scenario.e0.y, scenario.e0.theta],
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
