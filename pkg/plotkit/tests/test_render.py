import json
import math
import shutil
import subprocess
from pathlib import Path

import pytest

from plotkit.cli import main
from plotkit.render import EXPECTED_COLUMNS, PlotSpec, SchemaError, load_trajectory, render

SCENARIOS = Path(__file__).resolve().parents[2] / "scenarios"


def synthetic_rows(n=120, dt=0.05):
    """A curving pursuer closing on a straight evader."""
    rows = []
    for k in range(n):
        t = k * dt
        thp = min(1.5708, 0.5 + 1.2 * t)
        xp, yp = 2.0 * t * math.cos(thp), 2.0 * t * math.sin(thp)
        xe, ye = 1.0, 5.0 + 1.0 * t
        d = math.hypot(xp - xe, yp - ye)
        rows.append([t, xp, yp, thp, xe, ye, 1.5708, 2.0, 2.0 if t < 0.5 else 0.0, 1.0, 0.0, d])
    return rows


def write_csv(path, rows, header=None):
    header = header or EXPECTED_COLUMNS
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def test_load_trajectory_roundtrip(tmp_path):
    path = tmp_path / "traj.csv"
    write_csv(path, synthetic_rows())
    cols = load_trajectory(path)
    assert len(cols["t"]) == 120
    assert cols["xe"][0] == 1.0


def test_header_only_is_an_error(tmp_path):
    path = tmp_path / "empty.csv"
    write_csv(path, [])
    with pytest.raises(SchemaError, match="no data rows"):
        load_trajectory(path)


def test_column_mismatch_names_columns(tmp_path):
    path = tmp_path / "bad.csv"
    header = ["t", "xp", "yp", "xe", "ye", "oops"]
    write_csv(path, [], header=header)
    with pytest.raises(SchemaError, match="oops"):
        load_trajectory(path)


def test_render_writes_image(tmp_path):
    traj = tmp_path / "traj.csv"
    write_csv(traj, synthetic_rows())
    out = render(PlotSpec(traj_path=traj, out_path=tmp_path / "fig.png"))
    assert out.is_file()
    assert out.stat().st_size > 5000


def test_render_with_region_overlay(tmp_path):
    traj = tmp_path / "traj.csv"
    write_csv(traj, synthetic_rows())
    region = tmp_path / "region.csv"
    region.write_text("x,y\n-2,-2\n8,-2\n8,12\n-2,12\n")
    out = render(
        PlotSpec(traj_path=traj, out_path=tmp_path / "fig.png", region_paths=[region])
    )
    assert out.is_file()


def test_render_uses_sibling_metadata(tmp_path):
    traj = tmp_path / "trajectory.csv"
    write_csv(traj, synthetic_rows())
    (tmp_path / "metadata.json").write_text(
        json.dumps({"capture_time": 3.21, "capture_point": [1.0, 9.0], "w_pm": 2.0, "w_em": 1.0})
    )
    out = render(PlotSpec(traj_path=traj, out_path=tmp_path / "fig.png"))
    assert out.is_file()


def test_render_deterministic(tmp_path):
    traj = tmp_path / "traj.csv"
    write_csv(traj, synthetic_rows())
    a = render(PlotSpec(traj_path=traj, out_path=tmp_path / "a.png"))
    b = render(PlotSpec(traj_path=traj, out_path=tmp_path / "b.png"))
    assert a.read_bytes() == b.read_bytes()


def test_cli_render_and_error_exit(tmp_path):
    traj = tmp_path / "traj.csv"
    write_csv(traj, synthetic_rows())
    assert main(["render", "--traj", str(traj), "--out", str(tmp_path / "ok.png")]) == 0
    bad = tmp_path / "bad.csv"
    bad.write_text("nope\n")
    assert main(["render", "--traj", str(bad), "--out", str(tmp_path / "no.png")]) == 2


@pytest.mark.skipif(shutil.which("twocars") is None, reason="primary CLI not installed")
def test_bundled_scenarios_render(tmp_path):
    """Acceptance: the four bundled demo trajectories render without error."""
    for case in ("case1", "case2", "case3", "case4"):
        run_dir = tmp_path / case
        proc = subprocess.run(
            [
                "twocars", "simulate",
                "--config", str(SCENARIOS / f"{case}.json"),
                "--out", str(run_dir),
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert main(
            [
                "render",
                "--traj", str(run_dir / "trajectory.csv"),
                "--out", str(tmp_path / f"{case}.png"),
            ]
        ) == 0
        assert (tmp_path / f"{case}.png").stat().st_size > 5000
    print("[acceptance] PASS 9 figure rendering: four demo trajectories rendered")
