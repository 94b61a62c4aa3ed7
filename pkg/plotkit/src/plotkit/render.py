"""Render exported chase trajectories and region polygons to figures.

Consumes only files: the trajectory CSV contract (columns
t,xp,yp,thp,xe,ye,the,vp,wp,ve,we,dpe), optional region CSVs (x,y point
lists), and the optional metadata JSON written next to a trajectory.
The pursuer is drawn dashed, the evader dotted, the capture point as a
star, on equal-aspect axes.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import Circle

EXPECTED_COLUMNS = ["t", "xp", "yp", "thp", "xe", "ye", "the", "vp", "wp", "ve", "we", "dpe"]


class SchemaError(ValueError):
    """Input file does not match the expected column contract."""


@dataclass
class PlotSpec:
    """What to draw: input files, output image, and overlay toggles."""

    traj_path: Path
    out_path: Path
    region_paths: list = field(default_factory=list)
    show_turning_circles: bool = True
    show_capture_line: bool = True
    show_capture_marker: bool = True


def load_trajectory(path) -> dict:
    """Parse a trajectory CSV into column arrays, validating the schema."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: file is empty")
        if header != EXPECTED_COLUMNS:
            missing = [c for c in EXPECTED_COLUMNS if c not in header]
            extra = [c for c in header if c not in EXPECTED_COLUMNS]
            raise SchemaError(
                f"{path}: column mismatch (missing: {missing or 'none'}, "
                f"unexpected: {extra or 'none'})"
            )
        rows = [[float(v) for v in row] for row in reader if row]
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    cols = {name: [row[i] for row in rows] for i, name in enumerate(EXPECTED_COLUMNS)}
    return cols


def load_region(path) -> list:
    """Parse an x,y polygon point list."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["x", "y"]:
            raise SchemaError(f"{path}: expected 'x,y' header, got {header}")
        pts = [(float(r[0]), float(r[1])) for r in reader if r]
    if len(pts) < 3:
        raise SchemaError(f"{path}: need at least 3 polygon points, got {len(pts)}")
    return pts


def load_metadata(traj_path) -> dict | None:
    """Sibling metadata.json of a trajectory, when present."""
    candidate = Path(traj_path).with_name("metadata.json")
    if not candidate.is_file():
        return None
    try:
        return json.loads(candidate.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, OSError):
        return None


def _turning_circle_centers(x, y, theta, radius):
    left = (x - radius * math.sin(theta), y + radius * math.cos(theta))
    right = (x + radius * math.sin(theta), y - radius * math.cos(theta))
    return left, right


def render(spec: PlotSpec) -> Path:
    """Draw the figure described by `spec` and write it to spec.out_path."""
    cols = load_trajectory(spec.traj_path)
    meta = load_metadata(spec.traj_path)

    fig, ax = plt.subplots(figsize=(7.0, 7.0))

    for pts in map(load_region, spec.region_paths):
        xs = [p[0] for p in pts] + [pts[0][0]]
        ys = [p[1] for p in pts] + [pts[0][1]]
        ax.fill(xs, ys, alpha=0.15, color="tab:green", zorder=0)
        ax.plot(xs, ys, color="tab:green", linewidth=0.8, alpha=0.6, zorder=1)

    ax.plot(cols["xp"], cols["yp"], "b--", linewidth=1.4, label="pursuer", zorder=3)
    ax.plot(cols["xe"], cols["ye"], "r:", linewidth=1.6, label="evader", zorder=3)
    ax.plot(cols["xp"][0], cols["yp"][0], "b^", markersize=7, zorder=4)
    ax.plot(cols["xe"][0], cols["ye"][0], "rs", markersize=6, zorder=4)

    if spec.show_turning_circles:
        for x0, y0, th0, w0, color in (
            (cols["xp"][0], cols["yp"][0], cols["thp"][0], _initial_rate(cols, meta, "p"), "b"),
            (cols["xe"][0], cols["ye"][0], cols["the"][0], _initial_rate(cols, meta, "e"), "r"),
        ):
            if w0 is None:
                continue
            radius = 1.0 / w0
            for center in _turning_circle_centers(x0, y0, th0, radius):
                ax.add_patch(
                    Circle(center, radius, fill=False, color=color, linewidth=0.6, alpha=0.5)
                )

    capture_point = None
    if meta and meta.get("capture_point"):
        capture_point = tuple(meta["capture_point"])
    elif cols["dpe"][-1] <= max(0.1, 0.02 * cols["dpe"][0]):
        # no metadata: treat a run ending at a tiny fraction of the initial
        # separation as captured at the final midpoint
        capture_point = (
            0.5 * (cols["xp"][-1] + cols["xe"][-1]),
            0.5 * (cols["yp"][-1] + cols["ye"][-1]),
        )
    if spec.show_capture_marker and capture_point is not None:
        ax.plot(*capture_point, "k*", markersize=14, label="capture", zorder=5)

    if spec.show_capture_line and capture_point is not None:
        th = cols["thp"][-1]
        span = max(cols["dpe"][0], 1.0)
        dx, dy = math.cos(th), math.sin(th)
        ax.plot(
            [capture_point[0] - span * dx, capture_point[0] + 0.3 * span * dx],
            [capture_point[1] - span * dy, capture_point[1] + 0.3 * span * dy],
            color="gray",
            linewidth=0.7,
            alpha=0.6,
            zorder=2,
        )

    ax.set_aspect("equal", adjustable="datalim")
    ax.grid(True, alpha=0.3)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.legend(loc="best")
    if meta and meta.get("capture_time") is not None:
        ax.set_title(f"capture at t = {meta['capture_time']:.3f}")

    out = Path(spec.out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out


def _initial_rate(cols, meta, side: str) -> float | None:
    """Turn-rate bound for the initial turning circles, best effort.

    Prefer the metadata's configured bound; otherwise fall back to the
    first nonzero applied turn command (its magnitude is the bound while
    the vehicle is arcing); give up if the vehicle never turns.
    """
    if meta:
        key = "w_pm" if side == "p" else "w_em"
        if meta.get(key):
            return float(meta[key])
    stream = cols["wp"] if side == "p" else cols["we"]
    for w in stream:
        if w != 0.0:
            return abs(w)
    return None
