"""Command line: render a trajectory CSV (plus optional regions) to an image."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import PlotSpec, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plotkit", description="Render chase figures from CSV exports")
    sub = parser.add_subparsers(dest="command", required=True)
    r = sub.add_parser("render")
    r.add_argument("--traj", required=True, help="trajectory CSV path")
    r.add_argument(
        "--regions",
        nargs="*",
        default=[],
        help="region polygon CSVs to overlay (x,y point lists)",
    )
    r.add_argument("--out", required=True, help="output image path")
    r.add_argument("--no-circles", action="store_true", help="skip initial turning circles")

    args = parser.parse_args(argv)
    spec = PlotSpec(
        traj_path=Path(args.traj),
        out_path=Path(args.out),
        region_paths=[Path(p) for p in args.regions],
        show_turning_circles=not args.no_circles,
    )
    try:
        out = render(spec)
    except SchemaError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
