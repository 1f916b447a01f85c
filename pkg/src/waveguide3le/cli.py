"""Command-line scenario runner."""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import ScenarioError
from .scenario import bundled_names, load_scenario

OUT_ENV = "WAVEGUIDE3LE_OUT"
DEFAULT_OUT = "waveguide3le-out"

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_POINT_FAILURES = 3


def _parser():
    parser = argparse.ArgumentParser(prog="waveguide3le", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario file or a bundled scenario")
    run.add_argument("scenario", help="path to a JSON scenario or a bundled name (see 'list')")
    run.add_argument("--out", help=f"output directory (default: ${OUT_ENV} or ./{DEFAULT_OUT})")
    run.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    run.add_argument("--emit-plots", action="store_true", help="also write PNG figures and a plot script")
    sub.add_parser("list", help="list bundled scenarios")
    return parser


def _invalid(message: str) -> int:
    print(json.dumps({"error": "invalid_scenario", "message": message}), file=sys.stderr)
    return EXIT_INVALID


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "list":
        for name in bundled_names():
            print(name)
        return EXIT_OK

    if args.jobs < 1:
        return _invalid("--jobs must be at least 1")
    try:
        scenario = load_scenario(args.scenario)
    except ScenarioError as exc:
        return _invalid(str(exc))

    from .runner import run_scenario

    root = Path(args.out or os.environ.get(OUT_ENV) or DEFAULT_OUT)
    out_dir = root / scenario.name
    try:
        report = run_scenario(scenario, out_dir, jobs=args.jobs)
    except ScenarioError as exc:
        return _invalid(str(exc))
    for path in report.files:
        print(path)
    if args.emit_plots:
        from .plotting import PLOT_SCRIPT, render_run

        script = out_dir / "plot_figures.py"
        script.write_text(PLOT_SCRIPT, encoding="utf-8")
        print(script)
        for png in render_run(out_dir):
            print(png)
    if report.failed:
        print(f"{len(report.errors)} point(s) failed; see {out_dir / 'errors.jsonl'}", file=sys.stderr)
        return EXIT_POINT_FAILURES
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
