"""Command line: ``orbitron run``, ``orbitron plot`` and ``--version``."""

import argparse
import platform
import sys

from . import __version__
from .errors import MissingColumns, OrbitronError, ScenarioError
from .scenario import SCHEMA_VERSION, load_scenario

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3


def _version_text():
    import numpy
    return (f"orbitron {__version__} (scenario schema {SCHEMA_VERSION}; "
            f"python {platform.python_version()}, numpy {numpy.__version__})")


def build_parser():
    ap = argparse.ArgumentParser(prog="orbitron", description=__doc__)
    ap.add_argument("--version", action="version", version=_version_text())
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario file")
    run.add_argument("scenario", help="path to a scenario JSON file")
    run.add_argument("--out", default=".", help="output directory (default: current)")
    run.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
    run.add_argument("--no-figures", action="store_true", help="skip the PNG figures")
    plot = sub.add_parser("plot", help="write a matplotlib script for a CSV file")
    plot.add_argument("csv", help="CSV written by orbitron run")
    plot.add_argument("--kind", choices=("line", "heatmap"), default="line")
    plot.add_argument("--script", default=None, help="script path (default: next to the CSV)")
    return ap


def cmd_run(args):
    from .sweeps import run_task
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        scn = load_scenario(args.scenario)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        res = run_task(scn, args.out, args.threads, figures=not args.no_figures)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OrbitronError as exc:
        code = EXIT_VALIDATION if isinstance(exc, ValueError) else EXIT_NUMERICAL
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return code
    for path in res.files:
        print(path)
    if res.failures:
        print(f"warning: {len(res.failures)} numerical failure(s); first: {res.failures[0]}",
              file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_plot(args):
    from .plotting import emit_plot_script
    try:
        path = emit_plot_script(args.csv, args.kind, args.script)
    except FileNotFoundError:
        print(f"error: no such file {args.csv}", file=sys.stderr)
        return EXIT_VALIDATION
    except MissingColumns as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    print(path)
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args)
    return cmd_plot(args)


if __name__ == "__main__":
    sys.exit(main())
