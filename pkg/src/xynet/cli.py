"""``xynet`` command line: ``xynet <mode> --config scenario.json [--out DIR]``."""

from __future__ import annotations

import argparse
import json
import os
import sys

from .config import FORMATS, MODES, load_config
from .errors import ConfigError, XYNetError
from .scenarios import run_scenario

OUT_DIR_ENV = "XYNET_OUT_DIR"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="xynet", description=__doc__)
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        p = sub.add_parser(mode)
        p.add_argument("--config", required=True, help="JSON scenario file")
        p.add_argument("--out", help=f"output directory (default: ${OUT_DIR_ENV} or ./xynet_out)")
        p.add_argument("--format", choices=FORMATS, help="trace/table format")
        p.add_argument("--jobs", type=int, help="parallel workers for multi-point scenarios")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, mode=args.mode)
        out = args.out or cfg.output or os.environ.get(OUT_DIR_ENV, "xynet_out")
        if args.jobs is not None and args.jobs < 1:
            raise ConfigError("must be >= 1", "--jobs")
        summary = run_scenario(cfg, out, args.format, args.jobs)
    except ConfigError as exc:
        print(json.dumps({"error": "ConfigError", "path": exc.path, "message": str(exc)}),
              file=sys.stderr)
        return 2
    except XYNetError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    json.dump(summary, sys.stdout, sort_keys=True)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
