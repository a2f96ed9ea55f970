"""``semnoma`` command-line driver."""

from __future__ import annotations

import argparse
import logging
import sys

from semnoma import __version__
from semnoma.errors import ConfigError, InfeasibleError
from semnoma.experiments import load_config, run_opportunistic, run_rate_region

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4

log = logging.getLogger("semnoma")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="semnoma", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (("rate-region", "semantic-versus-bit rate regions (OMA / NOMA / semi-NOMA)"),
                           ("opportunistic", "uplink mode switching vs fixed-mode baselines")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", help="JSON config file or a previous run's manifest.json")
        p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config key (value parsed as JSON); repeatable")
    p = sub.add_parser("plot", help="write a gnuplot script and PNG figures for a result directory")
    p.add_argument("--from", dest="source", required=True, help="result directory")
    p.add_argument("--script-only", action="store_true", help="only emit the gnuplot script")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "plot":
            from semnoma.plotting import plot_directory

            for path in plot_directory(args.source, render=not args.script_only):
                print(path)
            return EXIT_OK
        cfg = load_config(args.config, args.overrides, args.command)
        if args.command == "rate-region":
            run_rate_region(cfg)
        else:
            _, feasible = run_opportunistic(cfg)
            if feasible == 0:
                print("error: every r_req point is infeasible", file=sys.stderr)
                return EXIT_INFEASIBLE
        print(cfg.output_dir)
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
