"""Command-line harness.

    mobisense validate PROTOCOL
    mobisense run PROTOCOL --duration 24h --out DIR [--seed N]
                  [--battery-profile CSV] [--location-script CSV]
                  [--virtual-time | --no-virtual-time]
    mobisense coverage RUN_DIR PROTOCOL
"""

from __future__ import annotations

import argparse
import logging
import re
import sys
from pathlib import Path

from mobisense.coverage import coverage_from_run_dir
from mobisense.errors import MobisenseError, ProtocolError
from mobisense.probes.device import load_battery_profile, load_location_script
from mobisense.protocol import parse_protocol, validate_protocol
from mobisense.runner import run_study
from mobisense.runtime import default_registries

logger = logging.getLogger("mobisense")

_DURATION = re.compile(r"(\d+)(ms|h|m|s)?\Z")
_UNIT_MS = {"h": 3_600_000, "m": 60_000, "s": 1000, "ms": 1, None: 1000}


def parse_duration(text: str) -> int:
    """Duration in ms from ``24h``, ``90m``, ``30s`` or ``500ms``; bare numbers are seconds."""
    m = _DURATION.match(text.strip())
    if not m:
        raise argparse.ArgumentTypeError(f"bad duration {text!r} (try 24h, 90m or 30s)")
    return int(m.group(1)) * _UNIT_MS[m.group(2)]


def _load_protocol(path: str):
    with open(path, "rb") as fh:
        return parse_protocol(fh.read())


def cmd_validate(args) -> int:
    try:
        protocol = _load_protocol(args.protocol)
    except (OSError, ProtocolError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    reg = default_registries()
    report = validate_protocol(protocol, reg.packages, reg.transformers)
    for issue in report:
        print(issue)
    if report.ok:
        print(f"{args.protocol}: ok ({len(report.warnings)} warnings)")
        return 0
    return 1


def cmd_run(args) -> int:
    try:
        protocol = _load_protocol(args.protocol)
    except (OSError, ProtocolError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    reg = default_registries()
    report = validate_protocol(protocol, reg.packages, reg.transformers)
    if not report.ok:
        for issue in report.errors:
            print(issue, file=sys.stderr)
        return 1
    try:
        battery = load_battery_profile(args.battery_profile) if args.battery_profile else None
        script = load_location_script(args.location_script) if args.location_script else ()
        result = run_study(protocol, args.out, args.duration, virtual_time=args.virtual_time,
                           seed=args.seed, battery_profile=battery, location_script=script,
                           registries=reg)
    except (OSError, ValueError, MobisenseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    s = result.summary
    print(f"{s['total_points']} points in {result.duration_ms / 1000:g} s, "
          f"{s['adaptation_transitions']} tier transitions -> {args.out}")
    return 130 if result.interrupted else 0


def cmd_coverage(args) -> int:
    try:
        protocol = _load_protocol(args.protocol)
        packages = default_registries().packages
        report = coverage_from_run_dir(args.run_dir, protocol, packages)
    except (OSError, ValueError, KeyError, ProtocolError) as exc:
        print(f"error: cannot read run artifacts: {exc}", file=sys.stderr)
        return 1
    text = report.to_csv()
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mobisense", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a protocol file")
    p.add_argument("protocol")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="execute a study against the simulated device")
    p.add_argument("protocol")
    p.add_argument("--duration", type=parse_duration, default=parse_duration("1h"),
                   help="run length, e.g. 24h, 90m, 30s (default 1h)")
    p.add_argument("--virtual-time", action=argparse.BooleanOptionalAction, default=True,
                   help="simulate time instead of waiting")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--battery-profile", metavar="CSV", help="t_ms,level rows")
    p.add_argument("--location-script", metavar="CSV", help="t_ms,lat,lon rows")
    p.add_argument("--out", metavar="DIR", default="run", help="artifact directory")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("coverage", help="recompute coverage from a run directory")
    p.add_argument("run_dir")
    p.add_argument("protocol")
    p.add_argument("-o", "--output", metavar="CSV", help="write here instead of stdout")
    p.set_defaults(func=cmd_coverage)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
