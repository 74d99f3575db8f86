"""Command-line interface: every subcommand reads exact inputs and writes
one deterministic JSON report to stdout.

Exit codes: 0 success, 2 invalid input, 3 scan found a non-firing
singular instance.  When both --in and flags are given, the file wins.
The TORICFIB_JOBS environment variable overrides --jobs for scan.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any, Mapping, Sequence

from . import criterion, serialize, surface, towers
from .divisors import toric_mld, zero_divisor
from .exactmath import is_primitive
from .models import model_V
from .serialize import InputError

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SCAN_FAILURE = 3


def _load_json(path: str) -> Mapping[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise InputError(f"{path} must contain a JSON object")
    return doc


def _instance_from_args(args: argparse.Namespace, need_l: bool) -> tuple:
    if args.infile:
        doc = _load_json(args.infile)
        try:
            d = doc["d"]
            r = doc["r"]
            eps = serialize.parse_rational(doc["eps"])
            n = serialize.parse_vector(doc["n"], d if isinstance(d, int) else None)
        except KeyError as exc:
            raise InputError(f"instance file is missing key {exc}") from None
        l = serialize.parse_vector(doc["l"], len(n)) if doc.get("l") is not None else None
    else:
        missing = [
            flag
            for flag, value in (("--d", args.d), ("--r", args.r), ("--eps", args.eps), ("--n", args.n))
            if value is None
        ]
        if missing:
            raise InputError(f"missing {', '.join(missing)} (or provide --in)")
        d = args.d
        r = args.r
        eps = serialize.parse_rational(args.eps)
        n = serialize.parse_vector(args.n, d)
        l = serialize.parse_vector(args.l, d) if args.l is not None else None
    if isinstance(d, bool) or not isinstance(d, int) or d < 2:
        raise InputError("d must be an integer >= 2")
    if isinstance(r, bool) or not isinstance(r, int) or r < 1:
        raise InputError("r must be an integer >= 1")
    if not 0 < eps <= 1:
        raise InputError("eps must lie in (0, 1]")
    if not is_primitive(n):
        raise InputError("n must be primitive")
    if need_l:
        if l is None:
            raise InputError("this command needs l (--l or the 'l' key)")
        if not is_primitive(l):
            raise InputError("l must be primitive")
    return d, r, eps, n, l


def _cmd_certify(args: argparse.Namespace) -> int:
    d, r, eps, n, l = _instance_from_args(args, need_l=True)
    try:
        report = criterion.certify(d, r, eps, n, l)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    sys.stdout.write(serialize.dumps(serialize.certificate_to_dict(report)))
    return EXIT_OK


def _cmd_mld(args: argparse.Namespace) -> int:
    if args.fan:
        fan = serialize.fan_from_dict(_load_json(args.fan))
    elif args.fan_of_v:
        if args.d is None or args.n is None:
            raise InputError("--fan-of-v needs --d and --n")
        n = serialize.parse_vector(args.n, args.d)
        if not is_primitive(n):
            raise InputError("n must be primitive")
        try:
            fan = model_V(args.d, n).fan
        except ValueError as exc:
            raise InputError(str(exc)) from None
    else:
        raise InputError("either --fan-of-v or --fan is required")
    value, minimizer = toric_mld(fan, zero_divisor(fan))
    sys.stdout.write(
        serialize.dumps(serialize.mld_report_to_dict(fan.ambient_dim, value, minimizer))
    )
    return EXIT_OK


def _cmd_example(args: argparse.Namespace) -> int:
    eps = serialize.parse_rational(args.eps)
    try:
        report = surface.example_verify(args.n, args.r, eps)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    sys.stdout.write(serialize.dumps(serialize.chain_report_to_dict(report)))
    return EXIT_OK


def _cmd_scan(args: argparse.Namespace) -> int:
    eps = serialize.parse_rational(args.eps)
    jobs = args.jobs
    env_jobs = os.environ.get("TORICFIB_JOBS")
    if env_jobs is not None:
        try:
            jobs = int(env_jobs)
        except ValueError:
            raise InputError("TORICFIB_JOBS must be an integer") from None
    try:
        summary = criterion.scan(args.d, args.r, eps, args.bound, jobs=jobs)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    sys.stdout.write(serialize.dumps(serialize.scan_summary_to_dict(summary)))
    return EXIT_OK if summary.ok else EXIT_SCAN_FAILURE


def _cmd_tower(args: argparse.Namespace) -> int:
    doc = _load_json(args.infile)
    spec = serialize.tower_from_dict(doc.get("tower", doc))
    if args.tower_command == "validate":
        diagnostics = towers.validate(spec)
        sys.stdout.write(serialize.dumps(serialize.diagnostics_to_dict(spec, diagnostics)))
        return EXIT_OK
    # pullback
    if "germ" not in doc:
        raise InputError("tower pullback needs a 'germ' object")
    germ = serialize.germ_from_dict(doc["germ"])
    errors = towers.validation_errors(spec)
    if errors:
        raise InputError("; ".join(d.message for d in errors))
    try:
        pulled = towers.pullback_tower(spec, germ)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    sys.stdout.write(
        serialize.dumps(
            {
                "schema_version": serialize.SCHEMA_VERSION,
                "kind": "tower-pullback",
                "tower": serialize.tower_to_dict(pulled),
            }
        )
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toricfib",
        description="Exact computations on toric fibration models over the affine line.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    certify = sub.add_parser("certify", help="run the negativity certificate on one instance")
    certify.add_argument("--d", type=int)
    certify.add_argument("--r", type=int)
    certify.add_argument("--eps", type=str)
    certify.add_argument("--n", type=str)
    certify.add_argument("--l", type=str)
    certify.add_argument("--in", dest="infile", type=str)
    certify.set_defaults(handler=_cmd_certify)

    mld = sub.add_parser("mld", help="minimal log discrepancy of a fan")
    mld.add_argument("--fan-of-v", action="store_true", dest="fan_of_v")
    mld.add_argument("--d", type=int)
    mld.add_argument("--n", type=str)
    mld.add_argument("--fan", type=str)
    mld.set_defaults(handler=_cmd_mld)

    example = sub.add_parser("example", help="verify the chain family closed forms")
    example.add_argument("--n", type=int, required=True)
    example.add_argument("--r", type=int, required=True)
    example.add_argument("--eps", type=str, required=True)
    example.set_defaults(handler=_cmd_example)

    scan = sub.add_parser("scan", help="sweep all primitive vectors up to a bound")
    scan.add_argument("--d", type=int, required=True)
    scan.add_argument("--r", type=int, required=True)
    scan.add_argument("--eps", type=str, required=True)
    scan.add_argument("--bound", type=int, required=True)
    scan.add_argument("--jobs", type=int, default=None)
    scan.set_defaults(handler=_cmd_scan)

    tower = sub.add_parser("tower", help="validate or base-change a tower description")
    tower_sub = tower.add_subparsers(dest="tower_command", required=True)
    for name in ("validate", "pullback"):
        leaf = tower_sub.add_parser(name)
        leaf.add_argument("--in", dest="infile", type=str, required=True)
        leaf.set_defaults(handler=_cmd_tower)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
