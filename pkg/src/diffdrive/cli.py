"""Command-line front end.

Exit codes: 0 success, 1 simulation diverged, 2 usage or scenario error,
3 reference too slow for the gain design, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import copy
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Sequence

import numpy as np

from .output import emit_summary_json, emit_trace_csv, summary_dict, trace_rows, CSV_COLUMNS
from .regulator import RegulatorGains, regulator_linearized_matrix, stability_check
from .scenario import ScenarioError, parse_scenario, read_scenario_data, set_override
from .sim import ConfigError, run
from .tracking import (
    DEFAULT_EPSILON_V,
    ReferenceTooSlowError,
    TrackingDesignSpec,
    characteristic_roots,
    design_gains,
    tracking_closed_loop_matrix,
)

EXIT_OK = 0
EXIT_DIVERGED = 1
EXIT_USAGE = 2
EXIT_TOO_SLOW = 3
EXIT_IO = 4

log = logging.getLogger("diffdrive")

_SUBCOMMAND_MODE = {"simulate-track": "tracking", "simulate-regulate": "regulation"}


def _configure_logging() -> None:
    level = os.environ.get("DIFFDRIVE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def _fmt_root(z: complex) -> str:
    if z.imag == 0:
        return f"{z.real:.9g}"
    sign = "+" if z.imag > 0 else "-"
    return f"{z.real:.9g}{sign}{abs(z.imag):.9g}j"


def _sweep_values(spec: str) -> tuple[str, list[float]]:
    try:
        key, rng = spec.split("=", 1)
        start, step, end = (float(p) for p in rng.split(":"))
    except ValueError:
        raise ScenarioError("sweep", f"expected key=start:step:end, got {spec!r}") from None
    if step <= 0 or end < start:
        raise ScenarioError("sweep", "need step > 0 and end >= start")
    n = int(np.floor((end - start) / step + 1e-9)) + 1
    return key.strip(), [start + i * step for i in range(n)]


def _sweep_path(out: Path, key: str, value: float) -> Path:
    return out.with_name(f"{out.stem}__{key}={value:g}{out.suffix}")


def _simulate_one(data: dict, mode: str, fmt: str, out: str | None) -> int:
    config = parse_scenario(data, mode)
    trace = run(config)
    if out is None:
        if fmt == "csv":
            sys.stdout.write(",".join(CSV_COLUMNS) + "\n")
            for row in trace_rows(trace):
                sys.stdout.write(",".join(row) + "\n")
        else:
            import json

            sys.stdout.write(json.dumps(summary_dict(trace), indent=2, sort_keys=True) + "\n")
    elif fmt == "csv":
        emit_trace_csv(trace, out)
    else:
        emit_summary_json(trace, out)
    s = trace.summary
    log.info("%s run: converged=%s diverged=%s steps=%d", mode, s.converged, s.diverged, s.n_steps)
    return EXIT_DIVERGED if s.diverged else EXIT_OK


def _cmd_simulate(args: argparse.Namespace) -> int:
    mode = _SUBCOMMAND_MODE[args.command]
    data = read_scenario_data(args.scenario)
    for assignment in args.override:
        set_override(data, assignment)
    if not args.sweep:
        return _simulate_one(data, mode, args.format, args.out)

    if args.out is None:
        raise ScenarioError("out", "--sweep needs --out to name the per-run files")
    key, values = _sweep_values(args.sweep)
    jobs = []
    for value in values:
        variant = copy.deepcopy(data)
        set_override(variant, f"{key}={value!r}")
        parse_scenario(variant, mode)  # fail fast before any run starts
        jobs.append((variant, mode, args.format, str(_sweep_path(Path(args.out), key, value))))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            codes = list(pool.map(_simulate_one, *zip(*jobs)))
    else:
        codes = [_simulate_one(*job) for job in jobs]
    for job, code in zip(jobs, codes):
        print(f"{job[3]}\t{'diverged' if code else 'ok'}")
    return max(codes)


def _cmd_design_gains(args: argparse.Namespace) -> int:
    spec = TrackingDesignSpec(args.xi, args.omega_n)
    gains = design_gains(spec, args.v_ref, args.omega_ref, args.epsilon_v)
    roots = characteristic_roots(tracking_closed_loop_matrix(gains, args.v_ref, args.omega_ref))
    print(f"k1 = {gains.k1:.9g}")
    print(f"k2 = {gains.k2:.9g}")
    print(f"k3 = {gains.k3:.9g}")
    print("roots = " + ", ".join(_fmt_root(z) for z in roots))
    if gains.warning:
        print(f"warning: {gains.warning}")
    return EXIT_OK


def _cmd_check_stability(args: argparse.Namespace) -> int:
    gains = RegulatorGains(args.k_r, args.k_etheta, args.k_thetaE)
    verdict = stability_check(gains)
    if verdict.stable:
        print("stable")
    else:
        print("unstable: violates " + "; ".join(verdict.violations))
    roots = characteristic_roots(regulator_linearized_matrix(gains))
    print("roots = " + ", ".join(_fmt_root(z) for z in roots))
    return EXIT_OK


def _cmd_roots(args: argparse.Namespace) -> int:
    matrix = np.array(args.entries, dtype=float).reshape(3, 3)
    print("roots = " + ", ".join(_fmt_root(z) for z in characteristic_roots(matrix)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="diffdrive", description="Differential-drive control toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("simulate-track", "run a trajectory-tracking scenario"),
        ("simulate-regulate", "run a pose-regulation scenario"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--scenario", required=True, help="scenario YAML file")
        p.add_argument("--out", help="output file (stdout when omitted)")
        p.add_argument("--format", choices=("csv", "summary"), default="csv")
        p.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                       help="override a scenario key, e.g. gains.k_r=0.5 (repeatable)")
        p.add_argument("--sweep", metavar="KEY=START:STEP:END", help="run once per value of KEY")
        p.add_argument("--jobs", type=int, default=1, help="parallel workers for --sweep")
        p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("design-gains", help="tracking gains from damping and natural frequency")
    p.add_argument("--xi", type=float, required=True)
    p.add_argument("--omega-n", type=float, required=True)
    p.add_argument("--v-ref", type=float, required=True)
    p.add_argument("--omega-ref", type=float, default=0.0)
    p.add_argument("--epsilon-v", type=float, default=DEFAULT_EPSILON_V)
    p.set_defaults(func=_cmd_design_gains)

    p = sub.add_parser("check-stability", help="sign test and roots for regulator gains")
    p.add_argument("--k-r", type=float, required=True)
    p.add_argument("--k-etheta", type=float, required=True)
    p.add_argument("--k-thetaE", type=float, required=True)
    p.set_defaults(func=_cmd_check_stability)

    p = sub.add_parser("roots", help="characteristic roots of a 3x3 matrix (row-major)")
    p.add_argument("entries", type=float, nargs=9)
    p.set_defaults(func=_cmd_roots)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ReferenceTooSlowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOO_SLOW
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
