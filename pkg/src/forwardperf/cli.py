"""Command-line entry point.

Exit status is 0 on success, 1 for invalid input (bad flags, malformed or
inadmissible scenarios) and 2 when the construction fails numerically or a
``verify`` check does not pass.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .config import RunConfig
from .errors import SolverError, ValidationError
from .forward import InitialUtility, run, step
from .funceq import (
    Branch,
    classify,
    make_nonunique_pair,
    power_delta,
    relative_residual,
    uniqueness_limit,
)
from .invariants import run_suite
from .marginal import PowerMarginal, TabulatedMarginal, check_inada, log_grid
from .market import PeriodParams

EXIT_OK, EXIT_INVALID, EXIT_SOLVER = 0, 1, 2
# shallow power laws need many decades before I drops below the Inada epsilon
INADA_RANGE = (1e-16, 1e16)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(f"{self.prog}: {message}")


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--tol", type=float, default=default, help="series truncation tolerance")
    parser.add_argument("--grid-points", type=int, default=default, help="rows in exported grids")
    parser.add_argument("--ymin", type=float, default=default, help="lower end of the y grid")
    parser.add_argument("--ymax", type=float, default=default, help="upper end of the y grid")
    parser.add_argument("--out", type=Path, default=default, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="forwardperf", description=__doc__.splitlines()[0])
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        _global_flags(p, suppress=True)
        return p

    p = add("solve", "one-period inverse problem for a power or log utility")
    for flag in ("--u", "--d", "--p"):
        p.add_argument(flag, type=float, required=True)
    p.add_argument("--theta", type=float, required=True, help="1 selects log utility")

    p = add("run", "construct the process along a scenario and write CSVs")
    p.add_argument("--scenario", type=Path, required=True)

    p = add("verify", "construct the process and run every invariant check")
    p.add_argument("--scenario", type=Path, required=True)
    p.add_argument("--no-oracle", action="store_true", help="skip the brute-force optimizer")

    p = add("nonunique-demo", "two distinct solutions of one functional equation")
    for flag in ("--u", "--d", "--p"):
        p.add_argument(flag, type=float, required=True)

    p = add("export-grid", "write a tabulated power inverse marginal as CSV")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--file", type=Path, default=None, help="defaults to <out>/marginal_0.csv")
    return parser


def _config(args) -> RunConfig:
    kw = {}
    if args.tol is not None:
        kw["tol_series"] = args.tol
    if args.grid_points is not None:
        kw["grid_points"] = args.grid_points
    if args.ymin is not None:
        kw["y_min"] = args.ymin
    if args.ymax is not None:
        kw["y_max"] = args.ymax
    if args.out is not None:
        kw["output_dir"] = args.out
    return RunConfig(**kw)


def _cmd_solve(args, config: RunConfig, out) -> int:
    params = PeriodParams(args.u, args.d, args.p)
    initial = InitialUtility("power", args.theta)
    u0 = initial.build(config)
    st = step(u0, params, 1.0, config=config)
    report = st.report
    print(f"q={params.q!r} a={params.a!r} b={params.b!r} c={params.c!r}", file=out)
    if report.branch is Branch.TRIVIAL_A_EQ_1:
        print("delta=1.0", file=out)
    elif args.theta != 1.0:
        print(f"delta={power_delta(args.theta, params)!r}", file=out)
    print(f"pi_star/x={st.allocation!r}", file=out)
    print(f"branch={report.route.value}", file=out)
    return EXIT_OK


def _print_path(steps, out) -> None:
    print(f"{'n':>3}  {'X_star':>22}  {'pi_star':>22}  {'route':<12} realized", file=out)
    for n, st in enumerate(steps):
        x = "" if st.x is None else repr(st.x)
        pi = "" if st.allocation is None else repr(st.allocation)
        realized = "" if st.outcome is None else st.outcome.value
        print(f"{n:>3}  {x:>22}  {pi:>22}  {st.report.route.value:<12} {realized}", file=out)


def _cmd_run(args, config: RunConfig, out) -> int:
    scenario = io.load_scenario(args.scenario)
    steps = run(scenario, config)
    _print_path(steps, out)
    written = io.write_run(config.output_dir, scenario, steps, config)
    print(f"wrote {len(written)} files to {config.output_dir}", file=out)
    return EXIT_OK


def _cmd_verify(args, config: RunConfig, out) -> int:
    scenario = io.load_scenario(args.scenario)
    steps = run(scenario, config)
    results = run_suite(scenario, steps, oracle=not args.no_oracle, config=config)
    for r in results:
        print(r.line(), file=out)
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed} passed, {failed} failed", file=out)
    return EXIT_OK if failed == 0 else EXIT_SOLVER


def _cmd_nonunique(args, config: RunConfig, out) -> int:
    params = PeriodParams(args.u, args.d, args.p)
    pair = make_nonunique_pair(params)
    ys = log_grid(config.y_min, config.y_max, config.grid_points)
    res_p = relative_residual(pair.principal, pair.initial, params, ys)
    res_q = relative_residual(pair.perturbed, pair.initial, params, ys)
    config.output_dir.mkdir(parents=True, exist_ok=True)
    path = config.output_dir / "nonunique.csv"
    io.write_table(path, ["y", "I_principal", "I_perturbed", "residual_principal", "residual_perturbed"],
                   [ys, pair.principal(ys), pair.perturbed(ys), res_p, res_q])
    print(f"delta={pair.delta!r} M={pair.M!r}", file=out)
    for name, fn, res in (("principal", pair.principal, res_p), ("perturbed", pair.perturbed, res_q)):
        inada = check_inada(fn, *INADA_RANGE)
        at_zero, at_inf = uniqueness_limit(fn, params, y_min=config.y_min, y_max=config.y_max)
        print(f"{name:<9}  max_residual={float(np.max(res)):.3e}  inada={'ok' if inada.ok else 'FAIL'}"
              f"  psi_sup_low={at_zero:.6g}  psi_sup_high={at_inf:.6g}", file=out)
    print(f"wrote {path}", file=out)
    return EXIT_OK


def _cmd_export(args, config: RunConfig, out) -> int:
    tab = TabulatedMarginal.from_function(PowerMarginal(args.theta), config.y_min, config.y_max,
                                          config.grid_points)
    path = args.file or config.output_dir / "marginal_0.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    tab.to_csv(path)
    print(f"wrote {config.grid_points} knots to {path}", file=out)
    return EXIT_OK


_COMMANDS = {
    "solve": _cmd_solve,
    "run": _cmd_run,
    "verify": _cmd_verify,
    "nonunique-demo": _cmd_nonunique,
    "export-grid": _cmd_export,
}


def run_command(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return _COMMANDS[args.command](args, _config(args), out)
    except ValidationError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INVALID
    except SolverError as exc:
        print(f"solver failure: {exc}", file=err)
        return EXIT_SOLVER


def main() -> None:
    sys.exit(run_command())
