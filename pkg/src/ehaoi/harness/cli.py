"""Command-line entry point: ``ehaoi {solve,simulate,sweep,policy-grid,trace}``.

Every subcommand reads a YAML config and writes one CSV table. Exit status is
0 on success, 1 on usage or config errors and 2 when value iteration fails to
converge.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path

from ehaoi.harness import experiments
from ehaoi.harness.config import ConfigError, load_config, load_event_log
from ehaoi.harness.trace import aoi_trace
from ehaoi.solver import ConvergenceError

log = logging.getLogger("ehaoi")

EXIT_OK, EXIT_USAGE, EXIT_NONCONVERGENCE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_table(path: str, header: list[str], rows: list[list], comments: list[str] = ()) -> None:
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    try:
        Path(path).write_text(buf.getvalue())
    except OSError as exc:
        raise ConfigError(f"cannot write output file {path}: {exc.strerror}") from None


def _params_comment(p) -> str:
    return (
        f"pe={p.pe} ps={p.ps} p01={p.p01} p10={p.p10} e_max={p.e_max} "
        f"d_max0={p.d_max0} d_max1={p.d_max1} gamma={p.gamma}"
    )


def cmd_solve(args) -> None:
    cfg = load_config(args.config)
    p = cfg.params()
    sol = experiments.solve(p, cfg.tol, args.max_iterations)
    j0 = sol.value(cfg.start_state)
    r = sol.report
    _write_table(
        args.output,
        ["j_star_s0", "iterations", "residual", "residual_bound", "n_states"],
        [[j0, r.iterations, r.residual, r.error_bound, sol.kernel.n_states]],
        comments=[_params_comment(p), f"start_state={list(cfg.start_state)}"],
    )
    print(f"J*(s0) = {j0:.6f}  (s0 = {list(cfg.start_state)})")
    print(f"iterations = {r.iterations}  residual = {r.residual:.3e}  error bound = {r.error_bound:.3e}")


def cmd_simulate(args) -> None:
    cfg = load_config(args.config)
    sol, est = experiments.simulate(cfg, args.max_iterations)
    _write_table(
        args.output,
        ["estimate", "stderr", "episodes", "horizon"],
        [[est.mean, est.stderr, est.episodes, est.horizon]],
        comments=[_params_comment(cfg.params()), f"seed={cfg.seed} start_state={list(cfg.start_state)}"],
    )
    print(f"estimate = {est.mean:.6f} +/- {est.stderr:.6f}  (J*(s0) = {sol.value(cfg.start_state):.6f})")


def cmd_sweep(args) -> None:
    cfg = load_config(args.config)
    columns = cfg.swept_columns() + ["j_star_s0", "iterations", "residual_bound"]
    rows = []
    for row in experiments.sweep(cfg, args.max_iterations):
        rows.append([row[c] for c in columns])
        log.info("%s", ", ".join(f"{c}={_fmt(row[c])}" for c in columns))
    _write_table(args.output, columns, rows)
    print(f"{len(rows)} grid points written to {args.output}")


def cmd_policy_grid(args) -> None:
    cfg = load_config(args.config)
    p = cfg.params()
    grid = experiments.policy_grid(p, args.z, cfg.tol, args.max_iterations)
    other = f"d{1 - args.z}"
    header = ["e"] + [f"d{args.z}={d}" for d in range(1, grid.shape[1] + 1)]
    rows = [[e] + [int(a) for a in grid[e]] for e in range(grid.shape[0])]
    _write_table(
        args.output,
        header,
        rows,
        comments=[_params_comment(p), f"slice: z={args.z} zd={args.z} {other}=0; 1 = transmit, 0 = withhold"],
    )
    print(f"policy slice for z={args.z} written to {args.output}")


def cmd_trace(args) -> None:
    log_ = load_event_log(args.config)
    points = aoi_trace(log_)
    _write_table(args.output, ["k", "d0", "d1"], [[pt.k, pt.d0, pt.d1] for pt in points])
    print(f"{len(points)} slots written to {args.output}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ehaoi", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    commands = {
        "solve": (cmd_solve, "value iteration; report J*(s0)"),
        "simulate": (cmd_simulate, "Monte Carlo estimate of the optimal policy's cost"),
        "sweep": (cmd_sweep, "solve over a parameter grid"),
        "policy-grid": (cmd_policy_grid, "optimal actions over (e, AoI)"),
        "trace": (cmd_trace, "replay AoI from an event log"),
    }
    for name, (func, help_) in commands.items():
        p = sub.add_parser(name, help=help_)
        p.add_argument("config", help="YAML config file")
        p.add_argument("-o", "--output", required=True, help="output CSV path")
        if name != "trace":
            p.add_argument(
                "--max-iterations", type=int, default=1_000_000, help="value-iteration cap (default 10^6)"
            )
        if name == "policy-grid":
            p.add_argument("--z", type=int, choices=(0, 1), required=True, help="process state of the slice")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    return EXIT_OK


run_cli = main

if __name__ == "__main__":
    sys.exit(main())
