"""Command-line interface.

Subcommands
-----------
solve
    Solve an instance file, print a one-line summary, optionally write
    the report (JSON or CSV iteration log) and a convergence figure.
generate
    Write a random instance file for a given shape and seed.
bench
    Solve a grid of random cells repeatedly and tabulate mean time,
    iterations and hyperplane counts per cell.

Exit codes: 0 optimal, 2 unbounded relaxation or dual, 3 iteration
limit, 4 numerical failure, 1 usage or input errors.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import os
import sys
from pathlib import Path

from . import alpn, gen, io, plots
from .alpn import SolveStatus
from .model import SolverParams

__all__ = ["main", "parse_dims", "parse_grid", "EXIT_CODES"]

EXIT_CODES = {
    SolveStatus.OPTIMAL: 0,
    SolveStatus.RELAXATION_UNBOUNDED: 2,
    SolveStatus.DUAL_UNBOUNDED: 2,
    SolveStatus.ITERATION_LIMIT: 3,
    SolveStatus.NUMERICAL_FAILURE: 4,
}

BENCH_HEADER = [
    "m",
    "n",
    "dims",
    "reps",
    "mean_time_s",
    "mean_iterations",
    "mean_initial_hyperplanes",
    "mean_final_hyperplanes",
    "failures",
]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_dims(text: str) -> tuple[int, ...]:
    """Parse the block grammar ``SIZExCOUNT[,SIZExCOUNT...]``.

    ``"5x4"`` means four blocks of dimension five; groups concatenate,
    so ``"1x2,3x1"`` yields dims ``(1, 1, 3)``.
    """
    dims: list[int] = []
    for group in text.split(","):
        group = group.strip()
        size, sep, count = group.partition("x")
        if not sep:
            raise UsageError(f"bad dims group {group!r}: expected SIZExCOUNT")
        try:
            size_i, count_i = int(size), int(count)
        except ValueError:
            raise UsageError(f"bad dims group {group!r}: expected integers") from None
        if size_i < 1 or count_i < 1:
            raise UsageError(f"bad dims group {group!r}: values must be >= 1")
        dims.extend([size_i] * count_i)
    if not dims:
        raise UsageError("dims must contain at least one group")
    return tuple(dims)


def parse_grid(text: str) -> list[dict]:
    """Parse bench cells ``m=M,dims=DIMS`` separated by semicolons."""
    cells = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        fields = {}
        for item in part.split(","):
            key, sep, value = item.partition("=")
            if not sep:
                raise UsageError(f"bad grid item {item!r}: expected key=value")
            key = key.strip()
            if key == "dims":
                fields.setdefault("dims", []).append(value.strip())
            elif key == "m":
                try:
                    fields["m"] = int(value)
                except ValueError:
                    raise UsageError(f"bad grid item {item!r}: m must be an integer") from None
            else:
                raise UsageError(f"unknown grid key {key!r}")
        if "m" not in fields or "dims" not in fields:
            raise UsageError(f"grid cell {part!r} needs both m= and dims=")
        cells.append({"m": fields["m"], "dims": parse_dims(",".join(fields["dims"]))})
    if not cells:
        raise UsageError("grid must contain at least one cell")
    return cells


def _build_parser() -> _Parser:
    parser = _Parser(prog="alpn-socp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve an instance file")
    p_solve.add_argument("instance", help="path to an alpn-socp/1 instance file")
    p_solve.add_argument("--out", help="write the report here")
    p_solve.add_argument("--log", help="write the per-iteration CSV log here")
    p_solve.add_argument(
        "--format",
        choices=io.REPORT_STYLES,
        default="structured",
        help="report style used for --out (default: structured)",
    )
    p_solve.add_argument("--tol", type=float, default=None, help="primal tolerance")
    p_solve.add_argument("--max-iter", type=int, default=None, help="outer iteration budget")
    p_solve.add_argument("--gamma0", type=float, default=None, help="initial objective bound")
    p_solve.add_argument(
        "--no-plot",
        action="store_true",
        help="skip the convergence figure written next to --out",
    )

    p_gen = sub.add_parser("generate", help="write a random instance file")
    p_gen.add_argument("--m", type=int, required=True, help="number of equality rows")
    p_gen.add_argument("--dims", required=True, help="block grammar, e.g. 1x20 or 5x4")
    p_gen.add_argument("--seed", type=int, default=0, help="generator seed")
    p_gen.add_argument("--out", required=True, help="output instance path")

    p_bench = sub.add_parser("bench", help="run a benchmark grid")
    p_bench.add_argument(
        "--grid",
        required=True,
        help="cells like 'm=10,dims=1x20;m=10,dims=5x4'",
    )
    p_bench.add_argument("--reps", type=int, default=10, help="instances per cell")
    p_bench.add_argument("--seed", type=int, default=0, help="base seed")
    p_bench.add_argument("--tol", type=float, default=None, help="primal tolerance")
    p_bench.add_argument("--max-iter", type=int, default=None, help="outer iteration budget")
    p_bench.add_argument("--out", help="write the summary CSV here")
    p_bench.add_argument(
        "--no-plot",
        action="store_true",
        help="skip the summary figure written next to --out",
    )
    return parser


def _params_from_args(args) -> SolverParams:
    overrides = {}
    if getattr(args, "tol", None) is not None:
        overrides["tol_feas"] = args.tol
    if getattr(args, "max_iter", None) is not None:
        overrides["max_outer_iterations"] = args.max_iter
    if getattr(args, "gamma0", None) is not None:
        overrides["gamma0"] = args.gamma0
    return SolverParams(**overrides)


def _cmd_solve(args) -> int:
    instance = io.read_instance(args.instance)
    report = alpn.solve(instance, _params_from_args(args))
    res = report.residuals
    print(
        f"status={report.status.value} objective={report.objective:.10g} "
        f"iterations={report.iterations} "
        f"hyperplanes={report.initial_hyperplanes}->{report.final_hyperplanes} "
        f"primal_eq={res.primal_eq:.3g} primal_cone={res.primal_cone:.3g}"
    )
    if args.out:
        io.write_report(report, args.out, format=args.format)
        if not args.no_plot:
            figure = Path(args.out).with_suffix(".png")
            plots.render_convergence(report, figure)
    if args.log:
        io.write_report(report, args.log, format="csv-log")
    return EXIT_CODES[report.status]


def _cmd_generate(args) -> int:
    dims = parse_dims(args.dims)
    generated = gen.generate(args.m, dims, args.seed)
    provenance = {
        "seed": generated.seed,
        "x_tilde": [float(v) for v in generated.x_tilde],
        "s_tilde": [float(v) for v in generated.s_tilde],
    }
    io.write_instance(generated.instance, args.out, provenance=provenance)
    print(
        f"wrote {args.out}: m={args.m} n={generated.instance.n} "
        f"blocks={len(dims)} seed={generated.seed}"
    )
    return 0


def _bench_worker(job):
    cell_index, rep, cell, seed, params = job
    generated = gen.generate(cell["m"], cell["dims"], seed)
    report = alpn.solve(generated.instance, params)
    return cell_index, rep, report


def _bench_workers() -> int:
    limit = os.environ.get("ALPN_THREADS")
    available = os.cpu_count() or 1
    if limit is None:
        return available
    try:
        return max(1, min(available, int(limit)))
    except ValueError:
        raise UsageError(f"ALPN_THREADS must be an integer, got {limit!r}") from None


def _cmd_bench(args) -> int:
    cells = parse_grid(args.grid)
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    params = _params_from_args(args)
    jobs = []
    for ci, cell in enumerate(cells):
        for rep in range(args.reps):
            seed = args.seed + ci * args.reps + rep
            jobs.append((ci, rep, cell, seed, params))
    reports: dict[tuple[int, int], object] = {}
    workers = _bench_workers()
    if workers > 1 and len(jobs) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            for ci, rep, report in pool.map(_bench_worker, jobs):
                reports[(ci, rep)] = report
    else:
        for job in jobs:
            ci, rep, report = _bench_worker(job)
            reports[(ci, rep)] = report

    rows = []
    for ci, cell in enumerate(cells):
        cell_reports = [reports[(ci, rep)] for rep in range(args.reps)]
        ok = [r for r in cell_reports if r.status is SolveStatus.OPTIMAL]
        failures = len(cell_reports) - len(ok)
        pool_for_means = ok or cell_reports
        mean = lambda vals: sum(vals) / len(vals)  # noqa: E731
        rows.append(
            {
                "m": cell["m"],
                "n": sum(cell["dims"]),
                "dims": _dims_label(cell["dims"]),
                "reps": args.reps,
                "mean_time_s": mean([r.wall_time_seconds for r in pool_for_means]),
                "mean_iterations": mean([r.iterations for r in pool_for_means]),
                "mean_initial_hyperplanes": mean(
                    [r.initial_hyperplanes for r in pool_for_means]
                ),
                "mean_final_hyperplanes": mean(
                    [r.final_hyperplanes for r in pool_for_means]
                ),
                "failures": failures,
            }
        )

    widths = {key: max(len(key), 12) for key in BENCH_HEADER}
    print("  ".join(key.ljust(widths[key]) for key in BENCH_HEADER))
    for row in rows:
        print("  ".join(_cell_text(row[key]).ljust(widths[key]) for key in BENCH_HEADER))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(BENCH_HEADER)
            for row in rows:
                writer.writerow([_cell_text(row[key]) for key in BENCH_HEADER])
        if not args.no_plot:
            plots.render_bench_summary(rows, Path(args.out).with_suffix(".png"))
    return 0


def _dims_label(dims) -> str:
    groups = []
    for d in dims:
        if groups and groups[-1][0] == d:
            groups[-1][1] += 1
        else:
            groups.append([d, 1])
    return ",".join(f"{d}x{count}" for d, count in groups)


def _cell_text(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "generate":
            return _cmd_generate(args)
        return _cmd_bench(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (io.InstanceFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
