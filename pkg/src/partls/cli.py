"""Command line front end: ``partls fit | bench | gen | fetch``.

Exit codes: 0 success, 2 input or validation error, 3 solver failure,
4 enumeration/node cap exceeded. Errors are reported on stderr as a JSON
object ``{"error": kind, "message": text, "exit_code": n}``.
"""

from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager
from pathlib import Path

from . import __version__
from .alt import fit_alt
from .bnb import fit_bnb
from .errors import (
    CapExceededError,
    DimensionError,
    IterationLimitError,
    SolverError,
    ValidationError,
)
from .instances import SubsetSumInstance, gen_random, gen_subset_sum
from .io import dumps_result, prepare, run_result, write_dataset, write_partition_spec, write_trace
from .model import FitConfig
from .opt import fit_opt

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SOLVER = 3
EXIT_CAP = 4

SOLVERS = ("alt", "opt", "bnb")


def run_solver(solver: str, data, partition, config: FitConfig):
    """Run one solver; returns the report and its trace rows."""
    if solver == "alt":
        report, trace = fit_alt(data, partition, config)
        label = f"alt-T{config.iterations}"
        rows = [
            (label, r, seconds, best)
            for r, (seconds, best) in enumerate(zip(trace.cumulative_seconds, trace.best_so_far))
        ]
        return report, rows
    if solver == "opt":
        report = fit_opt(data, partition, config)
    elif solver == "bnb":
        report = fit_bnb(data, partition, config)
    else:
        raise ValidationError(f"unknown solver {solver!r}")
    return report, [(solver, 0, report.seconds, report.objective)]


@contextmanager
def _open_out(path):
    if path is None or str(path) == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _config(args, iterations=None) -> FitConfig:
    return FitConfig(
        eta=args.eta,
        iterations=iterations or args.iterations[0],
        restarts=args.restarts,
        seed=args.seed,
        tol=args.tolerance,
        node_limit=args.node_limit,
        enum_cap=args.enum_cap,
        early_stop=args.early_stop,
        threads=args.threads,
    )


def cmd_fit(args) -> int:
    data, partition, features = prepare(args.data, args.target, args.partition, args.intercept)
    config = _config(args)
    report, rows = run_solver(args.solver, data, partition, config)
    with _open_out(args.output) as fh:
        fh.write(dumps_result(run_result(report, partition, features, config)))
    if args.trace_out:
        with _open_out(args.trace_out) as fh:
            write_trace(fh, rows)
    return EXIT_OK


def cmd_bench(args) -> int:
    data, partition, _ = prepare(args.data, args.target, args.partition, args.intercept)
    rows = []
    for solver in args.solvers:
        settings = args.iterations if solver == "alt" else args.iterations[:1]
        for T in settings:
            _, solver_rows = run_solver(solver, data, partition, _config(args, T))
            rows.extend(solver_rows)
    with _open_out(args.trace_out) as fh:
        write_trace(fh, rows)
    return EXIT_OK


def cmd_gen(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if args.kind == "subset-sum":
        if not args.values:
            raise ValidationError("subset-sum needs --values")
        data, partition = gen_subset_sum(SubsetSumInstance(tuple(args.values), args.rho))
        features = [f"s{k + 1}_{j}" for k in range(partition.n_groups) for j in (1, 2)]
    else:
        data, partition, _ = gen_random(args.rows, args.features, args.groups, args.seed, args.noise)
        features = [f"x{m + 1}" for m in range(partition.n_features)]
    partition = partition.renamed([f"g{k + 1}" for k in range(partition.n_groups)])
    write_dataset(out / f"{args.name}.csv", data, features, target="y")
    write_partition_spec(out / f"{args.name}.partition.json", partition, features)
    print(json.dumps({
        "data": str(out / f"{args.name}.csv"),
        "partition": str(out / f"{args.name}.partition.json"),
        "target": "y",
    }))
    return EXIT_OK


def cmd_fetch(args) -> int:
    from .datasets import fetch

    csv_path, spec_path = fetch(args.name, args.out_dir, args.cache_dir, args.sha256)
    print(json.dumps({"data": str(csv_path), "partition": str(spec_path), "target": "y"}))
    return EXIT_OK


def _add_data_args(p):
    p.add_argument("data", help="CSV file with a header row")
    p.add_argument("--target", required=True, help="name of the target column")
    p.add_argument("--partition", required=True, help='JSON file {"groups": {name: [column, ...]}}')
    p.add_argument("--intercept", action="store_true", help="append an intercept group")


def _add_config_args(p, multi_iterations=False):
    p.add_argument("--eta", type=float, default=0.0, help="ridge penalty on group weights")
    p.add_argument(
        "--iterations", type=int, nargs="+" if multi_iterations else None,
        default=[20], help="alternating iterations per restart (T)",
    )
    p.add_argument("--restarts", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=1e-10)
    p.add_argument("--node-limit", type=int, default=100_000)
    p.add_argument("--enum-cap", type=int, default=25, help="largest K accepted by opt")
    p.add_argument("--early-stop", action="store_true", help="stop alt once the objective stalls")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--trace-out", default=None, help="trace CSV path ('-' for stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="partls", description="Partitioned least squares solvers")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a model and print the result as JSON")
    _add_data_args(p)
    p.add_argument("--solver", choices=SOLVERS, default="opt")
    p.add_argument("--output", "-o", default=None, help="result JSON path (default stdout)")
    _add_config_args(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("bench", help="write cumulative-time / best-objective traces")
    _add_data_args(p)
    p.add_argument("--solvers", nargs="+", choices=SOLVERS, default=["alt", "opt"])
    _add_config_args(p, multi_iterations=True)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen", help="generate an instance as CSV + partition JSON")
    p.add_argument("kind", choices=("subset-sum", "random"))
    p.add_argument("--out-dir", required=True)
    p.add_argument("--name", default="instance", help="file stem for the outputs")
    p.add_argument("--values", type=int, nargs="+", help="subset-sum integers")
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--rows", type=int, default=30)
    p.add_argument("--features", type=int, default=8)
    p.add_argument("--groups", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.0)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("fetch", help="download a UCI benchmark dataset")
    p.add_argument("name", help="superconductivity | yearpredictionmsd")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--sha256", default=None, help="expected archive digest")
    p.set_defaults(func=cmd_fetch)
    return parser


def _fail(kind: str, exc: Exception, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": str(exc), "exit_code": code}) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "iterations", None) is not None and not isinstance(args.iterations, list):
        args.iterations = [args.iterations]
    try:
        return args.func(args)
    except CapExceededError as exc:
        return _fail("cap_exceeded", exc, EXIT_CAP)
    except (ValidationError, DimensionError) as exc:
        return _fail("invalid_input", exc, EXIT_INPUT)
    except OSError as exc:
        return _fail("io_error", exc, EXIT_INPUT)
    except (SolverError, IterationLimitError) as exc:
        return _fail("solver_failure", exc, EXIT_SOLVER)


if __name__ == "__main__":
    sys.exit(main())
