"""Batch unmixing command-line tool.

Reads a spectral library, a matrix of measured spectra, and optional lower
bounds from CSV, solves every pixel, and writes a P x M abundance CSV plus
an optional JSON-lines diagnostics stream. Every flag can also be supplied
through an ``UNMIX_``-prefixed environment variable; an explicit flag wins.

Exit codes: 0 when every pixel solved, 2 on invalid input (dimensions,
infeasible bounds, parse failures), 3 when at least one pixel failed
numerically.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .active_set import SolveStatus
from .batch import BatchJob, batch_summary, precompute_gram, unmix_batch
from .errors import UnmixError
from .model import SolverConfig, UnmixingProblem
from .shift import shift_problem
from .verify import verify_kkt

_ENV_PREFIX = "UNMIX_"


def _env(name, fallback=None):
    return os.environ.get(_ENV_PREFIX + name, fallback)


def _env_flag(name):
    value = _env(name)
    return value is not None and value.strip().lower() in ("1", "true", "yes", "on")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unmix",
        description="Batch linear spectral unmixing under minimum-abundance "
        "and sum-to-one constraints.",
    )
    parser.add_argument("--library", default=_env("LIBRARY"),
                        help="CSV with N rows x P columns of endmember spectra")
    parser.add_argument("--input", default=_env("INPUT"),
                        help="CSV with N rows x M columns of measured spectra")
    parser.add_argument("--lower-bounds", default=_env("LOWER_BOUNDS"),
                        help="CSV with P lower bounds (one row or one column); "
                        "defaults to zeros")
    parser.add_argument("--output", default=_env("OUTPUT"),
                        help="destination CSV for the P x M abundance matrix")
    parser.add_argument("--diagnostics", default=_env("DIAGNOSTICS"),
                        help="optional JSONL file with per-pixel solve diagnostics")
    parser.add_argument("--tol", type=float, default=float(_env("TOL", "1e-10")),
                        help="primal feasibility tolerance (default 1e-10)")
    parser.add_argument("--dual-tol", type=float, default=float(_env("DUAL_TOL", "1e-10")),
                        help="dual feasibility tolerance (default 1e-10)")
    parser.add_argument("--max-iter", type=int,
                        default=int(_env("MAX_ITER", "0")) or None,
                        help="outer iteration cap (default 10 times the library size)")
    parser.add_argument("--tie-break", default=_env("TIE_BREAK", "smallest"),
                        help="blocking-index tie policy: 'smallest' or 'random:SEED'")
    parser.add_argument("--header", action="store_true", default=_env_flag("HEADER"),
                        help="skip one header row on inputs and write one on the output")
    parser.add_argument("--jobs", type=int, default=int(_env("JOBS", "1")),
                        help="worker threads for the batch (default 1)")
    return parser


def _parse_tie_break(text):
    if text == "smallest":
        return "smallest", 0
    if text == "random":
        return "random", 0
    if text.startswith("random:"):
        return "random", int(text.split(":", 1)[1])
    raise ValueError(f"unrecognized tie-break policy {text!r}")


def _load_matrix(path, header):
    return np.loadtxt(path, delimiter=",", skiprows=1 if header else 0, ndmin=2)


def _write_abundances(path, abundances, header):
    kwargs = {}
    if header:
        kwargs["header"] = ",".join(f"pixel_{i + 1}" for i in range(abundances.shape[1]))
        kwargs["comments"] = ""
    np.savetxt(path, abundances, delimiter=",", fmt="%.17g", **kwargs)


def _diagnostics_record(index, solution, job, gram, config):
    record = {"pixel": index, "status": solution.status.value}
    if solution.status is SolveStatus.FAILED:
        record["error"] = solution.message
        return record
    shifted = shift_problem(
        UnmixingProblem(job.library, job.pixels[:, index], job.lower_bounds),
        gram=gram,
        primal_tol=config.primal_tol,
    )
    report = verify_kkt(
        shifted,
        solution.shifted_abundances,
        solution.eq_multiplier,
        solution.ineq_multipliers,
    )
    record.update(
        iterations=solution.outer_iterations,
        free_size=int(solution.final_free.size),
        objective=solution.objective,
        kkt={
            "stationarity": report.stationarity_residual,
            "primal_eq": report.primal_eq_residual,
            "primal_ineq": report.primal_ineq_violation,
            "dual": report.dual_violation,
            "complementarity": report.complementarity_residual,
            "satisfied": report.satisfied,
        },
    )
    if solution.message:
        record["message"] = solution.message
    return record


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    missing = [name for name in ("library", "input", "output") if getattr(args, name) is None]
    if missing:
        print(f"error: missing required option(s): {', '.join('--' + m for m in missing)}",
              file=sys.stderr)
        return 2

    try:
        tie_break, tie_seed = _parse_tie_break(args.tie_break)
        config = SolverConfig(
            primal_tol=args.tol,
            dual_tol=args.dual_tol,
            max_outer_iterations=args.max_iter,
            tie_break=tie_break,
            tie_seed=tie_seed,
        )
        library = _load_matrix(args.library, args.header)
        pixels = _load_matrix(args.input, args.header)
        bounds = None
        if args.lower_bounds is not None:
            bounds = _load_matrix(args.lower_bounds, args.header).ravel()
        job = BatchJob(library=library, pixels=pixels, lower_bounds=bounds, config=config)
        solutions = unmix_batch(job, jobs=max(1, args.jobs))
    except (UnmixError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    abundances = np.column_stack([s.abundances for s in solutions])
    try:
        _write_abundances(args.output, abundances, args.header)
        if args.diagnostics is not None:
            gram = precompute_gram(job.library)
            with open(args.diagnostics, "w", encoding="utf-8") as stream:
                for index, solution in enumerate(solutions):
                    record = _diagnostics_record(index, solution, job, gram, config)
                    stream.write(json.dumps(record) + "\n")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    summary = batch_summary(solutions)
    failed = summary["pixels"] - summary["optimal"]
    print(
        f"unmixed {summary['pixels']} pixel(s): {summary['optimal']} optimal, "
        f"{summary['max_iterations']} hit the iteration cap, "
        f"{summary['failed']} failed"
    )
    return 3 if failed else 0


def entry_point():
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
