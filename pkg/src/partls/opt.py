"""Exact solver: one NNLS problem per group sign vector.

With the signs ``b`` fixed, the problem over ``alpha >= 0`` is a convex NNLS
problem on the design whose columns are multiplied by the sign of their
group. The smallest of the ``2^K`` optima is the global optimum, and
:func:`partls.model.renormalize` maps its minimizer back to a model.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import CapExceededError, DimensionError, PartLSError, SolverError
from .linalg import nnls_solve, reduce_least_squares
from .model import (
    Dataset,
    FitConfig,
    FitReport,
    Partition,
    RawSolution,
    objective,
    renormalize,
)


def signed_design(X, partition: Partition, b) -> np.ndarray:
    """Multiply every column of ``X`` by the sign (or weight) of its group."""
    X = np.asarray(X, dtype=float)
    b = np.asarray(b, dtype=float)
    if X.ndim != 2 or X.shape[1] != partition.n_features:
        raise DimensionError(f"X has shape {X.shape}, expected (*, {partition.n_features})")
    if b.shape != (partition.n_groups,):
        raise DimensionError(f"sign vector has shape {b.shape}, expected ({partition.n_groups},)")
    return X * b[partition.assignments]


def augment_regularization(X, y, partition: Partition, rho: float):
    """Append ``K`` penalty rows so the squared residual gains ``rho * ||P^T alpha||^2``.

    Row ``k`` holds ``sqrt(rho)`` on the columns of group ``k``; the matching
    targets are zero. For any sign vector applied afterwards the penalty is
    unchanged, because the row of group ``k`` only meets columns of that group.
    """
    if rho < 0:
        raise ValueError(f"rho must be >= 0, got {rho}")
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    rows = np.sqrt(rho) * partition.matrix().T
    return np.vstack([X, rows]), np.concatenate([y, np.zeros(partition.n_groups)])


def sign_vectors(K: int):
    """All of ``{-1, +1}^K`` in lexicographic order (``-1`` before ``+1``)."""
    for signs in itertools.product((-1.0, 1.0), repeat=K):
        yield np.array(signs)


def _solve_candidate(R, c, offset, partition, b, tol):
    A = signed_design(R, partition, b)
    alpha = nnls_solve(A, c, tol=tol)
    r = A @ alpha - c
    return float(r @ r + offset), alpha


def fit_opt(data: Dataset, partition: Partition, config: FitConfig = FitConfig()) -> FitReport:
    """Global optimum by enumerating every group sign vector.

    Ties between sign vectors are broken towards the lexicographically
    smallest ``b``. A candidate whose NNLS solve fails is skipped and listed in
    ``report.failures``.

    Raises
    ------
    CapExceededError
        If ``K`` exceeds ``config.enum_cap``; use the branch-and-bound solver.
    SolverError
        If every candidate fails.
    """
    K = partition.n_groups
    if data.n_features != partition.n_features:
        raise DimensionError("dataset and partition disagree on the feature count")
    if K > config.enum_cap:
        raise CapExceededError(
            f"{K} groups exceed the enumeration cap of {config.enum_cap} "
            f"(2^{K} subproblems); use the bnb solver or raise the cap"
        )
    start = time.perf_counter()

    X, y = data.X, data.y
    if config.eta > 0:
        X, y = augment_regularization(X, y, partition, config.eta)
    # Signing columns commutes with the QR compression: X D = Q (R D).
    R, c, offset = reduce_least_squares(X, y)

    candidates = list(sign_vectors(K))

    def run(b):
        try:
            return _solve_candidate(R, c, offset, partition, b, config.tol)
        except PartLSError as exc:
            return exc

    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(run, candidates))
    else:
        results = [run(b) for b in candidates]

    best = None
    failures = []
    for b, res in zip(candidates, results):
        if isinstance(res, Exception):
            failures.append({"b": b.astype(int).tolist(), "error": str(res)})
            continue
        value, alpha = res
        # Strict comparison keeps the earliest (lexicographically smallest) b.
        if best is None or value < best[0]:
            best = (value, alpha, b)
    if best is None:
        raise SolverError(f"all {len(candidates)} subproblems failed: {failures[0]['error']}")

    _, alpha, b = best
    model = renormalize(RawSolution(np.maximum(alpha, 0.0), b), partition)
    return FitReport(
        solver="opt",
        objective=objective(model, partition, data, config.eta),
        model=model,
        seconds=time.perf_counter() - start,
        subproblems=len(candidates),
        failures=failures,
    )
