"""Alternating solver with random restarts.

Each iteration fixes the within-group weights and solves a (ridge) least
squares problem for the group weights, then fixes the group weights and
solves an NNLS problem for the within-group weights with the sum-to-one
constraint dropped. Renormalizing the NNLS solution moves each group's total
into its group weight, so every half-step can only lower the objective.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError
from .linalg import nnls_solve, ols_solve
from .model import (
    Dataset,
    FitConfig,
    FitReport,
    Model,
    Partition,
    RawSolution,
    objective,
    renormalize,
)
from .opt import augment_regularization, signed_design

MAX_REINIT = 10


@dataclass
class AltTrace:
    """Per-restart history of an alternating fit.

    ``objectives[r]`` holds the objective at the random start followed by the
    value after every half-step of restart ``r``. ``cumulative_seconds[r]`` is
    the summed run time of restarts ``0..r``.
    """

    objectives: list = field(default_factory=list)
    restart_objectives: list = field(default_factory=list)
    restart_seconds: list = field(default_factory=list)
    degenerate: list = field(default_factory=list)

    @property
    def cumulative_seconds(self) -> list:
        return np.cumsum(self.restart_seconds).tolist()

    @property
    def best_so_far(self) -> list:
        return np.minimum.accumulate(self.restart_objectives).tolist()


def random_start(partition: Partition, rng: np.random.Generator) -> Model:
    """Feasible random start: uniform(0, 1) weights normalized per group, beta in (-1, 1)."""
    alpha = rng.uniform(0.0, 1.0, partition.n_features)
    totals = partition.group_sums(alpha)
    alpha = alpha / totals[partition.assignments]
    beta = rng.uniform(-1.0, 1.0, partition.n_groups)
    return Model(alpha, beta)


def _collapse(X, partition: Partition, alpha) -> np.ndarray:
    # X (P o alpha): one column per group.
    W = np.zeros((partition.n_features, partition.n_groups))
    W[np.arange(partition.n_features), partition.assignments] = alpha
    return X @ W


def beta_step(data: Dataset, partition: Partition, alpha, eta: float) -> np.ndarray:
    """Best group weights for fixed ``alpha`` (ridge via augmented rows)."""
    Xc = _collapse(data.X, partition, alpha)
    y = data.y
    if eta > 0:
        K = partition.n_groups
        Xc = np.vstack([Xc, np.sqrt(eta) * np.eye(K)])
        y = np.concatenate([y, np.zeros(K)])
    return ols_solve(Xc, y)


def alpha_step(data: Dataset, partition: Partition, beta, eta: float, tol: float) -> Model:
    """Best model for fixed group weights ``beta``, after renormalization.

    The penalty rows are appended before the columns are scaled by ``beta``,
    so the NNLS objective is exactly the fitted objective of the
    renormalized model, ``||X (P o a) beta - y||^2 + eta * ||beta o P^T a||^2``.
    """
    X, y = data.X, data.y
    if eta > 0:
        X, y = augment_regularization(X, y, partition, eta)
    alpha = nnls_solve(signed_design(X, partition, beta), y, tol=tol)
    b = np.where(beta < 0, -1.0, 1.0)
    # |beta_k| is folded into alpha so the raw solution uses pure signs.
    raw = RawSolution(np.maximum(alpha * np.abs(beta)[partition.assignments], 0.0), b)
    return renormalize(raw, partition)


def _run_restart(data, partition, config, index):
    start = time.perf_counter()
    rng = np.random.default_rng(config.seed + index)
    model = random_start(partition, rng)
    reinit = 0
    # A group whose collapsed column is identically zero gives the first
    # beta-step nothing to fit; draw a new start a few times.
    while reinit < MAX_REINIT and np.any(
        ~_collapse(data.X, partition, model.alpha).any(axis=0)
    ):
        reinit += 1
        model = random_start(partition, rng)

    values = [objective(model, partition, data, config.eta)]
    for _ in range(config.iterations):
        model = Model(model.alpha, beta_step(data, partition, model.alpha, config.eta))
        values.append(objective(model, partition, data, config.eta))
        model = alpha_step(data, partition, model.beta, config.eta, config.tol)
        values.append(objective(model, partition, data, config.eta))
        if config.early_stop and abs(values[-3] - values[-1]) < config.tol * (1 + abs(values[-1])):
            break
    return model, values, reinit, time.perf_counter() - start


def fit_alt(
    data: Dataset, partition: Partition, config: FitConfig = FitConfig()
) -> tuple[FitReport, AltTrace]:
    """Multi-start alternating fit; returns the best restart and the full trace.

    Restart ``r`` is seeded with ``config.seed + r`` so results do not depend
    on ``config.threads``. Ties between restarts go to the lower index.
    """
    if data.n_features != partition.n_features:
        raise DimensionError("dataset and partition disagree on the feature count")
    start = time.perf_counter()
    indices = range(config.restarts)

    def run(r):
        return _run_restart(data, partition, config, r)

    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            runs = list(pool.map(run, indices))
    else:
        runs = [run(r) for r in indices]

    trace = AltTrace()
    best = None
    iterations = 0
    for r, (model, values, reinit, seconds) in enumerate(runs):
        trace.objectives.append(values)
        trace.restart_objectives.append(values[-1])
        trace.restart_seconds.append(seconds)
        if reinit:
            trace.degenerate.append({"restart": r, "reinitializations": reinit})
        iterations += (len(values) - 1) // 2
        if best is None or values[-1] < best[0]:
            best = (values[-1], model)

    value, model = best
    report = FitReport(
        solver="alt",
        objective=value,
        model=model,
        seconds=time.perf_counter() - start,
        optimal=False,
        iterations=iterations,
        subproblems=2 * iterations,
        restarts=config.restarts,
        failures=list(trace.degenerate),
    )
    return report, trace
