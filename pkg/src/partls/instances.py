"""Test-instance generators.

``gen_subset_sum`` encodes a subset-sum (equal-partition) question as a
partitioned least squares problem with two features per group. Its optimum
equals ``rho * sum(s^2) / (1 + rho)`` exactly when the integers can be split
into two halves of equal sum, and is strictly larger otherwise. That makes it
a value oracle for the exact solvers and a hardness witness for the problem.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ValidationError
from .model import Dataset, FitConfig, Model, Partition, predict


@dataclass(frozen=True)
class SubsetSumInstance:
    s: tuple[int, ...]
    rho: float = 1.0

    def __post_init__(self):
        values = tuple(self.s)
        if not values:
            raise ValidationError("a subset-sum instance needs at least one integer")
        for v in values:
            if int(v) != v or v < 1:
                raise ValidationError(f"subset-sum values must be positive integers, got {v}")
        if not self.rho > 0:
            raise ValidationError(f"rho must be > 0, got {self.rho}")
        object.__setattr__(self, "s", tuple(int(v) for v in values))


def gen_subset_sum(inst: SubsetSumInstance) -> tuple[Dataset, Partition]:
    """Build the ``(3K + 1) x 2K`` reduction instance (no intercept).

    Group ``k`` owns features ``2k`` and ``2k + 1``. Rows:

    * ``k``: ``+1, -1`` on the group's features, target ``-s_k``;
    * ``K + k`` and ``2K + k``: ``sqrt(rho)`` on the first / second feature, target 0;
    * last row: all ones, target 0.
    """
    s = np.asarray(inst.s, dtype=float)
    K = s.size
    r = np.sqrt(inst.rho)
    X = np.zeros((3 * K + 1, 2 * K))
    y = np.zeros(3 * K + 1)
    for k in range(K):
        first, second = 2 * k, 2 * k + 1
        X[k, first], X[k, second] = 1.0, -1.0
        y[k] = -s[k]
        X[K + k, first] = r
        X[2 * K + k, second] = r
    X[3 * K, :] = 1.0
    partition = Partition.from_assignments(np.repeat(np.arange(K), 2))
    return Dataset(X, y), partition


def balanced_partition_value(inst: SubsetSumInstance) -> float:
    """``rho * sum(s^2) / (1 + rho)``: the reduction's optimum iff an equal split exists.

    Without an equal split it is a strict lower bound on the optimum.
    """
    s = np.asarray(inst.s, dtype=float)
    return float(inst.rho * (s @ s) / (1.0 + inst.rho))


def has_equal_split(s: Sequence[int]) -> bool:
    """Direct check by enumerating the subsets containing the first element."""
    s = list(s)
    total = sum(s)
    if total % 2:
        return False
    rest = s[1:]
    for mask in itertools.product((0, 1), repeat=len(rest)):
        if s[0] + sum(v for v, keep in zip(rest, mask) if keep) == total // 2:
            return True
    return False


def subset_sum_decide(
    inst: SubsetSumInstance,
    solver: Callable | None = None,
    tol: float = 1e-6,
    config: FitConfig | None = None,
) -> bool:
    """Decide subset sum by solving the reduction instance.

    ``solver`` is ``fit_opt`` (default) or ``fit_bnb``. The answer is yes iff
    the optimum is within ``tol * (1 + value)`` of
    :func:`balanced_partition_value`.
    """
    if solver is None:
        from .opt import fit_opt

        solver = fit_opt
    data, partition = gen_subset_sum(inst)
    report = solver(data, partition, config or FitConfig())
    value = balanced_partition_value(inst)
    return report.objective <= value + tol * (1.0 + value)


def random_partition(M: int, K: int, rng: np.random.Generator) -> Partition:
    """Round-robin assignment of ``M`` features to ``K`` groups, then shuffled."""
    assignments = np.arange(M) % K
    rng.shuffle(assignments)
    return Partition.from_assignments(assignments)


def gen_random(
    N: int, M: int, K: int, seed: int = 0, noise: float = 0.0
) -> tuple[Dataset, Partition, Model]:
    """Gaussian design with a planted feasible model.

    ``X`` and the noise are i.i.d. standard normal; the planted distributions
    are uniform(0, 1) draws normalized per group and the group weights are
    standard normal. ``y = predict(planted) + noise * eps``.
    """
    if not (N >= 1 and M >= K >= 1):
        raise ValidationError(f"need N >= 1 and M >= K >= 1, got N={N}, M={M}, K={K}")
    if noise < 0:
        raise ValidationError(f"noise must be >= 0, got {noise}")
    rng = np.random.default_rng(seed)
    partition = random_partition(M, K, rng)
    X = rng.standard_normal((N, M))
    alpha = rng.uniform(0.0, 1.0, M)
    alpha = alpha / partition.group_sums(alpha)[partition.assignments]
    beta = rng.standard_normal(K)
    planted = Model(alpha, beta)
    y = predict(planted, partition, X) + noise * rng.standard_normal(N)
    return Dataset(X, y), partition, planted
