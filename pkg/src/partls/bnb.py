"""Depth-first branch and bound over group signs.

Eliminating the sign vector gives a problem over unrestricted ``alpha``::

    minimize ||X alpha - y||^2   s.t.  alpha_i * alpha_j >= 0  for i, j in the same group

Each node fixes some groups to be nonnegative or nonpositive and drops the
same-sign constraints of the remaining groups. What is left is a convex
least-squares problem whose optimum bounds every completion of the node from
below. When the relaxed solution already has consistent signs in every group
it is feasible, and the node is closed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import CapExceededError, DimensionError
from .linalg import FREE, NONNEG, NONPOS, mixed_sign_ls
from .model import Dataset, FitConfig, FitReport, Partition, RawSolution, objective, renormalize
from .opt import augment_regularization


@dataclass(frozen=True)
class QuadForm:
    """``alpha^T Q alpha + q^T alpha + q0``, the expanded squared residual."""

    Q: np.ndarray
    q: np.ndarray
    q0: float

    def __call__(self, alpha) -> float:
        alpha = np.asarray(alpha, dtype=float)
        return float(alpha @ self.Q @ alpha + self.q @ alpha + self.q0)


def build_quadform(data: Dataset) -> QuadForm:
    X, y = data.X, data.y
    return QuadForm(X.T @ X, -2.0 * X.T @ y, float(y @ y))


@dataclass(frozen=True)
class BnbNode:
    """Sign state of every group: ``"free"``, ``"nonneg"`` or ``"nonpos"``."""

    constraints: tuple[str, ...]
    depth: int = 0

    def child(self, k: int, state: str) -> "BnbNode":
        c = list(self.constraints)
        c[k] = state
        return BnbNode(tuple(c), self.depth + 1)


def lower_bound(X, y, partition: Partition, constraints, tol: float = 1e-10):
    """Relaxed optimum of a node: ``(lb, alpha)``.

    Only the sign constraints of already-fixed groups are kept. Solved on the
    least-squares form rather than on the expanded quadratic, which would
    square the condition number.
    """
    constraints = tuple(constraints)
    if len(constraints) != partition.n_groups:
        raise DimensionError(f"{len(constraints)} constraints for {partition.n_groups} groups")
    spec = [constraints[k] for k in partition.assignments]
    alpha = mixed_sign_ls(X, y, spec, tol=tol)
    r = np.asarray(X) @ alpha - np.asarray(y)
    return float(r @ r), alpha


def violations(alpha, partition: Partition) -> np.ndarray:
    """Per-group sum of ``max(0, -alpha_i * alpha_j)`` over ordered pairs in the group."""
    alpha = np.asarray(alpha, dtype=float)
    nu = np.zeros(partition.n_groups)
    for k, group in enumerate(partition.members):
        a = alpha[group]
        nu[k] = np.maximum(0.0, -np.outer(a, a)).sum()
    return nu


def signs_to_raw(alpha, partition: Partition) -> RawSolution:
    """Turn a sign-consistent ``alpha`` into ``(|alpha|, b)``.

    The group sign follows the group's sum; entries of the opposite sign (only
    roundoff-sized ones at a feasible point) are clipped to zero.
    """
    alpha = np.asarray(alpha, dtype=float)
    b = np.where(partition.group_sums(alpha) < 0, -1.0, 1.0)
    signed = alpha * b[partition.assignments]
    return RawSolution(np.maximum(signed, 0.0), b)


@dataclass
class _Search:
    X: np.ndarray
    y: np.ndarray
    partition: Partition
    tol: float
    node_limit: int
    incumbent: float = np.inf
    best_alpha: np.ndarray | None = None
    nodes: int = 0
    pruned: int = 0
    incumbents: list = field(default_factory=list)
    bounds: list = field(default_factory=list)
    truncated: bool = False

    def visit(self, node: BnbNode, mu: float) -> float:
        if self.nodes >= self.node_limit:
            self.truncated = True
            return mu
        self.nodes += 1
        lb, alpha = lower_bound(self.X, self.y, self.partition, node.constraints, self.tol)
        self.bounds.append((node.constraints, lb))
        if lb >= mu:
            self.pruned += 1
            return mu

        nu = violations(alpha, self.partition)
        threshold = self.tol * (1.0 + float(np.max(np.abs(alpha), initial=0.0)) ** 2)
        if np.all(nu <= threshold):
            if lb < self.incumbent:
                self.incumbent = lb
                self.best_alpha = alpha
                self.incumbents.append(lb)
            return lb

        k = int(np.argmax(nu))
        mu_plus = self.visit(node.child(k, NONNEG), mu)
        mu_minus = self.visit(node.child(k, NONPOS), min(mu, mu_plus))
        return min(mu, mu_plus, mu_minus)


def fit_bnb(data: Dataset, partition: Partition, config: FitConfig = FitConfig()) -> FitReport:
    """Global optimum by depth-first branch and bound.

    The nonnegative child of a node is explored first, and the incumbent it
    produces is passed to its sibling. If ``config.node_limit`` nodes are
    visited before the tree is exhausted, the incumbent is returned with
    ``optimal=False``.

    Raises
    ------
    CapExceededError
        If the node limit is hit before any feasible point is found.
    """
    if data.n_features != partition.n_features:
        raise DimensionError("dataset and partition disagree on the feature count")
    start = time.perf_counter()
    X, y = data.X, data.y
    if config.eta > 0:
        X, y = augment_regularization(X, y, partition, config.eta)

    search = _Search(X, y, partition, config.tol, config.node_limit)
    root = BnbNode((FREE,) * partition.n_groups)
    search.visit(root, np.inf)

    if search.best_alpha is None:
        raise CapExceededError(
            f"node limit {config.node_limit} reached before a feasible solution was found"
        )
    model = renormalize(signs_to_raw(search.best_alpha, partition), partition)
    return FitReport(
        solver="bnb",
        objective=objective(model, partition, data, config.eta),
        model=model,
        seconds=time.perf_counter() - start,
        optimal=not search.truncated,
        subproblems=search.nodes,
        nodes=search.nodes,
        pruned=search.pruned,
    )
