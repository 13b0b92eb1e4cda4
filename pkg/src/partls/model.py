"""Partitioned least squares data model.

A fitted model predicts

    f(X)_n = sum_k beta_k * sum_{m in P_k} alpha_m * X[n, m]

where the groups ``P_k`` partition the features, ``alpha`` is a distribution
inside each group (nonnegative, summing to one) and ``beta`` carries the sign
and magnitude of each group's contribution.

Solvers work on the equivalent sign-vector form ``(alpha, b)``: ``alpha`` is
only required to be nonnegative and ``b`` holds one sign per group. The
function :func:`renormalize` turns such a raw solution into a :class:`Model`
with identical predictions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionError, ValidationError

DEFAULT_FEASIBILITY_TOL = 1e-9


@dataclass(frozen=True)
class Partition:
    """Assignment of ``M`` features to ``K`` non-empty groups.

    Build it with :meth:`from_assignments` or :meth:`from_groups`; the
    constructor checks that ``assignments`` and ``members`` agree.
    """

    assignments: np.ndarray
    members: tuple[np.ndarray, ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        assignments = np.asarray(self.assignments, dtype=np.intp)
        object.__setattr__(self, "assignments", assignments)
        object.__setattr__(
            self, "members", tuple(np.asarray(g, dtype=np.intp) for g in self.members)
        )
        K = len(self.members)
        if assignments.ndim != 1 or assignments.size == 0:
            raise ValidationError("a partition needs at least one feature")
        if K == 0:
            raise ValidationError("a partition needs at least one group")
        if assignments.min() < 0 or assignments.max() >= K:
            raise ValidationError("group index out of range")
        for k, group in enumerate(self.members):
            if group.size == 0:
                raise ValidationError(f"group {k} is empty")
            if np.any(assignments[group] != k):
                raise ValidationError(f"members of group {k} disagree with assignments")
        if sum(g.size for g in self.members) != assignments.size:
            raise ValidationError("every feature must belong to exactly one group")
        if self.names and len(self.names) != K:
            raise ValidationError(f"{len(self.names)} group names for {K} groups")
        if len(set(self.names)) != len(self.names):
            raise ValidationError("group names must be unique")

    @classmethod
    def from_assignments(cls, assignments: Sequence[int], names: Sequence[str] = ()):
        """Build from the group index of each feature (0-based)."""
        a = np.asarray(assignments, dtype=np.intp)
        if a.ndim != 1 or a.size == 0:
            raise ValidationError("a partition needs at least one feature")
        if a.min() < 0:
            raise ValidationError("group indices must be nonnegative")
        K = int(a.max()) + 1
        members = tuple(np.flatnonzero(a == k) for k in range(K))
        return cls(a, members, tuple(names))

    @classmethod
    def from_groups(cls, groups: Sequence[Sequence[int]], names: Sequence[str] = ()):
        """Build from the list of feature indices of each group (0-based)."""
        M = sum(len(g) for g in groups)
        a = np.full(M, -1, dtype=np.intp)
        for k, group in enumerate(groups):
            for m in group:
                if not 0 <= m < M:
                    raise ValidationError(f"feature index {m} out of range 0..{M - 1}")
                if a[m] != -1:
                    raise ValidationError(f"feature {m} appears in more than one group")
                a[m] = k
        if np.any(a < 0):
            raise ValidationError("feature indices must cover 0..M-1 without gaps")
        return cls(a, tuple(np.asarray(g, dtype=np.intp) for g in groups), tuple(names))

    @property
    def n_features(self) -> int:
        return int(self.assignments.size)

    @property
    def n_groups(self) -> int:
        return len(self.members)

    @property
    def sizes(self) -> np.ndarray:
        return np.array([g.size for g in self.members])

    def matrix(self) -> np.ndarray:
        """The ``M x K`` 0/1 membership matrix."""
        P = np.zeros((self.n_features, self.n_groups))
        P[np.arange(self.n_features), self.assignments] = 1.0
        return P

    def group_sums(self, v) -> np.ndarray:
        """Per-group sums of a length-``M`` vector (``P^T v``)."""
        return np.bincount(
            self.assignments, weights=np.asarray(v, dtype=float), minlength=self.n_groups
        )

    def group_names(self) -> tuple[str, ...]:
        return self.names or tuple(f"group{k}" for k in range(self.n_groups))

    def renamed(self, names: Sequence[str]) -> "Partition":
        return Partition(self.assignments, self.members, tuple(names))

    def with_group(self, name: str | None = None) -> "Partition":
        """Append one feature forming a new singleton group."""
        M, K = self.n_features, self.n_groups
        names = ()
        if self.names:
            names = self.names + (name or f"group{K}",)
        return Partition(
            np.append(self.assignments, K),
            self.members + (np.array([M]),),
            names,
        )


@dataclass(frozen=True)
class Dataset:
    """Design matrix ``X`` (``N x M``) and target ``y`` (``N``)."""

    X: np.ndarray
    y: np.ndarray
    homogeneous: bool = False

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if X.ndim != 2 or y.ndim != 1:
            raise DimensionError(f"expected 2-D X and 1-D y, got {X.shape} and {y.shape}")
        if X.shape[0] != y.shape[0]:
            raise DimensionError(f"X has {X.shape[0]} rows but y has {y.shape[0]} entries")
        if X.shape[0] < 1 or X.shape[1] < 1:
            raise DimensionError(f"X must be non-empty, got shape {X.shape}")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise DimensionError("dataset contains non-finite values")
        if self.homogeneous and not np.all(X[:, -1] == 1.0):
            raise ValidationError("homogeneous dataset must end with a column of ones")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class RawSolution:
    """Sign-vector parameterization: ``alpha >= 0`` and ``b`` in ``{-1, +1}^K``."""

    alpha: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if np.any(alpha < 0):
            raise ValidationError("raw alpha must be nonnegative")
        if not np.all(np.abs(b) == 1.0):
            raise ValidationError("sign vector entries must be -1 or +1")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "b", b)


@dataclass(frozen=True)
class Model:
    """Fitted model: per-group distributions ``alpha`` and group weights ``beta``."""

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alpha", np.asarray(self.alpha, dtype=float))
        object.__setattr__(self, "beta", np.asarray(self.beta, dtype=float))

    def to_raw(self, partition: Partition) -> RawSolution:
        """Inverse of :func:`renormalize`: fold ``|beta|`` back into ``alpha``."""
        b = np.where(self.beta < 0, -1.0, 1.0)
        alpha = np.abs(self.beta)[partition.assignments] * self.alpha
        return RawSolution(np.maximum(alpha, 0.0), b)


@dataclass(frozen=True)
class FitConfig:
    """Solver settings.

    Attributes
    ----------
    eta : float
        Ridge penalty on the group weights.
    iterations : int
        Alternating iterations per restart.
    restarts : int
        Number of random restarts for the alternating solver.
    seed : int
        Base RNG seed; restart ``r`` uses ``seed + r``.
    tol : float
        Numerical tolerance (NNLS stopping rule, violation test, early exit).
    node_limit : int
        Branch-and-bound node cap.
    enum_cap : int
        Largest group count the exhaustive solver accepts.
    early_stop : bool
        Let the alternating solver stop once the objective stalls.
    threads : int
        Worker threads for independent restarts or sign vectors.
    """

    eta: float = 0.0
    iterations: int = 20
    restarts: int = 1
    seed: int = 0
    tol: float = 1e-10
    node_limit: int = 100_000
    enum_cap: int = 25
    early_stop: bool = False
    threads: int = 1

    def __post_init__(self):
        if not (np.isfinite(self.eta) and self.eta >= 0):
            raise ValidationError(f"eta must be >= 0, got {self.eta}")
        if self.iterations < 1:
            raise ValidationError(f"iterations must be >= 1, got {self.iterations}")
        if self.restarts < 1:
            raise ValidationError(f"restarts must be >= 1, got {self.restarts}")
        if not self.tol > 0:
            raise ValidationError(f"tol must be > 0, got {self.tol}")
        if self.node_limit < 1:
            raise ValidationError(f"node_limit must be >= 1, got {self.node_limit}")
        if self.enum_cap < 0:
            raise ValidationError(f"enum_cap must be >= 0, got {self.enum_cap}")
        if self.threads < 1:
            raise ValidationError(f"threads must be >= 1, got {self.threads}")


@dataclass
class FitReport:
    """Outcome of a solver run."""

    solver: str
    objective: float
    model: Model
    seconds: float
    optimal: bool = True
    iterations: int = 0
    subproblems: int = 0
    nodes: int = 0
    pruned: int = 0
    restarts: int = 0
    failures: list = field(default_factory=list)

    def diagnostics(self) -> dict:
        return {
            "optimal": self.optimal,
            "iterations": self.iterations,
            "subproblems": self.subproblems,
            "nodes": self.nodes,
            "pruned": self.pruned,
            "restarts": self.restarts,
            "failures": list(self.failures),
        }


def _check_model_shapes(model: Model, partition: Partition):
    if model.alpha.shape != (partition.n_features,):
        raise DimensionError(
            f"alpha has shape {model.alpha.shape}, expected ({partition.n_features},)"
        )
    if model.beta.shape != (partition.n_groups,):
        raise DimensionError(
            f"beta has shape {model.beta.shape}, expected ({partition.n_groups},)"
        )


def predict(model: Model, partition: Partition, X) -> np.ndarray:
    """Predictions ``X (P o alpha) beta``."""
    X = np.asarray(X, dtype=float)
    _check_model_shapes(model, partition)
    if X.ndim != 2 or X.shape[1] != partition.n_features:
        raise DimensionError(
            f"X has shape {X.shape}, expected (*, {partition.n_features})"
        )
    weights = model.alpha * model.beta[partition.assignments]
    return X @ weights


def objective(model: Model, partition: Partition, data: Dataset, eta: float = 0.0) -> float:
    """Squared residual norm plus ``eta * ||beta||^2``."""
    r = predict(model, partition, data.X) - data.y
    return float(r @ r + eta * (model.beta @ model.beta))


def raw_predict(raw: RawSolution, partition: Partition, X) -> np.ndarray:
    """Predictions of the sign-vector form, ``X (P o alpha) b``."""
    X = np.asarray(X, dtype=float)
    return X @ (raw.alpha * raw.b[partition.assignments])


def renormalize(raw: RawSolution, partition: Partition) -> Model:
    """Convert ``(alpha, b)`` into an equivalent normalized :class:`Model`.

    Each group's total weight becomes ``|beta_k|``; groups with zero total
    weight get a uniform distribution and ``beta_k = 0``.
    """
    if raw.alpha.shape != (partition.n_features,) or raw.b.shape != (partition.n_groups,):
        raise DimensionError("raw solution does not match the partition")
    totals = partition.group_sums(raw.alpha)
    per_feature = totals[partition.assignments]
    uniform = 1.0 / partition.sizes[partition.assignments]
    safe = np.where(per_feature > 0, per_feature, 1.0)
    alpha_hat = np.where(per_feature > 0, raw.alpha / safe, uniform)
    return Model(alpha_hat, raw.b * totals)


@dataclass(frozen=True)
class Feasibility:
    passed: bool
    min_alpha: float
    max_deviation: float


def validate(model: Model, partition: Partition, tol: float = DEFAULT_FEASIBILITY_TOL) -> Feasibility:
    """Check nonnegativity and sum-to-one of every group's weights."""
    _check_model_shapes(model, partition)
    min_alpha = float(model.alpha.min())
    deviation = float(np.max(np.abs(partition.group_sums(model.alpha) - 1.0)))
    return Feasibility(min_alpha >= -tol and deviation <= tol, min_alpha, deviation)


def to_homogeneous(
    data: Dataset, partition: Partition, name: str | None = None
) -> tuple[Dataset, Partition]:
    """Append a column of ones forming its own group (the intercept)."""
    if data.homogeneous:
        raise ValidationError("dataset is already homogeneous")
    if data.n_features != partition.n_features:
        raise DimensionError("dataset and partition disagree on the feature count")
    X = np.hstack([data.X, np.ones((data.n_samples, 1))])
    return Dataset(X, data.y, homogeneous=True), partition.with_group(name)
