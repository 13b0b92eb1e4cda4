"""Dense least-squares kernels.

Every solver in the package reduces its subproblems to one of three
problems, solved here:

* ``ols_solve``: unconstrained least squares, minimum-norm when rank deficient;
* ``nnls_solve``: least squares under elementwise nonnegativity
  (Lawson-Hanson active set);
* ``mixed_sign_ls``: per-column sign constraints, reduced to NNLS.

All functions are pure and thread-safe.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import DimensionError, IterationLimitError

NONNEG = "nonneg"
NONPOS = "nonpos"
FREE = "free"
SIGN_STATES = (NONNEG, NONPOS, FREE)

DEFAULT_NNLS_TOL = 1e-10


def _as_system(A, y):
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float)
    if A.ndim != 2:
        raise DimensionError(f"design matrix must be 2-D, got shape {A.shape}")
    if y.ndim != 1:
        raise DimensionError(f"target must be 1-D, got shape {y.shape}")
    if A.shape[0] != y.shape[0]:
        raise DimensionError(
            f"design has {A.shape[0]} rows but target has length {y.shape[0]}"
        )
    if A.shape[0] < 1 or A.shape[1] < 1:
        raise DimensionError(f"design matrix must be non-empty, got shape {A.shape}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(y))):
        raise DimensionError("inputs contain non-finite values")
    return A, y


def ols_solve(A, y, rcond: float | None = None) -> np.ndarray:
    """Minimum-norm solution of ``min ||A w - y||^2``.

    Uses QR with column pivoting. When the numerical rank ``r`` is below the
    column count, the leading ``r`` rows of ``R`` are compressed with a second
    QR (a complete orthogonal decomposition) so that the returned vector is
    the minimum-norm minimizer.

    Parameters
    ----------
    A : array_like, shape (n, m)
    y : array_like, shape (n,)
    rcond : float, optional
        Relative threshold on ``|R_ii| / |R_00|`` below which a pivot is
        treated as zero. Defaults to ``max(n, m) * eps``.
    """
    A, y = _as_system(A, y)
    return _min_norm_lstsq(A, y, rcond)


def _min_norm_lstsq(A, y, rcond=None):
    # Unchecked core of ols_solve; callers validate.
    n, m = A.shape
    if rcond is None:
        rcond = max(n, m) * np.finfo(float).eps

    Q, R, piv = scipy.linalg.qr(A, mode="economic", pivoting=True, check_finite=False)
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag[0] == 0.0:
        return np.zeros(m)
    rank = int(np.count_nonzero(diag > rcond * diag[0]))
    qty = Q[:, :rank].T @ y

    if rank == m:
        z = scipy.linalg.solve_triangular(R[:m, :m], qty, check_finite=False)
    else:
        # R[:rank] = S^T Z^T with Z orthonormal (m x rank), S upper triangular.
        Z, S = scipy.linalg.qr(R[:rank, :].T, mode="economic", check_finite=False)
        u = scipy.linalg.solve_triangular(S, qty, trans="T", check_finite=False)
        z = Z @ u

    w = np.empty(m)
    w[piv] = z
    return w


def reduce_least_squares(A, y):
    """Compress a tall system to a square one with the same objective.

    Returns ``(R, c, offset)`` with ``||A x - y||^2 = ||R x - c||^2 + offset``
    for every ``x``. Systems with no more rows than columns are returned
    unchanged with a zero offset.
    """
    A, y = _as_system(A, y)
    n, m = A.shape
    if n <= m:
        return A, y, 0.0
    Q, R = scipy.linalg.qr(A, mode="economic", check_finite=False)
    c = Q.T @ y
    offset = float(y @ y - c @ c)
    return R, c, max(offset, 0.0)


def nnls_solve(
    A,
    y,
    tol: float = DEFAULT_NNLS_TOL,
    max_iter: int | None = None,
) -> np.ndarray:
    """Solve ``min ||A x - y||^2`` subject to ``x >= 0``.

    Lawson-Hanson active-set iteration. Tall systems are first compressed with
    :func:`reduce_least_squares`; inner unconstrained solves go through
    :func:`ols_solve`.

    Parameters
    ----------
    A : array_like, shape (n, m)
    y : array_like, shape (n,)
    tol : float
        Stopping tolerance on the dual (negative half-gradient), relative to
        ``||A^T y||_inf``.
    max_iter : int, optional
        Cap on outer iterations (variables entering the passive set).
        Defaults to ``10 * m``.

    Raises
    ------
    IterationLimitError
        If the cap is reached before the KKT conditions hold.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    A, y = _as_system(A, y)
    m = A.shape[1]
    if max_iter is None:
        max_iter = 10 * m
    A, y, _ = reduce_least_squares(A, y)

    scale = float(np.max(np.abs(A.T @ y)))
    tol_abs = tol * max(scale, np.finfo(float).tiny)

    x = np.zeros(m)
    passive = np.zeros(m, dtype=bool)
    blocked = np.zeros(m, dtype=bool)
    w = A.T @ y
    iterations = 0

    while True:
        candidates = ~passive & ~blocked
        if not candidates.any():
            break
        w_cand = np.where(candidates, w, -np.inf)
        j = int(np.argmax(w_cand))
        if w_cand[j] <= tol_abs:
            break
        iterations += 1
        if iterations > max_iter:
            raise IterationLimitError(
                f"NNLS did not converge within {max_iter} iterations "
                "(the system is likely ill-conditioned)"
            )

        passive[j] = True
        z = np.zeros(m)
        z[passive] = _min_norm_lstsq(A[:, passive], y)
        if z[j] <= 0.0:
            # Roundoff made the entering variable non-positive; skip it until
            # the iterate moves again.
            passive[j] = False
            blocked[j] = True
            continue

        while np.any(z[passive] <= 0.0):
            bad = passive & (z <= 0.0)
            ratios = x[bad] / (x[bad] - z[bad])
            step = float(np.min(ratios))
            x = x + step * (z - x)
            leaving = np.flatnonzero(bad)[np.argmin(ratios)]
            x[leaving] = 0.0
            passive &= x > 0.0
            x[~passive] = 0.0
            z = np.zeros(m)
            if passive.any():
                z[passive] = _min_norm_lstsq(A[:, passive], y)

        x = z
        blocked[:] = False
        w = A.T @ (y - A @ x)

    return x


def mixed_sign_ls(
    A,
    y,
    sign_spec: Sequence[str],
    tol: float = DEFAULT_NNLS_TOL,
    max_iter: int | None = None,
) -> np.ndarray:
    """Least squares with a per-column sign constraint.

    Each entry of ``sign_spec`` is ``"nonneg"``, ``"nonpos"`` or ``"free"``.
    Non-positive columns are negated and free columns split as
    ``x = x_plus - x_minus``, giving an equivalent NNLS problem.
    """
    A, y = _as_system(A, y)
    m = A.shape[1]
    spec = list(sign_spec)
    if len(spec) != m:
        raise DimensionError(f"sign_spec has {len(spec)} entries for {m} columns")
    unknown = set(spec) - set(SIGN_STATES)
    if unknown:
        raise ValueError(f"unknown sign constraint(s): {sorted(unknown)}")

    if all(s == FREE for s in spec):
        return ols_solve(A, y)
    if all(s == NONNEG for s in spec):
        return nnls_solve(A, y, tol=tol, max_iter=max_iter)

    sign = np.array([-1.0 if s == NONPOS else 1.0 for s in spec])
    free = np.flatnonzero(np.array([s == FREE for s in spec]))
    B = np.hstack([A * sign, -A[:, free]])
    if max_iter is None:
        max_iter = 10 * B.shape[1]
    u = nnls_solve(B, y, tol=tol, max_iter=max_iter)
    x = sign * u[:m]
    x[free] -= u[m:]
    return x
