"""Brute-force reference solvers, independent of the package's QR/active-set code.

They rely only on Gaussian elimination written out here and on SVD-based
``numpy.linalg.lstsq``; nothing imports ``partls.linalg``.
"""

import itertools

import numpy as np


def gauss_solve(M, v):
    """Solve a square system by Gaussian elimination with partial pivoting."""
    A = np.array(M, dtype=float)
    b = np.array(v, dtype=float)
    n = len(b)
    for col in range(n):
        piv = col + int(np.argmax(np.abs(A[col:, col])))
        if A[piv, col] == 0.0:
            raise np.linalg.LinAlgError("singular system")
        A[[col, piv]] = A[[piv, col]]
        b[[col, piv]] = b[[piv, col]]
        for row in range(col + 1, n):
            f = A[row, col] / A[col, col]
            A[row, col:] -= f * A[col, col:]
            b[row] -= f * b[col]
    x = np.zeros(n)
    for row in range(n - 1, -1, -1):
        x[row] = (b[row] - A[row, row + 1:] @ x[row + 1:]) / A[row, row]
    return x


def normal_equations(A, y):
    A = np.asarray(A, dtype=float)
    return gauss_solve(A.T @ A, A.T @ np.asarray(y, dtype=float))


def sse(A, x, y):
    r = np.asarray(A) @ x - np.asarray(y)
    return float(r @ r)


def nnls_enum(A, y, feas_tol=1e-12):
    """NNLS by enumerating every support set.

    For each subset ``S`` of columns the unconstrained least-squares problem on
    ``S`` is solved; the best solution with ``x_S >= 0`` wins. Exponential in
    the column count.
    """
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float)
    m = A.shape[1]
    best_val, best_x = float(y @ y), np.zeros(m)
    for r in range(1, m + 1):
        for S in itertools.combinations(range(m), r):
            S = list(S)
            xs = np.linalg.lstsq(A[:, S], y, rcond=None)[0]
            if np.any(xs < -feas_tol):
                continue
            x = np.zeros(m)
            x[S] = np.maximum(xs, 0.0)
            val = sse(A, x, y)
            if val < best_val:
                best_val, best_x = val, x
    return best_val, best_x


def partls_enum(X, y, assignments, rho=0.0):
    """Global optimum over every sign vector and every NNLS support set."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    assignments = np.asarray(assignments)
    K = int(assignments.max()) + 1
    if rho > 0:
        P = np.zeros((K, X.shape[1]))
        P[assignments, np.arange(X.shape[1])] = np.sqrt(rho)
        X = np.vstack([X, P])
        y = np.concatenate([y, np.zeros(K)])
    best = np.inf
    for b in itertools.product((-1.0, 1.0), repeat=K):
        val, _ = nnls_enum(X * np.array(b)[assignments], y)
        best = min(best, val)
    return best


def subset_sum_direct(s):
    """Yes/no by trying every two-way split."""
    total = sum(s)
    return any(
        2 * sum(v for v, side in zip(s, mask) if side) == total
        for mask in itertools.product((0, 1), repeat=len(s))
    )


def reduction_objective(s, rho, alpha):
    """The reduction instance's objective written out term by term.

    ``alpha`` holds ``(first, second)`` of each group interleaved. The per-group
    residual is ``first - second + s_k`` because the generated targets are
    ``-s_k``.
    """
    s = np.asarray(s, dtype=float)
    a1, a2 = np.asarray(alpha)[0::2], np.asarray(alpha)[1::2]
    return float(
        np.sum((a1 - a2 + s) ** 2)
        + rho * np.sum(a1 ** 2)
        + rho * np.sum(a2 ** 2)
        + np.sum(a1 + a2) ** 2
    )


def single_value_optimum(s, rho):
    """Optimum of the one-integer reduction by orthant-wise stationarity.

    The objective is ``(a1 - a2 + s)^2 + rho*a1^2 + rho*a2^2 + (a1 + a2)^2``
    with ``a1, a2`` of a common sign. Inside each face of the two orthants the
    minimizer solves the 2x2 (or 1x1) stationarity system; faces whose
    solution leaves the orthant are discarded.
    """
    def f(a1, a2):
        return (a1 - a2 + s) ** 2 + rho * a1 ** 2 + rho * a2 ** 2 + (a1 + a2) ** 2

    # Gradient / 2: [(2 + rho) a1 + s, (2 + rho) a2 - s]; the cross terms cancel.
    h = 2.0 + rho
    candidates = [(0.0, 0.0), (-s / h, 0.0), (0.0, s / h), (-s / h, s / h)]
    best = np.inf
    for a1, a2 in candidates:
        if a1 * a2 >= 0:
            best = min(best, f(a1, a2))
    return best
