"""Dense symmetric (generalized) eigenvalue solvers.

The pencil ``(A, B)`` with ``B`` positive definite is reduced to standard
form through a Cholesky factor of the diagonally scaled ``B`` and solved with
a cyclic Jacobi iteration.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import lapack, solve_triangular

from .errors import IllConditionedBasisError

MAX_CONDITION = 1e13


def jacobi_eigh(a, tol=1e-15, max_sweeps=60):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns:
        ``(w, v)`` with ascending eigenvalues and orthonormal eigenvector columns.
    """
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    if n == 1:
        return a.diagonal().copy(), v
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return np.zeros(n), v
    iu = np.triu_indices(n, 1)
    for _ in range(max_sweeps):
        off = math.sqrt(2.0 * float(np.sum(a[iu] ** 2)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app, aqq = a[p, p], a[q, q]
                if abs(apq) <= 1e-18 * (abs(app) + abs(aqq)):
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (aqq - app) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q]
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :]
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    w = a.diagonal().copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def cholesky_scaled(b):
    """Cholesky factor of ``D B D`` with ``D = diag(B)^(-1/2)``.

    Returns:
        ``(L, d, condition)`` where ``L`` is lower triangular and ``d`` the
        diagonal scaling vector.

    Raises:
        IllConditionedBasisError: on a nonpositive pivot or a condition
            estimate at or above ``MAX_CONDITION``.
    """
    b = np.asarray(b, dtype=float)
    diag = b.diagonal()
    bad = np.flatnonzero(~(diag > 0))
    if bad.size:
        raise IllConditionedBasisError(
            f"basis function {bad[0]} has nonpositive norm; reduce the degree or re-center the basis",
            pivot=int(bad[0]))
    d = 1.0 / np.sqrt(diag)
    bs = b * d[:, None] * d[None, :]
    c, info = lapack.dpotrf(bs, lower=1, clean=1)
    if info != 0:
        idx = info - 1
        raise IllConditionedBasisError(
            f"Cholesky pivot {idx} is not positive; reduce the degree or re-center the basis",
            pivot=int(idx))
    anorm = float(np.max(np.sum(np.abs(bs), axis=0)))
    rcond, _ = lapack.dpocon(c, anorm, uplo="L")
    cond = math.inf if rcond == 0 else 1.0 / rcond
    if not cond < MAX_CONDITION:
        pivot = int(np.argmin(np.abs(c.diagonal())))
        raise IllConditionedBasisError(
            f"basis mass matrix condition estimate {cond:.3g} exceeds {MAX_CONDITION:.0e} "
            f"(smallest pivot at index {pivot}); reduce the degree or re-center the basis",
            pivot=pivot, condition=cond)
    return c, d, cond


def sym_generalized_eigen_max(a, b):
    """Largest eigenvalue of ``A x = lam B x`` and its eigenvector.

    The eigenvector is normalized to ``x^T B x = 1``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("A and B must be square matrices of equal size")
    L, d, _ = cholesky_scaled(b)
    As = a * d[:, None] * d[None, :]
    tmp = solve_triangular(L, As, lower=True)
    C = solve_triangular(L, tmp.T, lower=True)
    C = 0.5 * (C + C.T)
    w, V = jacobi_eigh(C)
    y = V[:, -1]
    x = d * solve_triangular(L.T, y, lower=False)
    return float(w[-1]), x


def eigen_residual(a, b, lam, x):
    """``||A x - lam B x|| / ((||A|| + lam ||B||) ||x||)`` in 2-norms."""
    a = np.asarray(a)
    b = np.asarray(b)
    num = np.linalg.norm(a @ x - lam * (b @ x))
    den = (np.linalg.norm(a, 2) + abs(lam) * np.linalg.norm(b, 2)) * np.linalg.norm(x)
    return float(num / den)
