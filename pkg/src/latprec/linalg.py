"""Dense floating-point kernels: cyclic Jacobi eigensolver and the geometric mean decomposition."""
from __future__ import annotations

import math

import numpy as np

from .errors import NumericalError

JACOBI_TOL = 1e-12
MAX_SWEEPS = 100


def jacobi_eigh(A, tol: float = JACOBI_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and orthonormal eigenvectors of a symmetric matrix.

    Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
    ``tol`` times the matrix norm.  Columns of the returned V are eigenvectors.
    """
    A = np.array(A, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("matrix must be square")
    if not np.allclose(A, A.T, rtol=0, atol=1e-12 * max(1.0, np.abs(A).max(initial=0))):
        raise ValueError("matrix is not symmetric")
    A = 0.5 * (A + A.T)
    V = np.eye(n)
    scale = max(np.linalg.norm(A), 1e-300)
    for _ in range(MAX_SWEEPS):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(1.0, theta))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                J = np.array([[c, s], [-s, c]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ J
                A[idx, :] = J.T @ A[idx, :]
                A[p, q] = A[q, p] = 0.0
                V[:, idx] = V[:, idx] @ J
    else:
        raise NumericalError("Jacobi iteration did not converge")
    w = np.diag(A).copy()
    order = np.argsort(-w, kind="stable")
    return w[order], V[:, order]


def gmd(s) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Geometric mean decomposition of diag(s).

    Returns orthogonal W, F and upper-triangular R with W @ diag(s) @ F = R and
    every diagonal entry of R equal to the geometric mean of ``s``.  Each of the
    N-1 steps swaps a diagonal entry above the mean and one below it next to
    each other and equalizes the first with a pair of 2x2 rotations.
    """
    s = np.asarray(s, dtype=float)
    n = len(s)
    if n == 0 or np.any(s <= 0):
        raise ValueError("singular values must be positive")
    rho = math.exp(np.mean(np.log(s)))
    R = np.diag(s)
    Q = np.eye(n)
    P = np.eye(n)

    def swap(i, j):
        if i == j:
            return
        perm = list(range(n))
        perm[i], perm[j] = j, i
        R[:] = R[np.ix_(perm, perm)]
        Q[:] = Q[:, perm]
        P[:] = P[:, perm]

    for k in range(n - 1):
        d = np.diag(R)[k:]
        p = k + int(np.argmax(d))
        swap(k, p)
        d = np.diag(R)[k + 1:]
        q = k + 1 + int(np.argmin(d))
        swap(k + 1, q)
        d1, d2 = R[k, k], R[k + 1, k + 1]
        if abs(d1 - d2) <= 1e-15 * d1:
            c, sn = 1.0, 0.0
        else:
            c2 = (rho * rho - d2 * d2) / (d1 * d1 - d2 * d2)
            c = math.sqrt(min(max(c2, 0.0), 1.0))
            sn = math.sqrt(1.0 - c * c)
        G2 = np.array([[c, -sn], [sn, c]])
        # left rotation built from the rotated first column so that R[k+1, k] vanishes
        idx = [k, k + 1]
        R[:, idx] = R[:, idx] @ G2
        a, b = R[k, k], R[k + 1, k]
        r = math.hypot(a, b)
        G1 = np.array([[a / r, -b / r], [b / r, a / r]])
        R[idx, :] = G1.T @ R[idx, :]
        R[k + 1, k] = 0.0
        Q[:, idx] = Q[:, idx] @ G1
        P[:, idx] = P[:, idx] @ G2
    # the remaining diagonal may carry a sign from the rotations; flip it into Q
    for i in range(n):
        if R[i, i] < 0:
            R[i, :] = -R[i, :]
            Q[:, i] = -Q[:, i]
    return Q.T, P, R
