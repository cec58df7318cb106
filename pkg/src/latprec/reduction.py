"""Minkowski reduction of positive definite forms and the B = U L Z factorization."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import exact
from .errors import DimError, OrthogonalityCheckFailed
from .lattice import (GeneratorMatrix, QuadraticForm, UnimodularMatrix,
                      generator_of, gram_of, min_distance, shortest_vectors)

MAX_REDUCE_DIM = 12


@dataclass(frozen=True, eq=False)
class MinkowskiFactorization:
    U: np.ndarray
    L: GeneratorMatrix
    Z: UnimodularMatrix
    G_L: QuadraticForm  # exact reduced Gram; Lᵀ L matches it to rounding

    @property
    def gram_L(self) -> QuadraticForm:
        return self.G_L

    def product(self) -> np.ndarray:
        return self.U @ self.L.columns @ self.Z.array


def _extend(W, i, w):
    """New basis matrix whose first i columns agree with W and whose column i is W @ w."""
    n = len(W)
    V, _ = exact.complete_to_unimodular(w[i:])
    T = [[int(r == c) for c in range(n)] for r in range(n)]
    for r in range(i):
        T[r][i] = w[r]
    for r in range(i, n):
        for c in range(i, n):
            T[r][c] = V[r - i][c - i]
    return exact.matmul(W, T)


def _tie_key(item):
    # among equal values prefer sparse vectors supported on early coordinates,
    # so an already reduced form comes back with Z = ±I
    x, v = item
    return (v, sum(map(abs, x)), tuple(-abs(c) for c in x), x)


def minkowski_reduce(G: QuadraticForm) -> tuple[QuadraticForm, UnimodularMatrix]:
    """Greedy Minkowski reduction.

    Returns ``(G_L, Z)`` with ``G = Zᵀ G_L Z`` exactly.  Column i of the new
    basis is the shortest vector that extends the previous columns to a basis
    of Z^N (among equal lengths, sparse vectors on early coordinates first),
    then signs are flipped left to right so that every g_{i,i+1} >= 0.
    """
    n = G.dim
    if n > MAX_REDUCE_DIM:
        raise DimError(f"Minkowski reduction is capped at N = {MAX_REDUCE_DIM}")
    W = [[int(r == c) for c in range(n)] for r in range(n)]
    Winv = [row[:] for row in W]
    bound = min_distance(G).form_min
    for i in range(n):
        pick = None
        while pick is None:
            for x, v in sorted(shortest_vectors(G, bound), key=_tie_key):
                w = [sum(Winv[r][c] * x[c] for c in range(n)) for r in range(n)]
                if exact.vec_gcd(w[i:]) == 1:
                    pick = (w, v)
                    break
            else:
                bound *= 2
        w, v = pick
        W = _extend(W, i, w)
        Winv = exact.int_inverse(W)
        bound = v
    C = W
    for i in range(1, n):
        GL = G.transform(C).matrix
        if GL[i - 1][i] < 0:
            for r in range(n):
                C[r][i] = -C[r][i]
    G_L = G.transform(C)
    Z = UnimodularMatrix(tuple(map(tuple, exact.int_inverse(C))))
    return G_L, Z


def is_minkowski_reduced(G: QuadraticForm, box: int = 3) -> bool:
    """Check both reduction conditions; condition (i) only over vectors with max-norm <= box.

    A radius-limited check: a True answer is a certificate only up to ``box``.
    """
    n = G.dim
    A = G.matrix
    if any(A[i][i + 1] < 0 for i in range(n - 1)):
        return False
    if any(A[i][i] > A[i + 1][i + 1] for i in range(n - 1)):
        return False
    M, d = G.num_den
    rng = range(-box, box + 1)
    V = np.array([x for x in itertools.product(rng, repeat=n) if any(x)], dtype=np.int64)
    Mmax = max(abs(x) for row in M for x in row)
    if Mmax * box * box * n * n < 2**62:
        vals = np.einsum("ki,ij,kj->k", V, np.array(M, dtype=np.int64), V)
    else:
        Mo = np.array(M, dtype=object)
        vals = np.array([int(x @ Mo @ x) for x in V.astype(object)], dtype=object)
    suffix = np.abs(V[:, n - 1])
    for i in range(n - 1, -1, -1):
        if i < n - 1:
            suffix = np.gcd(suffix, np.abs(V[:, i]))
        gii = A[i][i] * d  # integer since d is the common denominator
        mask = suffix == 1
        if mask.any() and np.any(vals[mask] < int(gii)):
            return False
    return True


def factorize_ULZ(B) -> MinkowskiFactorization:
    """B = U L Z with U orthogonal, L Minkowski reduced (upper triangular), Z unimodular."""
    if not isinstance(B, GeneratorMatrix):
        B = GeneratorMatrix(np.asarray(B, dtype=float))
    G_B = gram_of(B)
    G_L, Z = minkowski_reduce(G_B)
    L = generator_of(G_L)
    Zinv = np.array(Z.inverse().entries, dtype=float)
    U = B.columns @ Zinv @ np.linalg.inv(L.columns)
    err = np.max(np.abs(U.T @ U - np.eye(B.dim)))
    if err > 1e-9:
        raise OrthogonalityCheckFailed(f"UᵀU deviates from I by {err:.3g}")
    return MinkowskiFactorization(U, L, Z, G_L)
