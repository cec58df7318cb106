"""Small exact linear-algebra kernels over the integers and rationals.

Everything here works on plain nested lists of ``int``/``Fraction`` so that
results are exact; dimensions are tiny (at most a few dozen) so no attempt is
made at asymptotic efficiency.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence


def int_det(M: Sequence[Sequence[int]]) -> int:
    """Determinant of an integer matrix (fraction-free Bareiss elimination)."""
    A = [list(map(int, row)) for row in M]
    n = len(A)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for r in range(k + 1, n):
                if A[r][k] != 0:
                    A[k], A[r] = A[r], A[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = A[k][k]
        for i in range(k + 1, n):
            aik = A[i][k]
            row_i, row_k = A[i], A[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * A[n - 1][n - 1]


def rank(rows: Sequence[Sequence]) -> int:
    """Exact rank of a rational matrix given as a list of rows."""
    A = [[Fraction(x) for x in row] for row in rows]
    if not A:
        return 0
    m, n = len(A), len(A[0])
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        pr = A[r]
        for i in range(r + 1, m):
            if A[i][c] != 0:
                f = A[i][c] / pr[c]
                A[i] = [a - f * b for a, b in zip(A[i], pr)]
        r += 1
        if r == m:
            break
    return r


def inverse(M: Sequence[Sequence]) -> list[list[Fraction]]:
    """Exact inverse of a square rational matrix; raises ZeroDivisionError if singular."""
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(M)]
    for c in range(n):
        piv = next((i for i in range(c, n) if A[i][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        A[c], A[piv] = A[piv], A[c]
        p = A[c][c]
        A[c] = [a / p for a in A[c]]
        for i in range(n):
            if i != c and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return [row[n:] for row in A]


def int_inverse(M: Sequence[Sequence[int]]) -> list[list[int]]:
    """Inverse of a unimodular integer matrix, as integers."""
    inv = inverse(M)
    out = []
    for row in inv:
        if any(x.denominator != 1 for x in row):
            raise ValueError("matrix is not unimodular")
        out.append([int(x) for x in row])
    return out


def matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def transpose(A):
    return [list(col) for col in zip(*A)]


def congruent(G, Z):
    """Zᵀ G Z for list-of-lists matrices."""
    return matmul(transpose(Z), matmul(G, Z))


def ldl_pivots(M: Sequence[Sequence]) -> list[Fraction]:
    """Pivots d_k of the symmetric elimination M = L D Lᵀ (ratios of leading minors).

    Stops at the first non-positive pivot, which is then the last entry.
    """
    A = [[Fraction(x) for x in row] for row in M]
    n = len(A)
    pivots = []
    for k in range(n):
        p = A[k][k]
        pivots.append(p)
        if p <= 0:
            break
        rk = A[k]
        for i in range(k + 1, n):
            f = A[i][k] / p
            if f:
                ri = A[i]
                for j in range(k + 1, n):
                    ri[j] -= f * rk[j]
    return pivots


def is_positive_definite(M: Sequence[Sequence]) -> bool:
    piv = ldl_pivots(M)
    return len(piv) == len(M) and all(p > 0 for p in piv)


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def vec_gcd(v) -> int:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g


def complete_to_unimodular(v: Sequence[int]) -> tuple[list[list[int]], list[list[int]]]:
    """Unimodular ``U`` whose first column is the primitive vector ``v``, and its inverse.

    Built from 2x2 extended-gcd row operations that send ``v`` to ``e_1``;
    ``U`` is the inverse of their product.
    """
    n = len(v)
    a = [int(x) for x in v]
    if vec_gcd(a) != 1:
        raise ValueError(f"vector {v} is not primitive")
    W = [[int(i == j) for j in range(n)] for i in range(n)]   # W @ v == a
    Winv = [[int(i == j) for j in range(n)] for i in range(n)]
    for k in range(n - 1, 0, -1):
        if a[k] == 0:
            continue
        g, s, t = ext_gcd(a[0], a[k])
        p, q = a[0] // g, a[k] // g
        # rows (0, k) <- [[s, t], [-q, p]] @ rows (0, k); det = 1
        r0, rk = W[0], W[k]
        W[0] = [s * x + t * y for x, y in zip(r0, rk)]
        W[k] = [-q * x + p * y for x, y in zip(r0, rk)]
        # inverse acts on columns (0, k) with [[p, -t], [q, s]]
        for row in Winv:
            x, y = row[0], row[k]
            row[0], row[k] = p * x + q * y, -t * x + s * y
        a[0], a[k] = g, 0
    if a[0] == -1:
        W[0] = [-x for x in W[0]]
        for row in Winv:
            row[0] = -row[0]
    return Winv, W
