"""Exact lattice primitives: quadratic forms, minimal vectors, isometry tests.

Form entries are kept as ``Fraction`` so that minimal-vector membership and
isometry are decided exactly.  Floating point is only used to drive the
Fincke-Pohst search tree; every candidate it produces is re-checked exactly.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import exact
from .errors import (ConditioningError, DegenerateBasis, DimError,
                     NotPositiveDefinite)

MAX_EIGEN_SPREAD = 1e6
_FP_MARGIN = 1e-6


def to_fraction(x) -> Fraction:
    """Exact conversion; floats are read as their shortest decimal repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (float, np.floating)):
        return Fraction(repr(float(x)))
    if isinstance(x, np.integer):
        return Fraction(int(x))
    return Fraction(x)


def packed_index(n: int, i: int, j: int) -> int:
    """Position of g_{i,j} (i <= j) in the packed upper-triangle vector."""
    if i > j:
        i, j = j, i
    return i * n - i * (i - 1) // 2 + (j - i)


def packed_size(n: int) -> int:
    return n * (n + 1) // 2


def pack(M) -> tuple:
    n = len(M)
    return tuple(M[i][j] for i in range(n) for j in range(i, n))


def unpack(entries: Sequence, n: int) -> list[list]:
    M = [[None] * n for _ in range(n)]
    k = 0
    for i in range(n):
        for j in range(i, n):
            M[i][j] = M[j][i] = entries[k]
            k += 1
    return M


def dim_from_packed(k: int) -> int:
    n = int((math.isqrt(8 * k + 1) - 1) // 2)
    if packed_size(n) != k:
        raise DimError(f"{k} is not a triangular number")
    return n


@dataclass(frozen=True)
class QuadraticForm:
    """Positive definite symmetric form with exact rational entries.

    ``entries`` is the packed upper triangle (g11, g12, ..., g1N, g22, ..., gNN).
    """
    dim: int
    entries: tuple

    def __post_init__(self):
        if self.dim < 1:
            raise DimError("dimension must be positive")
        if len(self.entries) != packed_size(self.dim):
            raise DimError(f"expected {packed_size(self.dim)} packed entries, got {len(self.entries)}")
        object.__setattr__(self, "entries", tuple(to_fraction(x) for x in self.entries))
        if not exact.is_positive_definite(self.matrix):
            raise NotPositiveDefinite(f"form is not positive definite: {self!r}")

    @classmethod
    def from_matrix(cls, M) -> "QuadraticForm":
        M = [[to_fraction(x) for x in row] for row in M]
        n = len(M)
        if any(len(row) != n for row in M):
            raise DimError("matrix is not square")
        for i in range(n):
            for j in range(i + 1, n):
                if M[i][j] != M[j][i]:
                    raise ValueError("matrix is not symmetric")
        return cls(n, pack(M))

    @classmethod
    def from_float(cls, M, max_den: int | None = 10**6) -> "QuadraticForm":
        """Rationalize a float matrix entrywise (upper triangle).

        With ``max_den=None`` every float is taken at its exact binary value.
        """
        M = np.asarray(M, dtype=float)
        n = M.shape[0]
        vals = []
        for i in range(n):
            for j in range(i, n):
                x = 0.5 * (M[i, j] + M[j, i])
                f = Fraction(float(x))
                vals.append(f.limit_denominator(max_den) if max_den else f)
        return cls(n, tuple(vals))

    @cached_property
    def matrix(self) -> tuple:
        return tuple(tuple(r) for r in unpack(self.entries, self.dim))

    @cached_property
    def float_mirror(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.matrix])

    @cached_property
    def num_den(self) -> tuple[tuple[tuple[int, ...], ...], int]:
        """Integer matrix M and common denominator d with G = M / d."""
        d = 1
        for x in self.entries:
            d = d * x.denominator // math.gcd(d, x.denominator)
        M = tuple(tuple(int(x * d) for x in row) for row in self.matrix)
        return M, d

    @property
    def diag(self) -> tuple:
        return tuple(self.matrix[i][i] for i in range(self.dim))

    @cached_property
    def trace(self) -> Fraction:
        return sum(self.diag, Fraction(0))

    @cached_property
    def det(self) -> Fraction:
        d = Fraction(1)
        for p in exact.ldl_pivots(self.matrix):
            d *= p
        return d

    def evaluate(self, x) -> Fraction:
        return quadratic_eval(self, x)

    def inner(self, x, y) -> Fraction:
        M, d = self.num_den
        return Fraction(_bilinear_int(M, x, y), d)

    def scaled(self, c) -> "QuadraticForm":
        c = to_fraction(c)
        if c <= 0:
            raise ValueError("scale must be positive")
        return QuadraticForm(self.dim, tuple(c * x for x in self.entries))

    def transform(self, Z) -> "QuadraticForm":
        """Zᵀ G Z for an integer matrix Z (exact)."""
        Z = _as_int_rows(Z)
        if len(Z) != self.dim:
            raise DimError("dimension mismatch")
        M, d = self.num_den
        P = exact.congruent([list(r) for r in M], Z)
        return QuadraticForm(len(Z[0]), tuple(Fraction(x, d) for x in pack(P)))

    def add(self, T: Sequence, u=1) -> tuple:
        """Packed entries of G + u*T (not necessarily positive definite)."""
        u = to_fraction(u)
        return tuple(g + u * t for g, t in zip(self.entries, T))

    def sort_key(self):
        return (self.trace, self.entries)

    def __repr__(self):
        rows = ", ".join("[" + ", ".join(str(x) for x in row) + "]" for row in self.matrix)
        return f"QuadraticForm([{rows}])"


def _as_int_rows(Z) -> list[list[int]]:
    if isinstance(Z, UnimodularMatrix):
        return [list(r) for r in Z.entries]
    return [[int(x) for x in row] for row in np.asarray(Z, dtype=object).tolist()]


def _bilinear_int(M, x, y) -> int:
    n = len(M)
    return sum(x[i] * sum(M[i][j] * y[j] for j in range(n)) for i in range(n) if x[i])


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    """Real non-singular basis; columns are the basis vectors."""
    columns: np.ndarray

    def __post_init__(self):
        B = np.array(self.columns, dtype=float)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise DimError("generator matrix must be square")
        scale = float(np.prod(np.linalg.norm(B, axis=0)))
        if scale == 0.0 or abs(np.linalg.det(B)) < 1e-12 * scale:
            raise DegenerateBasis("generator matrix is singular")
        B.setflags(write=False)
        object.__setattr__(self, "columns", B)

    @property
    def dim(self) -> int:
        return self.columns.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.columns, dtype=dtype)


@dataclass(frozen=True)
class UnimodularMatrix:
    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.entries)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise DimError("unimodular matrix must be square")
        if exact.int_det(rows) not in (1, -1):
            raise ValueError("matrix is not unimodular")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def identity(cls, n: int) -> "UnimodularMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def det(self) -> int:
        return exact.int_det(self.entries)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64)

    def columns(self) -> list[tuple[int, ...]]:
        return [tuple(c) for c in zip(*self.entries)]

    def inverse(self) -> "UnimodularMatrix":
        return UnimodularMatrix(tuple(map(tuple, exact.int_inverse(self.entries))))

    def __matmul__(self, other: "UnimodularMatrix") -> "UnimodularMatrix":
        return UnimodularMatrix(tuple(map(tuple, exact.matmul(self.entries, other.entries))))

    def trace_zzt(self) -> int:
        return sum(x * x for row in self.entries for x in row)


@dataclass(frozen=True)
class MinVecSet:
    """Minimum value of a form and its attaining vectors, one per ± pair."""
    form_min: Fraction
    vectors: tuple

    def __len__(self):
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def both_signs(self) -> list[tuple[int, ...]]:
        return [v for x in self.vectors for v in (x, tuple(-c for c in x))]


@dataclass(frozen=True)
class IsometryWitness:
    """G1 = scale * Zᵀ G2 Z."""
    scale: Fraction
    map: UnimodularMatrix


def canonical_sign(x: Sequence[int]) -> tuple[int, ...]:
    """Representative of ±x whose first nonzero entry is positive."""
    for c in x:
        if c:
            return tuple(x) if c > 0 else tuple(-v for v in x)
    return tuple(x)


def gram_of(B) -> QuadraticForm:
    """Gram matrix Bᵀ B of a basis, converted exactly from its floating value."""
    if not isinstance(B, GeneratorMatrix):
        B = GeneratorMatrix(np.asarray(B, dtype=float))
    Bm = B.columns
    return QuadraticForm.from_float(Bm.T @ Bm, max_den=None)


def quadratic_eval(G: QuadraticForm, x) -> Fraction:
    x = [int(v) for v in x]
    if len(x) != G.dim:
        raise DimError(f"vector of length {len(x)} for a form of dimension {G.dim}")
    M, d = G.num_den
    return Fraction(_bilinear_int(M, x, x), d)


def _check_conditioning(G: QuadraticForm) -> np.ndarray:
    w = np.linalg.eigvalsh(G.float_mirror)
    if w[0] <= 0 or w[-1] / w[0] > MAX_EIGEN_SPREAD:
        raise ConditioningError(f"eigenvalue spread {w[-1] / max(w[0], 1e-300):.3g} exceeds {MAX_EIGEN_SPREAD:g}")
    return w


def _fincke_pohst(Gf: np.ndarray, bound: float) -> Iterator[tuple[int, ...]]:
    """Integer x != 0 with xᵀGx <= bound (float test), last nonzero coordinate positive."""
    n = Gf.shape[0]
    R = np.linalg.cholesky(Gf).T
    q = [float(R[i, i]) ** 2 for i in range(n)]
    mu = [[float(R[i, j] / R[i, i]) for j in range(n)] for i in range(n)]
    x = [0] * n

    def rec(i, rem, zero_tail):
        c = -sum(mu[i][j] * x[j] for j in range(i + 1, n))
        r = math.sqrt(max(rem, 0.0) / q[i])
        lo, hi = math.ceil(c - r), math.floor(c + r)
        if zero_tail:
            lo = max(lo, 0 if i > 0 else 1)
        for v in range(lo, hi + 1):
            t = v - c
            used = q[i] * t * t
            if used > rem:
                continue
            x[i] = v
            if i == 0:
                yield tuple(x)
            else:
                yield from rec(i - 1, rem - used, zero_tail and v == 0)
        x[i] = 0

    yield from rec(n - 1, bound, True)


def shortest_vectors(G: QuadraticForm, bound) -> list[tuple[tuple[int, ...], Fraction]]:
    """All nonzero integer x with G[x] <= bound, one per ± pair, with exact values.

    Sorted by value, then lexicographically; each vector has its first
    nonzero entry positive.
    """
    if not isinstance(G, QuadraticForm):
        raise NotPositiveDefinite("shortest_vectors needs a positive definite QuadraticForm")
    bound = to_fraction(bound)
    if bound <= 0:
        return []
    _check_conditioning(G)
    fb = float(bound)
    M, d = G.num_den
    lim = bound * d
    out = []
    for x in _fincke_pohst(G.float_mirror, fb + _FP_MARGIN * max(1.0, fb)):
        v = _bilinear_int(M, x, x)
        if v <= lim:
            out.append((canonical_sign(x), Fraction(v, d)))
    out.sort(key=lambda t: (t[1], t[0]))
    return out


def min_distance(G: QuadraticForm) -> MinVecSet:
    """Minimum of G over nonzero integer vectors and all attaining ± pairs."""
    cands = shortest_vectors(G, min(G.diag))
    lam = cands[0][1]
    return MinVecSet(lam, tuple(x for x, v in cands if v == lam))


def successive_minimum_2(G: QuadraticForm) -> Fraction:
    """Smallest value of G above its minimum (value-based second minimum)."""
    lam = min_distance(G).form_min
    bound = 2 * lam
    while True:
        vals = [v for _, v in shortest_vectors(G, bound) if v > lam]
        if vals:
            return min(vals)
        bound *= 2


def volume(B) -> float:
    if not isinstance(B, GeneratorMatrix):
        B = GeneratorMatrix(np.asarray(B, dtype=float))
    return float(abs(np.linalg.det(B.columns)))


def generator_of(G: QuadraticForm) -> GeneratorMatrix:
    """Upper-triangular L with Lᵀ L = G (Cholesky factor)."""
    try:
        C = np.linalg.cholesky(G.float_mirror)
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefinite(str(e)) from None
    return GeneratorMatrix(C.T)


def brute_force_min(G: QuadraticForm, box: int) -> Fraction:
    """Minimum of G[x] over nonzero x with max-norm <= box (testing oracle)."""
    n = G.dim
    M, d = G.num_den
    rng = range(-box, box + 1)
    V = np.array([x for x in itertools.product(rng, repeat=n) if any(x)], dtype=np.int64)
    Mmax = max(abs(v) for row in M for v in row)
    if Mmax * box * box * n * n < 2**62:
        A = np.array(M, dtype=np.int64)
        vals = np.einsum("ki,ij,kj->k", V, A, V)
        return Fraction(int(vals.min()), d)
    return min(Fraction(_bilinear_int(M, x, x), d) for x in V.tolist())


def signed_permutation(G1: QuadraticForm, G2: QuadraticForm):
    """Find (perm, signs) with G1[i][j] = s_i s_j G2[p_i][p_j], or None."""
    if G1.dim != G2.dim:
        return None
    n = G1.dim
    A, B = G1.matrix, G2.matrix
    if sorted(G1.diag) != sorted(G2.diag):
        return None
    perm, signs, used = [0] * n, [0] * n, [False] * n

    def rec(i):
        if i == n:
            return True
        for p in range(n):
            if used[p] or B[p][p] != A[i][i]:
                continue
            for s in ((1,) if i == 0 else (1, -1)):
                if all(A[i][j] == s * signs[j] * B[p][perm[j]] for j in range(i)):
                    perm[i], signs[i], used[p] = p, s, True
                    if rec(i + 1):
                        return True
                    used[p] = False
        return False

    return (tuple(perm), tuple(signs)) if rec(0) else None


def permutation_equivalent(G1: QuadraticForm, G2: QuadraticForm) -> bool:
    """True iff G1 = Πᵀ G2 Π for a signed permutation matrix Π."""
    return signed_permutation(G1, G2) is not None


def permutation_invariant(G: QuadraticForm):
    """Hashable invariant of G under signed permutations (a bucketing key)."""
    A = G.matrix
    n = G.dim
    rows = sorted((A[i][i], tuple(sorted(abs(A[i][j]) for j in range(n) if j != i)))
                  for i in range(n))
    return tuple(rows)


def _find_isometry(A: QuadraticForm, B: QuadraticForm):
    """Integer Z with Zᵀ B Z = A, by backtracking over candidate column images."""
    n = A.dim
    Am = A.matrix
    MB, dB = B.num_den
    for i in range(n):
        for j in range(n):
            t = Am[i][j] * dB
            if t.denominator != 1:
                return None
    cands = shortest_vectors(B, max(A.diag))
    by_val: dict[Fraction, list] = {}
    for x, v in cands:
        by_val.setdefault(v, []).append(x)
    per_col = []
    for i in range(n):
        pos = by_val.get(Am[i][i], [])
        if not pos:
            return None
        if i == 0:
            opts = list(pos)  # overall sign of Z is free
        else:
            opts = [y for x in pos for y in (x, tuple(-c for c in x))]
        per_col.append([(x, tuple(sum(MB[r][c] * x[c] for c in range(n)) for r in range(n)))
                        for x in opts])
    targets = [[int(Am[i][j] * dB) for j in range(n)] for i in range(n)]
    chosen = []

    def rec(i):
        if i == n:
            return True
        for x, Bx in per_col[i]:
            if all(sum(a * b for a, b in zip(chosen[j][0], Bx)) == targets[j][i] for j in range(i)):
                chosen.append((x, Bx))
                if rec(i + 1):
                    return True
                chosen.pop()
        return False

    if not rec(0):
        return None
    return tuple(tuple(chosen[j][0][i] for j in range(n)) for i in range(n))


def is_isometric(G1: QuadraticForm, G2: QuadraticForm) -> IsometryWitness | None:
    """Witness (c, Z) with G1 = c Zᵀ G2 Z, or None when the forms are not isometric."""
    if G1.dim != G2.dim:
        return None
    l1, l2 = min_distance(G1).form_min, min_distance(G2).form_min
    A, B = G1.scaled(1 / l1), G2.scaled(1 / l2)
    if A.det != B.det:
        return None
    if len(min_distance(A)) != len(min_distance(B)):
        return None
    Z = _find_isometry(A, B)
    if Z is None:
        return None
    return IsometryWitness(l1 / l2, UnimodularMatrix(Z))


def verify_witness(G1: QuadraticForm, G2: QuadraticForm, w: IsometryWitness) -> bool:
    return G1 == G2.transform(w.map).scaled(w.scale)


def isometry_classes(forms: Iterable[QuadraticForm]) -> list[list[int]]:
    """Partition indices of ``forms`` into isometry classes (first-seen order)."""
    reps: list[tuple[QuadraticForm, list[int]]] = []
    for k, G in enumerate(forms):
        for R, members in reps:
            if is_isometric(G, R) is not None:
                members.append(k)
                break
        else:
            reps.append((G, [k]))
    return [m for _, m in reps]
