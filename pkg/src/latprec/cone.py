"""Polyhedral cones over packed symmetric matrices: inequalities and extreme rays.

Extreme rays are computed with the double description method in exact
integer arithmetic.  Cones here live in dimension N(N+1)/2 <= 15, where the
incremental method is fast enough and simpler than pivoting schemes.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

import numpy as np

from . import exact
from .errors import ConeNotPointed, DimError
from .lattice import packed_size, unpack


@dataclass(frozen=True)
class RayDirection:
    """Symmetric integer direction T in packed coordinates, entries with gcd 1."""
    dim: int
    direction: tuple

    def __post_init__(self):
        if len(self.direction) != packed_size(self.dim):
            raise DimError("packed direction has the wrong length")
        if not any(self.direction):
            raise ValueError("zero direction")

    @property
    def matrix(self) -> list[list[int]]:
        return unpack(self.direction, self.dim)

    def evaluate(self, x) -> int:
        """T[x] = xᵀ T x for an integer vector x."""
        return int(np.dot(functional(x), self.direction))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(np.array(self.matrix, dtype=float))[0])


def functional(x: Sequence[int]) -> tuple[int, ...]:
    """Coefficients of G' -> x x·G' on the packed upper triangle (off-diagonals doubled)."""
    n = len(x)
    return tuple(x[i] * x[j] * (1 if i == j else 2) for i in range(n) for j in range(i, n))


def minimal_cone_inequalities(mv) -> list[tuple[int, ...]]:
    """One functional per minimal vector pair: G' -> G'[x] >= 0."""
    vecs = list(mv)
    if not vecs:
        raise ValueError("empty minimal vector set")
    return [functional(x) for x in vecs]


def _primitive(v) -> tuple[int, ...]:
    g = 0
    for x in v:
        g = gcd(g, x)
    return tuple(x // g for x in v) if g > 1 else tuple(v)


def _dot(a, b) -> int:
    return sum(x * y for x, y in zip(a, b))


def extreme_rays(ineqs: Sequence[Sequence], d: int | None = None) -> list[tuple[int, ...]]:
    """Extreme rays of the pointed cone {t : a·t >= 0 for every row a}.

    Rows may be rational; rays are returned as primitive integer vectors in
    a deterministic (sorted) order.
    """
    rows = []
    for a in ineqs:
        fa = [Fraction(x) for x in a]
        den = 1
        for x in fa:
            den = den * x.denominator // gcd(den, x.denominator)
        rows.append(tuple(int(x * den) for x in fa))
    if d is None:
        d = len(rows[0])
    if any(len(a) != d for a in rows):
        raise DimError("inequalities have inconsistent length")

    # initial simplicial cone from d independent rows
    basis: list[int] = []
    for k, a in enumerate(rows):
        if exact.rank([rows[b] for b in basis] + [a]) > len(basis):
            basis.append(k)
            if len(basis) == d:
                break
    if len(basis) < d:
        raise ConeNotPointed(f"inequalities have rank {len(basis)} < {d}")
    inv = exact.inverse([rows[b] for b in basis])
    rays: list[tuple[int, ...]] = []
    tight: list[int] = []
    full = 0
    for b in basis:
        full |= 1 << b
    for j in range(d):
        col = [inv[i][j] for i in range(d)]
        den = 1
        for x in col:
            den = den * x.denominator // gcd(den, x.denominator)
        rays.append(_primitive([int(x * den) for x in col]))
        tight.append(full & ~(1 << basis[j]))

    in_basis = set(basis)
    for k, a in enumerate(rows):
        if k in in_basis:
            continue
        vals = [_dot(a, r) for r in rays]
        pos = [i for i, v in enumerate(vals) if v > 0]
        neg = [i for i, v in enumerate(vals) if v < 0]
        if not neg:
            for i, v in enumerate(vals):
                if v == 0:
                    tight[i] |= 1 << k
            continue
        new_rays, new_tight = [], []
        for p in pos:
            for q in neg:
                common = tight[p] & tight[q]
                if common.bit_count() < d - 2:
                    continue
                if any(r != p and r != q and (tight[r] & common) == common
                       for r in range(len(rays))):
                    continue
                vp, vq = vals[p], vals[q]
                r = [vp * y - vq * x for x, y in zip(rays[p], rays[q])]
                new_rays.append(_primitive(r))
                new_tight.append(common | (1 << k))
        keep = [i for i, v in enumerate(vals) if v >= 0]
        rays = [rays[i] for i in keep] + new_rays
        tight = [tight[i] | (1 << k) if vals[i] == 0 else tight[i] for i in keep] + new_tight
    return sorted(set(rays))


def cone_rays(mv, n: int) -> list[RayDirection]:
    """Extreme rays of {T : T[x] >= 0 for x in mv} as symmetric directions."""
    d = packed_size(n)
    return [RayDirection(n, r) for r in extreme_rays(minimal_cone_inequalities(mv), d)]
