"""Traversal of perfect forms (vertices of the Ryshkov polyhedron) under a trace cap.

The walk starts from a perfect form (by default the root lattice A_N), finds
the extreme rays of the cone spanned by the minimal-vector inequalities,
follows each ray to the neighbouring perfect form and keeps every neighbour
whose trace stays under the cap.  Neighbours that are a signed permutation of
an already stored form are skipped.
"""
from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass
from fractions import Fraction

from . import exact
from .cone import RayDirection, cone_rays, functional
from .errors import ConditioningError, DimError, NumericalError, RayUnbounded
from .lattice import (MinVecSet, QuadraticForm, isometry_classes, min_distance,
                      permutation_equivalent, permutation_invariant,
                      shortest_vectors, to_fraction, unpack)

log = logging.getLogger(__name__)

BOUND_SLACK = Fraction(1, 10**9)


@dataclass
class PerfectFormRecord:
    form: QuadraticForm
    min_vectors: MinVecSet
    visited: bool = False

    @property
    def trace(self) -> Fraction:
        return self.form.trace


def root_lattice_form(n: int) -> QuadraticForm:
    """Gram matrix of A_N scaled to minimum 1: ones on the diagonal, -1/2 beside it."""
    if n < 2:
        raise DimError("root lattice form needs N >= 2")
    h = Fraction(-1, 2)
    return QuadraticForm.from_matrix([[1 if i == j else (h if abs(i - j) == 1 else 0)
                                       for j in range(n)] for i in range(n)])


def is_perfect(G: QuadraticForm) -> bool:
    mv = min_distance(G)
    return exact.rank([functional(x) for x in mv]) == G.dim * (G.dim + 1) // 2


def _probe(G: QuadraticForm, T: tuple, u: Fraction):
    """Classify G + uT: ('bad', None), ('ok', None) or ('drop', vectors below 1)."""
    E = G.add(T, u)
    if not exact.is_positive_definite(unpack(E, G.dim)):
        return "bad", None
    H = QuadraticForm(G.dim, E)
    try:
        below = [x for x, v in shortest_vectors(H, 1) if v < 1]
    except ConditioningError:
        return "bad", None
    return ("drop", below) if below else ("ok", None)


def neighbor_form(G: QuadraticForm, T: RayDirection, max_steps: int = 400) -> QuadraticForm:
    """Neighbouring perfect form G + αT for the smallest α > 0 gaining new minimal vectors.

    G must be perfect with minimum 1 and T an extreme ray of its minimal-vector cone.
    """
    if T.min_eigenvalue() >= -1e-12:
        raise RayUnbounded("ray direction is positive semidefinite")
    Tp = tuple(Fraction(t) for t in T.direction)
    lo, hi, u = Fraction(0), None, Fraction(1)
    for _ in range(max_steps):
        status, below = _probe(G, Tp, u)
        if status == "drop":
            break
        if status == "bad":
            hi = u
            u = (lo + u) / 2
        else:
            lo = u
            u = 2 * u if hi is None else (u + hi) / 2
    else:
        raise RayUnbounded("no drop of the minimum found along the ray")
    while below:
        u = min((1 - G.evaluate(x)) / T.evaluate(x) for x in below)
        status, below = _probe(G, Tp, u)
        if status == "bad":
            raise NumericalError("neighbour step left the positive definite cone")
    H = QuadraticForm(G.dim, G.add(Tp, u))
    if min_distance(H).form_min != 1:
        raise NumericalError("neighbour form lost the unit minimum")
    return H


def voronoi_neighbors(G: QuadraticForm, mv: MinVecSet | None = None):
    """List of (ray, neighbour) pairs of a perfect form; unbounded rays are skipped."""
    mv = mv or min_distance(G)
    out = []
    for T in cone_rays(mv, G.dim):
        try:
            out.append((T, neighbor_form(G, T)))
        except RayUnbounded:
            log.debug("skipping unbounded ray %s", T.direction)
    return out


def normalize_min(G: QuadraticForm) -> QuadraticForm:
    return G.scaled(1 / min_distance(G).form_min)


def enumerate_perfect_forms(start: QuadraticForm, trace_bound, prune_permutations: bool = True,
                            max_forms: int | None = None) -> list[PerfectFormRecord]:
    """All perfect forms with trace <= trace_bound reachable from ``start``.

    Forms equal up to a signed permutation are stored once (unless
    ``prune_permutations`` is off, in which case only exact duplicates are
    merged).  Work proceeds lowest trace first; the result is sorted by
    (trace, packed entries).
    """
    bound = to_fraction(trace_bound) + BOUND_SLACK
    start = normalize_min(start)
    if start.trace > bound:
        raise ValueError(f"start form has trace {start.trace} above the bound {trace_bound}")
    records: list[PerfectFormRecord] = []
    buckets: dict = {}
    heap: list = []

    def known(H: QuadraticForm) -> bool:
        if not prune_permutations:
            return H.entries in buckets
        for k in buckets.get(permutation_invariant(H), ()):
            if permutation_equivalent(H, records[k].form):
                return True
        return False

    def store(H: QuadraticForm, mv=None):
        k = len(records)
        records.append(PerfectFormRecord(H, mv or min_distance(H)))
        key = H.entries if not prune_permutations else permutation_invariant(H)
        if prune_permutations:
            buckets.setdefault(key, []).append(k)
        else:
            buckets[key] = k
        heapq.heappush(heap, (H.trace, H.entries, k))

    store(start)
    while heap:
        _, _, k = heapq.heappop(heap)
        rec = records[k]
        rec.visited = True
        for _, H in voronoi_neighbors(rec.form, rec.min_vectors):
            if H.trace <= bound and not known(H):
                store(H)
                if max_forms is not None and len(records) > max_forms:
                    raise RuntimeError(f"more than {max_forms} perfect forms under the bound")
        log.debug("visited form %d (trace %s), %d stored", k, rec.trace, len(records))
    records.sort(key=lambda r: r.form.sort_key())
    return records


def perfect_classes(records) -> list[list[QuadraticForm]]:
    """Group enumerated forms into isometry classes."""
    forms = [r.form if isinstance(r, PerfectFormRecord) else r for r in records]
    return [[forms[i] for i in cls] for cls in isometry_classes(forms)]
