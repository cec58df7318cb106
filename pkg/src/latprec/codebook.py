"""Offline codebooks of received-lattice generators and online precoder selection."""
from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import exact
from .bounds import SLACK, gram_trace_bound, lower_bound_energy, upper_bound_energy
from .channel import ChannelSpectrum, as_spectrum
from .errors import DimError, EmptyBudget, ReproFailure
from .lattice import (QuadraticForm, UnimodularMatrix, canonical_sign,
                      min_distance, permutation_equivalent,
                      permutation_invariant, shortest_vectors,
                      successive_minimum_2, to_fraction)
from .perfect import enumerate_perfect_forms, perfect_classes, root_lattice_form
from .precoder import PrecoderResult, build_precoder, objective
from .reduction import minkowski_reduce

log = logging.getLogger(__name__)

FORMAT_VERSION = "1.0"
TIE_RTOL = 1e-12

G_D4 = QuadraticForm.from_matrix([
    [1, 0, Fraction(1, 2), 0],
    [0, 1, Fraction(-1, 2), 0],
    [Fraction(1, 2), Fraction(-1, 2), 1, Fraction(-1, 2)],
    [0, 0, Fraction(-1, 2), 1],
])
G_A4 = root_lattice_form(4)
S_A4_WINS = (1.0, 0.95, 0.94, 0.93)
S_D4_WINS = (1.0, 0.99, 0.94, 0.93)


def _from_columns(cols) -> UnimodularMatrix:
    return UnimodularMatrix(tuple(zip(*cols)))


def enumerate_unimodular_from(vecset, n: int) -> list[UnimodularMatrix]:
    """Unimodular matrices whose columns come from ``vecset`` (either sign).

    One matrix per set of columns: each column has its first nonzero entry
    positive and columns appear in sorted order.
    """
    vecs = sorted({canonical_sign(tuple(int(c) for c in v)) for v in vecset if any(v)})
    if any(len(v) != n for v in vecs):
        raise DimError("vector length differs from N")
    out = []
    for cols in itertools.combinations(vecs, n):
        if abs(exact.int_det(list(zip(*cols)))) == 1:
            out.append(_from_columns(cols))
    return out


def enumerate_unimodular_in_sphere(G_L: QuadraticForm, trace_cap) -> list[UnimodularMatrix]:
    """Unimodular Z with tr(Zᵀ G_L Z) <= trace_cap, one per column set up to sign and order."""
    n = G_L.dim
    lam = min_distance(G_L).form_min
    cap = to_fraction(trace_cap) + Fraction(1, 10**9)
    if cap < n * lam:
        raise EmptyBudget(f"trace cap {trace_cap} is below N·λ = {n * lam}")
    cands = shortest_vectors(G_L, cap - (n - 1) * lam)
    vals = [v for _, v in cands]
    out = []
    chosen: list[int] = []

    def rec(start, budget):
        k = len(chosen)
        if k == n:
            cols = [cands[i][0] for i in chosen]
            if abs(exact.int_det(list(zip(*cols)))) == 1:
                out.append(sorted(cols))
            return
        for i in range(start, len(cands)):
            # remaining columns each cost at least vals[i]
            if vals[i] * (n - k) > budget:
                break
            chosen.append(i)
            if exact.rank([cands[j][0] for j in chosen]) == k + 1:
                rec(i + 1, budget - vals[i])
            chosen.pop()

    rec(0, cap)
    return [_from_columns(c) for c in sorted(out)]


@dataclass(frozen=True, eq=False)
class CodebookEntry:
    form: QuadraticForm
    gen: np.ndarray
    source: str


@dataclass
class Codebook:
    dim: int
    entries: list[CodebookEntry]
    build_params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        ents = []
        for e in self.entries:
            ents.append({
                "gram_num": [x.numerator for x in e.form.entries],
                "gram_den": [x.denominator for x in e.form.entries],
                "gen": [[float(x) for x in row] for row in e.gen],
                "source": e.source,
            })
        return {"spec_version": FORMAT_VERSION, "dim": self.dim,
                "build_params": self.build_params, "entries": ents}

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def from_dict(cls, d: dict) -> "Codebook":
        n = int(d["dim"])
        entries = []
        for e in d["entries"]:
            vals = [Fraction(int(a), int(b)) for a, b in zip(e["gram_num"], e["gram_den"])]
            G = QuadraticForm(n, tuple(vals))
            if min_distance(G).form_min != 1:
                raise ValueError(f"codebook entry {e['source']} does not have unit minimum")
            gen = np.array(e["gen"], dtype=float)
            if gen.shape != (n, n):
                raise DimError("generator shape differs from dim")
            entries.append(CodebookEntry(G, gen, e["source"]))
        return cls(n, entries, dict(d.get("build_params", {})))

    @classmethod
    def load(cls, path) -> "Codebook":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def build_codebook(n: int, s1_over_detroot_max: float) -> Codebook:
    """Every unit-minimum perfect form with trace <= N·r², up to signed permutation.

    Perfect forms are enumerated under that trace cap, each isometry class is
    Minkowski reduced to G_L = Lᵀ L, and all Z with tr(Zᵀ G_L Z) within the
    cap contribute the generator L·Z.  Any channel whose spread
    s_1/det(S)^(1/N) stays below r has its optimum among the entries.
    """
    if not 2 <= n <= 5:
        raise DimError("codebooks are built for 2 <= N <= 5")
    r = float(s1_over_detroot_max)
    if r < 1:
        raise ValueError("s1/det(S)^(1/N) is at least 1 for every spectrum")
    bound = n * r * r
    recs = enumerate_perfect_forms(root_lattice_form(n), bound)
    entries: list[CodebookEntry] = []
    buckets: dict = {}
    classes = perfect_classes(recs)
    for k, cls in enumerate(classes):
        G_L, _ = minkowski_reduce(cls[0])
        L = np.linalg.cholesky(G_L.float_mirror).T
        for j, Z in enumerate(enumerate_unimodular_in_sphere(G_L, bound)):
            G = G_L.transform(Z)
            key = permutation_invariant(G)
            if any(permutation_equivalent(G, H) for H in buckets.get(key, ())):
                continue
            buckets.setdefault(key, []).append(G)
            entries.append(CodebookEntry(G, L @ Z.array, f"class {k} Z {j}"))
    entries.sort(key=lambda e: e.form.sort_key())
    params = {"trace_bound": bound, "s1_over_detroot_max": r}
    log.info("codebook N=%d: %d classes, %d entries", n, len(classes), len(entries))
    return Codebook(n, entries, params)


def select_precoder(S, cb: Codebook) -> PrecoderResult:
    """Minimum-power entry under the given spectrum; ties go to the earliest entry."""
    S = as_spectrum(S)
    if S.dim != cb.dim:
        raise DimError("spectrum and codebook dimensions differ")
    if not cb.entries:
        raise ValueError("empty codebook")
    best, best_k = None, -1
    for k, e in enumerate(cb.entries):
        p = objective(e.form, S)
        if best is None or p < best - TIE_RTOL * best:
            best, best_k = p, k
    entry = cb.entries[best_k]
    res = build_precoder(entry.form, S)
    res.extra.update(source=entry.source, entry=best_k)
    limit = cb.build_params.get("s1_over_detroot_max")
    if limit is not None and S.ratio > limit * (1 + SLACK):
        log.warning("spectrum spread %.6g exceeds the codebook limit %.6g", S.ratio, limit)
        res.extra["outside_build_params"] = True
    return res


def optimal_precoder(S, trace_bound=None) -> PrecoderResult:
    """Full enumeration of perfect forms under ub(S) (or ``trace_bound``) and the best of them."""
    S = as_spectrum(S)
    bound = gram_trace_bound(S) + SLACK if trace_bound is None else trace_bound
    recs = enumerate_perfect_forms(root_lattice_form(S.dim), bound)
    return best_of_forms([r.form for r in recs], S)


def best_of_forms(forms, S) -> PrecoderResult:
    """Optimal precoder among unit-minimum forms (first in order wins ties)."""
    best, best_G = None, None
    for G in forms:
        p = objective(G, S)
        if best is None or p < best - TIE_RTOL * best:
            best, best_G = p, G
    if best_G is None:
        raise ValueError("no candidate forms")
    return build_precoder(best_G, S)


def repro_4d() -> dict:
    """The D4/A4 channel switch: A4 wins for S = (1, .95, .94, .93), D4 for (1, .99, .94, .93).

    For both channels the trace cap ub(S) is below 3λ₁ + λ₂ = 5, so the basis
    change of an optimal form can only use minimal vectors as columns.  All
    such unimodular matrices are tried for both D4 and A4.
    """
    report: dict = {"forms": {}}
    sets = {}
    for name, G in (("D4", G_D4), ("A4", G_A4)):
        mv = min_distance(G)
        lam2 = successive_minimum_2(G)
        Zs = enumerate_unimodular_from(mv.vectors, 4)
        sets[name] = (G, Zs)
        report["forms"][name] = {"min": str(mv.form_min), "min_pairs": len(mv),
                                 "lambda2": str(lam2), "det": str(G.det), "unimodular": len(Zs)}
    report["channels"] = []
    for S_vals, expected in ((S_A4_WINS, "A4"), (S_D4_WINS, "D4")):
        S = ChannelSpectrum(S_vals)
        ub = gram_trace_bound(S)
        if not ub < 5:
            raise ReproFailure(f"trace bound {ub} does not confine Z to minimal vectors")
        best = {}
        for name, (G, Zs) in sets.items():
            vals = []
            for Z in Zs:
                H = G.transform(Z)
                if H.trace <= ub + SLACK:
                    vals.append((objective(H, S), H))
            if not vals:
                raise ReproFailure(f"no {name} form under the trace bound")
            best[name] = min(vals, key=lambda t: t[0])
        winner = min(best, key=lambda k: best[k][0])
        a, b = best["A4"][0], best["D4"][0]
        margin = abs(a - b) / min(a, b)
        res = build_precoder(best[winner][1], S)
        entry = {
            "spectrum": list(S_vals),
            "objective": {k: v[0] for k, v in best.items()},
            "winner": winner,
            "relative_margin": margin,
            "power": res.power,
            "dmin2": res.dmin2,
            "lower_bound": lower_bound_energy(np.linalg.cholesky(best[winner][1].float_mirror).T, S),
            "upper_bound": upper_bound_energy(S),
            "gram_trace_bound": ub,
        }
        report["channels"].append(entry)
        if winner != expected:
            raise ReproFailure(f"expected {expected} to win for S = {S_vals}, got {winner}")
        if margin <= 1e-6:
            raise ReproFailure(f"winning margin {margin:.3g} is not resolvable")
    return report
