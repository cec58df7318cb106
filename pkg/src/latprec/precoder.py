"""Precoder construction: the eigenvalue objective, optimal and GMD-based precoders.

A precoder F for spectrum S produces the received lattice with generator S F.
Its power is tr(F Fᵀ) and its quality is the squared minimum distance of S F
relative to that power.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .bounds import SLACK, lower_bound_energy, upper_bound_energy
from .channel import ChannelSpectrum, as_spectrum
from .errors import DimError, NotPositiveDefinite, NumericalError
from .lattice import (GeneratorMatrix, QuadraticForm, min_distance,
                      shortest_vectors)
from .linalg import gmd, jacobi_eigh
from .reduction import factorize_ULZ

log = logging.getLogger(__name__)

RATIONAL_DEN = 10**6
FLOAT_MIN_RTOL = 1e-6


@dataclass(frozen=True, eq=False)
class PrecoderResult:
    F: np.ndarray
    power: float
    dmin2: float
    normalized_dmin2: float
    source_form: QuadraticForm | None
    bounds: tuple[float, float]
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.power > 0:
            raise NumericalError("precoder power must be positive")
        lower = self.bounds[0]
        if self.power / self.dmin2 < lower - SLACK * max(1.0, lower):
            raise NumericalError(f"power {self.power / self.dmin2:.12g} is below the lower bound {lower:.12g}")


def objective(G, S) -> float:
    """Σ_j ω_j(G) / s_j², eigenvalues and singular values both in descending order.

    This is the least power tr(F Fᵀ) over all precoders whose received lattice has Gram G.
    """
    S = as_spectrum(S)
    M = G.float_mirror if isinstance(G, QuadraticForm) else np.asarray(G, dtype=float)
    if M.shape != (S.dim, S.dim):
        raise DimError("form and spectrum dimensions differ")
    w, _ = jacobi_eigh(M)
    if w[-1] <= 0:
        raise NotPositiveDefinite("objective needs a positive definite form")
    return float(np.sum(w / S.array ** 2))


def _bounds_for(G: QuadraticForm, S: ChannelSpectrum) -> tuple[float, float]:
    """(lower, upper) energy bounds for a unit-minimum form G."""
    L = np.linalg.cholesky(G.float_mirror).T
    return lower_bound_energy(GeneratorMatrix(L), S), upper_bound_energy(S)


def build_precoder(G_opt: QuadraticForm, S) -> PrecoderResult:
    """F = S⁻¹ √D Qᵀ from G_opt = Q D Qᵀ (D descending); S F then has Gram exactly G_opt."""
    S = as_spectrum(S)
    mv = min_distance(G_opt)
    if mv.form_min != 1:
        raise ValueError(f"form must have unit minimum, got {mv.form_min}")
    w, Q = jacobi_eigh(G_opt.float_mirror)
    if w[-1] <= 0:
        raise NumericalError("eigenvalues of a positive definite form came out non-positive")
    F = np.diag(1.0 / S.array) @ np.diag(np.sqrt(w)) @ Q.T
    power = float(np.trace(F @ F.T))
    B = np.diag(S.array) @ F
    Gf = B.T @ B
    dmin2 = min(float(np.dot(x, Gf @ np.array(x))) for x in mv)
    return PrecoderResult(F, power, dmin2, dmin2 / power, G_opt, _bounds_for(G_opt, S))


def evaluate_precoder(F, S, source_form: QuadraticForm | None = None) -> PrecoderResult:
    """Power and received minimum distance of an arbitrary non-singular precoder.

    The received Gram is scaled by its largest diagonal entry and rounded to
    denominators <= 10**6 for exact enumeration; the minimum is then re-read in
    floating point over the vectors found.
    """
    S = as_spectrum(S)
    F = np.asarray(F, dtype=float)
    if F.shape != (S.dim, S.dim):
        raise DimError("precoder and spectrum dimensions differ")
    B = GeneratorMatrix(np.diag(S.array) @ F).columns
    Gf = B.T @ B
    scale = float(np.max(np.diag(Gf)))
    Gq = QuadraticForm.from_float(Gf / scale, RATIONAL_DEN)
    lam = min_distance(Gq).form_min
    cands = shortest_vectors(Gq, lam * (1 + 2 * FLOAT_MIN_RTOL))
    dmin2 = min(float(np.dot(x, Gf @ np.array(x))) for x, _ in cands)
    if abs(dmin2 - float(lam) * scale) > FLOAT_MIN_RTOL * dmin2:
        raise NumericalError("rounded and floating minima disagree")
    power = float(np.trace(F @ F.T))
    src = source_form if source_form is not None else Gq.scaled(1 / lam)
    return PrecoderResult(F, power, dmin2, dmin2 / power, src, _bounds_for(Gq.scaled(1 / lam), S))


def gmd_precoder(S) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(W, F, R) with W diag(S) F = R upper triangular, all r_ii = det(S)^(1/N)."""
    S = as_spectrum(S)
    return gmd(S.array)


def gmd_baseline(S) -> PrecoderResult:
    """GMD precoder scaled so that the received minimum distance is 1."""
    S = as_spectrum(S)
    _, F, _ = gmd_precoder(S)
    res = evaluate_precoder(F, S)
    return evaluate_precoder(F / np.sqrt(res.dmin2), S)


def _rotated(M: np.ndarray, S: ChannelSpectrum) -> tuple[np.ndarray, float]:
    """Best rotation of the received generator M: F = S⁻¹ Pᵀ M with M = P Σ Vᵀ."""
    P, _, _ = np.linalg.svd(M)
    F = np.diag(1.0 / S.array) @ P.T @ M
    return F, float(np.trace(F @ F.T))


def suboptimal_precoder(S, candidate_forms) -> PrecoderResult:
    """Improve on the GMD precoder by swapping its reduced lattice for a candidate form.

    The scaled GMD received generator is factored as U_g L_g Z_g; each unit
    minimum candidate G_m is tried as L_m Z_g (L_m its Cholesky factor) under
    the best rotation.  The rotated GMD generator itself is kept as a fallback,
    so the result never uses more power than the GMD precoder.
    """
    S = as_spectrum(S)
    base = gmd_baseline(S)
    B = np.diag(S.array) @ base.F
    fact = factorize_ULZ(B)
    Zg = fact.Z
    best = None
    for k, G in enumerate(candidate_forms):
        if G.dim != S.dim:
            raise DimError("candidate dimension differs from the spectrum")
        lam = min_distance(G).form_min
        if lam != 1:
            G = G.scaled(1 / lam)
        Lm = np.linalg.cholesky(G.float_mirror).T
        F, power = _rotated(Lm @ Zg.array, S)
        if best is None or power < best[1]:
            best = (F, power, G.transform(Zg), f"candidate {k}")
    F, power = _rotated(B, S)
    if best is None or power < best[1]:
        best = (F, power, None, "gmd")
    F, power, src, label = best
    res = evaluate_precoder(F, S, source_form=src)
    res.extra.update(gmd_power=base.power, source=label)
    if res.power / res.dmin2 > base.power + SLACK * base.power:
        raise NumericalError("suboptimal precoder is worse than the GMD baseline")
    return res
