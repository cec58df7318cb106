"""Analytic energy and trace bounds for unit-minimum precoded lattices."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelSpectrum, as_spectrum
from .lattice import GeneratorMatrix, QuadraticForm, generator_of, volume
from .linalg import jacobi_eigh

SLACK = 1e-9


@dataclass(frozen=True)
class BoundCertificate:
    lower_energy: float
    upper_energy: float
    gram_trace_ub: float
    z_trace_ub: float
    ratio: float


def _generator(L) -> GeneratorMatrix:
    if isinstance(L, QuadraticForm):
        return generator_of(L)
    if isinstance(L, GeneratorMatrix):
        return L
    return GeneratorMatrix(np.asarray(L, dtype=float))


def lower_bound_energy(L, S: ChannelSpectrum) -> float:
    """N (det L / det S)^(2/N): no precoder reaching unit minimum on L uses less power."""
    L = _generator(L)
    S = as_spectrum(S)
    n = S.dim
    return n * (volume(L) / S.det) ** (2.0 / n)


def upper_bound_energy(S: ChannelSpectrum) -> float:
    """N (1/det S)^(2/N): the power of the orthogonal (GMD) design, an upper bound on the optimum."""
    S = as_spectrum(S)
    n = S.dim
    return n * (1.0 / S.det) ** (2.0 / n)


def gram_trace_bound(S: ChannelSpectrum) -> float:
    """ub(S) = N (s_1 / det(S)^(1/N))^2, a cap on the trace of the optimal Gram matrix."""
    S = as_spectrum(S)
    return S.dim * S.ratio ** 2


def z_trace_bound(G_L: QuadraticForm, S: ChannelSpectrum) -> float:
    """(N / ω_N(G_L)) (s_1 / det(S)^(1/N))^2, a cap on tr(Z Zᵀ) for the optimal basis change."""
    S = as_spectrum(S)
    w, _ = jacobi_eigh(G_L.float_mirror)
    return S.dim / w[-1] * S.ratio ** 2


def certificate(L, S: ChannelSpectrum) -> BoundCertificate:
    L = _generator(L)
    S = as_spectrum(S)
    n = S.dim
    G = QuadraticForm.from_float(L.columns.T @ L.columns, max_den=None)
    return BoundCertificate(
        lower_energy=lower_bound_energy(L, S),
        upper_energy=upper_bound_energy(S),
        gram_trace_ub=gram_trace_bound(S),
        z_trace_ub=z_trace_bound(G, S),
        ratio=(1.0 / volume(L)) ** (2.0 / n),
    )
