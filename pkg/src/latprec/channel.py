"""Channel ingestion: complex-to-real mapping and singular value spectra."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimError, SingularChannel

SINGULAR_RTOL = 1e-10


@dataclass(frozen=True)
class ChannelSpectrum:
    """Singular values s_1 >= ... >= s_N > 0 of a non-singular channel."""
    s: tuple

    def __post_init__(self):
        s = tuple(float(x) for x in self.s)
        if not s:
            raise DimError("empty spectrum")
        if any(not np.isfinite(x) or x <= 0 for x in s):
            raise SingularChannel("singular values must be finite and positive")
        if any(a < b for a, b in zip(s, s[1:])):
            raise ValueError("spectrum must be sorted in descending order")
        object.__setattr__(self, "s", s)

    @classmethod
    def from_values(cls, values) -> "ChannelSpectrum":
        """Spectrum from singular values in any order."""
        return cls(tuple(sorted((float(x) for x in values), reverse=True)))

    @property
    def dim(self) -> int:
        return len(self.s)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.s)

    @property
    def det(self) -> float:
        return float(np.prod(self.s))

    @property
    def ratio(self) -> float:
        """s_1 / det(S)^(1/N), the scale-free spread that drives the trace bounds."""
        return self.s[0] / float(np.exp(np.mean(np.log(self.s))))


def as_spectrum(S) -> ChannelSpectrum:
    return S if isinstance(S, ChannelSpectrum) else ChannelSpectrum.from_values(S)


def realify_matrix(A) -> np.ndarray:
    """[[Re A, Im A], [-Im A, Re A]] for a complex M x N matrix."""
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    return np.block([[A.real, A.imag], [-A.imag, A.real]])


def realify_vector(x) -> np.ndarray:
    x = np.asarray(x, dtype=complex).ravel()
    return np.concatenate([x.real, x.imag])


def complexify_vector(r) -> np.ndarray:
    r = np.asarray(r, dtype=float).ravel()
    if len(r) % 2:
        raise DimError("real vector must have even length")
    n = len(r) // 2
    return r[:n] + 1j * r[n:]


def spectrum_of(H) -> tuple[ChannelSpectrum, np.ndarray, np.ndarray]:
    """SVD H = U diag(s) Vᵀ of a square non-singular real channel; returns (S, U, Vᵀ)."""
    H = np.asarray(H, dtype=float)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise DimError("channel matrix must be square")
    U, s, Vt = np.linalg.svd(H)
    if s[-1] < SINGULAR_RTOL * s[0]:
        raise SingularChannel(f"smallest singular value {s[-1]:.3g} is negligible")
    return ChannelSpectrum(tuple(s)), U, Vt
