import math

import numpy as np
import pytest

from conftest import A4, HEX, random_spectrum
from latprec.bounds import (certificate, gram_trace_bound, lower_bound_energy,
                            upper_bound_energy, z_trace_bound)
from latprec.channel import ChannelSpectrum
from latprec.codebook import S_A4_WINS, optimal_precoder
from latprec.lattice import QuadraticForm, generator_of
from latprec.perfect import root_lattice_form
from latprec.reduction import factorize_ULZ

S_EQ22 = ChannelSpectrum(S_A4_WINS)
DET_EQ22 = 1 * 0.95 * 0.94 * 0.93


def test_lower_bound_examples():
    assert lower_bound_energy(np.eye(3), (1, 1, 1)) == pytest.approx(3)
    assert lower_bound_energy(generator_of(HEX), (1, 1)) == pytest.approx(math.sqrt(3), rel=1e-12)
    val = lower_bound_energy(generator_of(A4), S_EQ22)
    assert val == pytest.approx(4 * math.sqrt(math.sqrt(5) / 4 / DET_EQ22), rel=1e-12)
    assert val == pytest.approx(3.282, abs=5e-4)


def test_upper_bound_examples():
    assert upper_bound_energy(ChannelSpectrum((1, 1, 1))) == pytest.approx(3)
    assert upper_bound_energy(ChannelSpectrum((4, 1))) == pytest.approx(0.5)
    assert upper_bound_energy(S_EQ22) == pytest.approx(4 / math.sqrt(DET_EQ22), rel=1e-12)
    assert upper_bound_energy(S_EQ22) == pytest.approx(4.3893, abs=1e-4)


def test_gram_trace_bound_examples():
    assert gram_trace_bound(ChannelSpectrum((1, 1, 1))) == pytest.approx(3)
    assert gram_trace_bound(ChannelSpectrum((2, 1))) == pytest.approx(4)
    ub = gram_trace_bound(S_EQ22)
    assert ub == pytest.approx(4.3893, abs=1e-4)


def test_reference_trace_constant_4_83_vs_formula():
    # 4.83 is close to 4/det(S), not to the trace bound formula (4.389);
    # both stay under 3λ₁ + λ₂ = 5, which is all the minimal-vector argument needs
    ub = gram_trace_bound(S_EQ22)
    assert abs(ub - 4.83) > 0.4
    assert ub < 5 and 4.83 < 5
    assert 4 / DET_EQ22 == pytest.approx(4.8165, abs=1e-4)


def test_z_trace_bound_examples():
    I2 = QuadraticForm.from_matrix([[1, 0], [0, 1]])
    assert z_trace_bound(I2, ChannelSpectrum((1, 1))) == pytest.approx(2)
    assert z_trace_bound(HEX, ChannelSpectrum((1, 1))) == pytest.approx(4)
    w = np.linalg.eigvalsh(A4.float_mirror)[0]
    assert z_trace_bound(A4, S_EQ22) == pytest.approx(gram_trace_bound(S_EQ22) / w, rel=1e-12)


def test_certificate_examples():
    c = certificate(np.eye(3), ChannelSpectrum((1, 1, 1)))
    assert c.ratio == pytest.approx(1) and c.lower_energy == pytest.approx(c.upper_energy)
    c = certificate(generator_of(HEX), ChannelSpectrum((1, 1)))
    assert c.ratio == pytest.approx(2 / math.sqrt(3), rel=1e-12)
    # face-centred cubic at unit minimum has volume 1/sqrt(2)
    fcc = generator_of(root_lattice_form(3))
    assert abs(np.linalg.det(fcc.columns)) == pytest.approx(1 / math.sqrt(2), rel=1e-12)
    c = certificate(fcc, ChannelSpectrum((1, 1, 1)))
    assert c.ratio == pytest.approx(2 ** (1 / 3), rel=1e-12)


def test_certificate_consistency():
    rng = np.random.default_rng(61)
    for _ in range(30):
        n = int(rng.integers(2, 5))
        S = random_spectrum(rng, n, 0.2, 2)
        c = certificate(generator_of(root_lattice_form(n)), S)
        assert 0 < c.lower_energy <= c.upper_energy
        assert c.upper_energy / c.lower_energy == pytest.approx(c.ratio, rel=1e-12)
        assert c.gram_trace_ub >= n and c.z_trace_ub >= c.gram_trace_ub


def test_gram_trace_bound_scale_free():
    rng = np.random.default_rng(62)
    for _ in range(20):
        S = random_spectrum(rng, 3, 0.1, 3)
        for c in (0.1, 10):
            assert gram_trace_bound(ChannelSpectrum(tuple(c * x for x in S.s))) == pytest.approx(gram_trace_bound(S), rel=1e-12)


def test_sandwich_and_z_trace_on_optima():
    rng = np.random.default_rng(63)
    for k in range(12):
        n = 2 + k % 3
        S = random_spectrum(rng, n, 0.85 if n == 4 else 0.6, 1)
        res = optimal_precoder(S)
        L = np.linalg.cholesky(res.source_form.float_mirror).T
        assert lower_bound_energy(L, S) - 1e-9 <= res.power <= upper_bound_energy(S) + 1e-9
        # the unimodular part of the winning received generator respects its trace cap
        f = factorize_ULZ(np.diag(S.array) @ res.F)
        assert np.trace(f.Z.array @ f.Z.array.T) <= z_trace_bound(f.gram_L, S) + 1e-9


def test_doubling_the_trace_bound_keeps_the_winner():
    rng = np.random.default_rng(64)
    for n in (2, 2, 2, 3, 3, 3, 4):
        S = random_spectrum(rng, n, 0.97 if n == 4 else 0.6, 1)
        a = optimal_precoder(S)
        b = optimal_precoder(S, trace_bound=2 * gram_trace_bound(S))
        assert b.power == pytest.approx(a.power, rel=1e-12)
