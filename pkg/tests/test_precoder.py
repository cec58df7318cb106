import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from conftest import A4, D4, HEX, random_spectrum
from latprec.bounds import lower_bound_energy
from latprec.channel import (ChannelSpectrum, complexify_vector,
                             realify_matrix, realify_vector, spectrum_of)
from latprec.codebook import S_A4_WINS, best_of_forms
from latprec.errors import DimError, NotPositiveDefinite, SingularChannel
from latprec.lattice import QuadraticForm, is_isometric
from latprec.linalg import gmd, jacobi_eigh
from latprec.perfect import enumerate_perfect_forms, root_lattice_form
from latprec.precoder import (build_precoder, evaluate_precoder, gmd_baseline,
                              gmd_precoder, objective, suboptimal_precoder)
from latprec.reduction import minkowski_reduce


def random_pd(rng, n):
    B = rng.normal(size=(n, n))
    return B.T @ B + 0.05 * np.eye(n)


def random_orthogonal(rng, n):
    Q, R = np.linalg.qr(rng.normal(size=(n, n)))
    return Q * np.sign(np.diag(R))


# realification

def test_realify_examples():
    assert np.array_equal(realify_matrix([[1j]]), [[0, 1], [-1, 0]])
    assert np.array_equal(realify_matrix(np.eye(2, dtype=complex)), np.eye(4))
    assert np.array_equal(realify_matrix([[1 + 2j]]), [[1, 2], [-2, 1]])
    assert np.array_equal(realify_vector([1j]), [0, 1])
    assert np.array_equal(realify_vector([1 + 1j, 2]), [1, 2, 1, 0])


@given(hnp.arrays(complex, 3, elements=st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False)))
def test_realify_vector_roundtrip(x):
    assert np.array_equal(complexify_vector(realify_vector(x)), x)


def test_realify_matrix_action():
    # with the [[Re, Im], [-Im, Re]] layout the block matrix of conj(A) acts as A
    rng = np.random.default_rng(41)
    for _ in range(20):
        A = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
        x = rng.normal(size=2) + 1j * rng.normal(size=2)
        assert np.allclose(realify_matrix(np.conj(A)) @ realify_vector(x), realify_vector(A @ x))
        # the layout as given keeps the singular values of A, each twice
        s = np.linalg.svd(realify_matrix(A), compute_uv=False)
        assert np.allclose(np.sort(s), np.sort(np.repeat(np.linalg.svd(A, compute_uv=False), 2)))


# spectra

def test_spectrum_examples():
    S, _, _ = spectrum_of(np.eye(3))
    assert S.s == (1.0, 1.0, 1.0)
    rng = np.random.default_rng(42)
    U, V = random_orthogonal(rng, 2), random_orthogonal(rng, 2)
    H = U @ np.diag([3.0, 2.0]) @ V.T
    S, U2, Vt = spectrum_of(H)
    assert np.allclose(S.s, (3, 2))
    assert np.allclose(U2 @ np.diag(S.s) @ Vt, H, atol=1e-9)
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    S, _, _ = spectrum_of(realify_matrix(A))
    assert np.allclose(S.s[0::2], S.s[1::2])


def test_spectrum_errors():
    with pytest.raises(SingularChannel):
        spectrum_of(np.array([[1.0, 0], [0, 1e-12]]))
    with pytest.raises(DimError):
        spectrum_of(np.ones((2, 3)))
    with pytest.raises(ValueError):
        ChannelSpectrum((1.0, 2.0))
    with pytest.raises(SingularChannel):
        ChannelSpectrum((1.0, 0.0))
    assert ChannelSpectrum.from_values([0.5, 2, 1]).s == (2.0, 1.0, 0.5)


# Jacobi against numpy

def test_jacobi_matches_numpy():
    rng = np.random.default_rng(43)
    for _ in range(100):
        n = int(rng.integers(1, 9))
        A = rng.normal(size=(n, n))
        A = A + A.T
        w, V = jacobi_eigh(A)
        assert np.allclose(w, np.linalg.eigvalsh(A)[::-1], atol=1e-11 * max(1, abs(A).max()))
        assert np.allclose(V.T @ V, np.eye(n), atol=1e-12)
        assert np.allclose(V @ np.diag(w) @ V.T, A, atol=1e-11 * max(1, abs(A).max()))
        assert all(w[:-1] >= w[1:])


def test_jacobi_rejects_asymmetric():
    with pytest.raises(ValueError):
        jacobi_eigh([[1.0, 2.0], [0.0, 1.0]])


# objective

def test_objective_examples():
    assert objective(HEX, (1, 1)) == pytest.approx(2)
    assert objective(QuadraticForm.from_matrix([[4, 0], [0, 1]]), (2, 1)) == pytest.approx(2)
    with pytest.raises(NotPositiveDefinite):
        objective(np.array([[1.0, 2.0], [2.0, 1.0]]), (1, 1))
    with pytest.raises(DimError):
        objective(HEX, (1, 1, 1))


def test_objective_is_minimum_over_rotations():
    rng = np.random.default_rng(44)
    for k in range(200):
        n = 3 + k % 2
        G = random_pd(rng, n)
        S = random_spectrum(rng, n, 0.2, 2)
        L = np.linalg.cholesky(G).T
        best = objective(G, S)
        U = random_orthogonal(rng, n)
        F = np.diag(1 / S.array) @ U @ L
        assert np.trace(F @ F.T) >= best - 1e-9
    # the eigenvector rotation attains it
    w, Q = jacobi_eigh(G)
    F = np.diag(1 / S.array) @ np.diag(np.sqrt(w)) @ Q.T
    assert np.trace(F @ F.T) == pytest.approx(best, rel=1e-12)


def test_objective_concavity():
    rng = np.random.default_rng(45)
    for k in range(300):
        n = 2 + k % 3
        G1, G2 = random_pd(rng, n), random_pd(rng, n)
        S = random_spectrum(rng, n, 0.2, 2)
        g = rng.choice(np.arange(1, 10) / 10)
        lhs = objective(g * G1 + (1 - g) * G2, S)
        assert lhs >= g * objective(G1, S) + (1 - g) * objective(G2, S) - 1e-9


def test_objective_spectrum_order_irrelevant():
    S1 = ChannelSpectrum.from_values([0.93, 1, 0.94, 0.95])
    assert objective(A4, S1) == objective(A4, S_A4_WINS)


# optimal precoder

def test_build_precoder_examples():
    I3 = QuadraticForm.from_matrix(np.eye(3, dtype=int).tolist())
    r = build_precoder(I3, (1, 1, 1))
    assert np.allclose(r.F @ r.F.T, np.eye(3), atol=1e-12)
    assert r.power == pytest.approx(3)
    r = build_precoder(HEX, (1, 1))
    assert r.power == pytest.approx(2) and r.dmin2 == pytest.approx(1)
    with pytest.raises(ValueError):
        build_precoder(HEX.scaled(2), (1, 1))


def test_build_precoder_consistency():
    rng = np.random.default_rng(46)
    for G in (HEX, D4, A4, root_lattice_form(3)):
        for _ in range(5):
            S = random_spectrum(rng, G.dim, 0.3, 1.5)
            r = build_precoder(G, S)
            assert r.power == pytest.approx(objective(G, S), rel=1e-9)
            assert r.dmin2 == pytest.approx(1, abs=1e-9)
            B = np.diag(S.array) @ r.F
            assert np.allclose(B.T @ B, G.float_mirror, atol=1e-9)
            # the evaluation path sees the same minimum
            assert evaluate_precoder(r.F, S).dmin2 == pytest.approx(1, abs=1e-9)


def test_build_precoder_matches_enumeration_for_a4_channel():
    S = ChannelSpectrum(S_A4_WINS)
    recs = enumerate_perfect_forms(root_lattice_form(4), 4.39)
    best = min(objective(r.form, S) for r in recs)
    r = best_of_forms([r.form for r in recs], S)
    assert is_isometric(r.source_form, A4) is not None
    assert r.power == pytest.approx(best, rel=1e-12)


# GMD

def test_gmd_examples():
    W, F, R = gmd_precoder((1, 1))
    assert np.allclose(np.diag(R), 1)
    W, F, R = gmd_precoder((4, 1))
    assert np.allclose(np.diag(R), 2, atol=1e-12)
    W, F, R = gmd_precoder(S_A4_WINS)
    assert np.allclose(np.diag(R), 0.83049 ** 0.25, atol=1e-10)
    # fourth root of 1 * 0.95 * 0.94 * 0.93 = 0.83049
    assert np.allclose(np.diag(R), 0.954627, atol=1e-6)


def test_gmd_random():
    rng = np.random.default_rng(47)
    for _ in range(100):
        n = int(rng.integers(2, 9))
        s = np.sort(rng.uniform(0.01, 10, n))[::-1]
        W, F, R = gmd(s)
        rho = math.exp(np.mean(np.log(s)))
        assert np.max(np.abs(np.diag(R) - rho)) < 1e-10 * max(1, rho)
        assert np.allclose(W @ np.diag(s) @ F, R, atol=1e-10 * s[0])
        assert np.allclose(np.tril(R, -1), 0)
        assert np.allclose(W @ W.T, np.eye(n), atol=1e-10)
        assert np.allclose(F.T @ F, np.eye(n), atol=1e-10)


def test_gmd_floor():
    rng = np.random.default_rng(48)
    for _ in range(40):
        n = int(rng.integers(2, 5))
        S = random_spectrum(rng, n, 0.2, 2)
        _, F, _ = gmd_precoder(S)
        r = evaluate_precoder(F, S)
        assert r.normalized_dmin2 >= S.det ** (2 / n) / n - 1e-9


# evaluation

def test_evaluate_examples():
    r = evaluate_precoder(np.eye(2), (1, 1))
    assert (r.dmin2, r.power, r.normalized_dmin2) == (pytest.approx(1), pytest.approx(2), pytest.approx(0.5))
    _, F, _ = gmd_precoder((4, 1))
    assert evaluate_precoder(F, (4, 1)).dmin2 >= 4 - 1e-9


def test_evaluate_homogeneous():
    rng = np.random.default_rng(49)
    for _ in range(20):
        n = int(rng.integers(2, 5))
        S = random_spectrum(rng, n, 0.2, 2)
        F = rng.normal(size=(n, n))
        base = evaluate_precoder(F, S).normalized_dmin2
        for c in (0.5, 2, 10):
            assert evaluate_precoder(c * F, S).normalized_dmin2 == pytest.approx(base, rel=1e-12)


def test_evaluate_rejects_singular():
    with pytest.raises(ValueError):
        evaluate_precoder(np.array([[1.0, 1.0], [1.0, 1.0]]), (1, 1))


# suboptimal construction

def _reduced_classes(n):
    from latprec.perfect import perfect_classes
    recs = enumerate_perfect_forms(root_lattice_form(n), n + 1)
    return [minkowski_reduce(c[0])[0] for c in perfect_classes(recs)]


def test_suboptimal_examples():
    r = suboptimal_precoder((1, 1), _reduced_classes(2))
    assert r.power / r.dmin2 <= 2 + 1e-9
    g = gmd_baseline((2, 1))
    r = suboptimal_precoder((2, 1), [HEX])
    assert r.power / r.dmin2 < g.power - 1e-9
    S = ChannelSpectrum(S_A4_WINS)
    r = suboptimal_precoder(S, [D4, A4])
    L = np.linalg.cholesky(r.source_form.float_mirror).T
    assert lower_bound_energy(L, S) - 1e-9 <= r.power / r.dmin2 <= gmd_baseline(S).power + 1e-9


def test_suboptimal_result_is_consistent():
    rng = np.random.default_rng(50)
    cands = _reduced_classes(3)
    for _ in range(10):
        S = random_spectrum(rng, 3, 0.3, 1)
        r = suboptimal_precoder(S, cands)
        B = np.diag(S.array) @ r.F
        assert np.allclose(B.T @ B, r.source_form.float_mirror, atol=1e-9)
        assert r.dmin2 == pytest.approx(1, abs=1e-9)
