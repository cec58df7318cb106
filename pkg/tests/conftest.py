import itertools
from fractions import Fraction

import numpy as np
import pytest

from latprec.lattice import QuadraticForm, UnimodularMatrix

H = Fraction(1, 2)

HEX = QuadraticForm.from_matrix([[1, H], [H, 1]])
HEX_NEG = QuadraticForm.from_matrix([[1, -H], [-H, 1]])
D4 = QuadraticForm.from_matrix([[1, 0, H, 0], [0, 1, -H, 0], [H, -H, 1, -H], [0, 0, -H, 1]])
A4 = QuadraticForm.from_matrix([[1, -H, 0, 0], [-H, 1, -H, 0], [0, -H, 1, -H], [0, 0, -H, 1]])

# acceptance lines collected across the session and echoed in the terminal summary
_ACCEPTANCE: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)


def random_unimodular(rng, n, steps=6, mult=2):
    """Product of random elementary integer operations and signed swaps."""
    Z = np.eye(n, dtype=np.int64)
    for _ in range(steps):
        i, j = rng.choice(n, 2, replace=False)
        E = np.eye(n, dtype=np.int64)
        E[i, j] = rng.integers(-mult, mult + 1)
        Z = Z @ E
    P = np.eye(n, dtype=np.int64)[rng.permutation(n)]
    D = np.diag(rng.choice([-1, 1], n))
    Z = Z @ P @ D
    return UnimodularMatrix(tuple(map(tuple, Z.tolist())))


def random_rational_form(rng, n, lo=-4, hi=4, den=4):
    """Bᵀ B for a random non-singular integer matrix B / den."""
    while True:
        B = rng.integers(lo, hi + 1, size=(n, n))
        if round(abs(np.linalg.det(B))) >= 1:
            break
    M = (B.T @ B).tolist()
    return QuadraticForm.from_matrix([[Fraction(int(x), den * den) for x in row] for row in M])


def brute_vectors(G, bound, box):
    """{canonical x : 0 < G[x] <= bound, |x|_inf <= box} by exhaustive scan."""
    out = {}
    for x in itertools.product(range(-box, box + 1), repeat=G.dim):
        if not any(x):
            continue
        first = next(c for c in x if c)
        if first < 0:
            continue
        v = G.evaluate(x)
        if v <= bound:
            out[x] = v
    return out


def box_suffices(G, box):
    """True when every vector with G[x] <= min diag has all |x_i| <= box."""
    Ginv = np.linalg.inv(G.float_mirror)
    t = float(min(G.diag))
    return all(np.sqrt(t * Ginv[i, i]) < box + 1 - 1e-9 for i in range(G.dim))


def random_spectrum(rng, n, lo, hi):
    from latprec.channel import ChannelSpectrum
    return ChannelSpectrum.from_values(rng.uniform(lo, hi, n))
