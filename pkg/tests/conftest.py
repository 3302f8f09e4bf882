import os

import numpy as np
import pytest

from modelspace.matrix import RationalMatrix
from modelspace.scalar import RationalFunction

SEED = int(os.environ.get("MSK_SEED", "20240611"))


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


def circle(n=128):
    return np.exp(2j * np.pi * (np.arange(n) + 0.25) / n)


def random_point(rng, rmax=0.8):
    return rmax * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())


def separated_points(rng, k, rmax=0.8, sep=0.05, avoid=()):
    pts = list(avoid)
    out = []
    while len(out) < k:
        a = random_point(rng, rmax)
        if all(abs(a - b) >= sep for b in pts):
            pts.append(a)
            out.append(a)
    return out


def potapov_product(rng, n, zeros):
    """Product of Blaschke-Potapov factors (I - P) + b_a P with random rank-one projections."""
    T = RationalMatrix.identity(n)
    for a in zeros:
        v = rng.normal(size=(n, 1)) + 1j * rng.normal(size=(n, 1))
        v /= np.linalg.norm(v)
        P = v @ v.conj().T
        B = RationalMatrix.constant(np.eye(n) - P) + RationalMatrix.constant(P) * RationalFunction.blaschke_factor(a)
        T = T @ B
    return T


def random_unitary(rng, n):
    q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_poly_matrix(rng, rows, cols, deg=1):
    return RationalMatrix([[RationalFunction(rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1))
                            for _ in range(cols)] for _ in range(rows)], rows, cols)


def aligned_error(X, Y, z=None):
    """sup-error of X U - Y over the grid after Procrustes alignment by a constant unitary U."""
    z = circle() if z is None else z
    A, B = X(z), Y(z)
    M = np.einsum("kji,kjl->il", A.conj(), B)
    u, _, vh = np.linalg.svd(M)
    return float(np.max(np.abs(A @ (u @ vh) - B)))


def fft_fourier(f, k_lo, k_hi, n=4096):
    """Fourier coefficients by FFT on a fine grid (independent of the partial-fraction path)."""
    z = np.exp(2j * np.pi * np.arange(n) / n)
    c = np.fft.fft(f(z)) / n
    return np.array([c[k % n] for k in range(k_lo, k_hi + 1)])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for key in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[key])
