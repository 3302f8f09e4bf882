import numpy as np
import pytest

from conftest import fft_fourier, random_point, random_poly_matrix
from modelspace.errors import NotPositive
from modelspace.matrix import RationalMatrix
from modelspace.scalar import RationalFunction, unit_grid
from modelspace.spectral import laurent_coefficients, matrix_spectral_factor

Z = RationalFunction.monomial(1)


def residual(O, G, n=512):
    z = unit_grid(n)
    Ov = O(z)
    return float(np.max(np.linalg.norm(np.conj(np.swapaxes(Ov, 1, 2)) @ Ov - G(z), axis=(1, 2))))


def det_zeros_outside(O):
    d = O.det()
    return all(abs(a) >= 1 - 1e-6 for a, _ in d.zeros())


def test_constant_positive():
    P = np.array([[4.0, 1.0], [1.0, 3.0]])
    sf = matrix_spectral_factor(RationalMatrix.constant(P))
    C = sf.outer.constant_value()
    assert np.allclose(C.conj().T @ C, P)
    assert np.allclose(C, np.triu(C)) and np.all(np.diag(C).real > 0)


def test_scalar_trig():
    sf = matrix_spectral_factor(RationalMatrix.diag([5 + 2 * Z + 2 / Z]))
    z = unit_grid(64)
    o = sf.outer(z)[:, 0, 0]
    assert np.allclose(o, 2 + z, atol=1e-8) or np.allclose(o, -(2 + z), atol=1e-8) \
        or np.allclose(o / o[0], (2 + z) / (2 + z[0]), atol=1e-8)
    assert sf.residual <= 1e-6


def test_identity():
    for p in (1, 3):
        sf = matrix_spectral_factor(RationalMatrix.identity(p))
        assert np.allclose(sf.outer.constant_value(), np.eye(p))


def test_random_gram_matrices(rng):
    for _ in range(8):
        p = int(rng.integers(1, 4))
        N = random_poly_matrix(rng, p + 1, p, deg=int(rng.integers(1, 3)))
        N = N * (1 / (Z - 2.0 * np.exp(2j * np.pi * rng.uniform())))
        G = N.para_conjugate() @ N
        sf = matrix_spectral_factor(G)
        assert residual(sf.outer, G) <= 1e-6 * max(1.0, float(np.max(np.abs(G(unit_grid(64))))))
        assert sf.outer.is_analytic()
        assert det_zeros_outside(sf.outer)


def test_laurent_coefficients_against_fft(rng):
    a = random_point(rng)
    G = RationalMatrix.diag([(3 + Z + 1 / Z) / ((1 - np.conj(a) * Z) * (1 - a / Z))])
    poles = np.array([1 / np.conj(a)])
    W, m = laurent_coefficients(G, poles)
    assert W.shape[0] == 2 * m + 1
    d = RationalFunction(np.poly(poles)[::-1])
    f = G.entries[0][0] * d * d.para_conjugate()
    ref = fft_fourier(f, -m, m)
    assert np.allclose(W[:, 0, 0], ref, atol=1e-10)


def test_not_positive():
    with pytest.raises(NotPositive):
        matrix_spectral_factor(RationalMatrix.diag([2 + 1.5 * Z + 1.5 / Z]))
    with pytest.raises(NotPositive):
        matrix_spectral_factor(RationalMatrix.diag([Z]))
