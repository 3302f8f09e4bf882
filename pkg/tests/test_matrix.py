import itertools

import numpy as np
import pytest

from conftest import circle, fft_fourier, potapov_product, random_point, random_poly_matrix, random_unitary
from modelspace.errors import NotAnalytic, PoleOnCircle
from modelspace.matrix import (
    RationalMatrix,
    check_inner,
    complementing_infimum,
    fourier_block_coeffs,
    h2_inner_product,
    minors,
    para_conjugate_matrix,
    stabilized_hankel_rank,
    truncated_operator,
)
from modelspace.scalar import RationalFunction, unit_grid

Z = RationalFunction.monomial(1)
S2 = 1 / np.sqrt(2)


def b(a):
    return RationalFunction.blaschke_factor(a)


def col(*items):
    return RationalMatrix.column([RationalFunction.coerce(x) for x in items])


# --- minors -----------------------------------------------------------------

def test_minors_diag_zz():
    D = RationalMatrix.diag([Z, Z])
    z = circle(16)
    m2 = minors(D, 2)
    assert len(m2) == 1 and np.allclose(m2[0](z), z ** 2)
    m1 = minors(D, 1)
    assert [e.is_zero() for e in m1] == [False, True, True, False]
    assert minors(D, 0)[0].constant_value() == 1


def test_minors_against_numpy_det(rng):
    z = circle(8)
    for rows, cols, k in [(3, 3, 2), (3, 4, 3), (4, 4, 4), (5, 3, 2), (7, 7, 7)]:
        M = random_poly_matrix(rng, rows, cols, deg=1)
        got = minors(M, k)
        vals = M(z)
        expect = []
        for rs in itertools.combinations(range(rows), k):
            for cs in itertools.combinations(range(cols), k):
                expect.append(np.linalg.det(vals[:, rs][:, :, cs]))
        assert len(got) == len(expect)
        for g, e in zip(got, expect):
            assert np.allclose(g(z), e, rtol=1e-8, atol=1e-8)


def test_minors_order_out_of_range():
    with pytest.raises(ValueError):
        minors(RationalMatrix.identity(2), 3)


# --- para-conjugation -------------------------------------------------------

def test_para_conjugate_matrix_examples():
    z = circle(32)
    assert np.allclose(para_conjugate_matrix(RationalMatrix.diag([Z]))(z)[:, 0, 0], 1 / z)
    C = np.array([[1 + 2j, 3], [0.5j, -1]])
    assert np.allclose(RationalMatrix.constant(C).para_conjugate().constant_value(), C.conj().T)
    v = col(S2, S2 * Z).para_conjugate()
    assert v.shape == (1, 2)
    assert np.allclose(v(z)[:, 0, 1], S2 / z)


def test_para_conjugate_matrix_is_pointwise_adjoint(rng):
    z = unit_grid(512)
    M = random_poly_matrix(rng, 3, 2, deg=2) * (1 / (Z - 2.5))
    Mt = M.para_conjugate()
    assert np.allclose(Mt(z), np.conj(np.swapaxes(M(z), 1, 2)), atol=1e-10)
    assert np.allclose(Mt.para_conjugate()(z), M(z), atol=1e-10)


# --- inner certificates -----------------------------------------------------

def test_check_inner_examples():
    c = check_inner(RationalMatrix.diag([Z, b(0.3 - 0.4j)]))
    assert c.algebraic_pass and c.two_sided
    c = check_inner(col(S2, S2 * Z))
    assert c.algebraic_pass and not c.two_sided
    c = check_inner(col(1, 1))
    assert not c.algebraic_pass
    assert c.grid_residual == pytest.approx(1.0)


def test_check_inner_unitary_invariance(rng):
    for n in (2, 3):
        T = potapov_product(rng, n, [random_point(rng) for _ in range(3)])
        U, V = random_unitary(rng, n), random_unitary(rng, n)
        base = check_inner(T)
        moved = check_inner(RationalMatrix.constant(U) @ T @ RationalMatrix.constant(V))
        assert base.algebraic_pass and moved.algebraic_pass
        assert base.two_sided == moved.two_sided
        assert moved.grid_residual <= 1e-7
    # a perturbed product fails
    bad = T + RationalMatrix.constant(1e-3 * np.ones((n, n)))
    assert not check_inner(bad).algebraic_pass


def test_complementing_infimum():
    assert complementing_infimum(RationalMatrix.identity(2)) == pytest.approx(1.0)
    assert complementing_infimum(RationalMatrix.diag([Z, Z])) == pytest.approx(1.0)
    assert complementing_infimum(RationalMatrix.diag([Z - 1])) < 2 * np.pi / 512


def test_complementing_infimum_inner(rng):
    T = potapov_product(rng, 3, [random_point(rng) for _ in range(4)])
    assert complementing_infimum(T.columns([0, 1])) >= 1 - 1e-6


# --- Fourier blocks ---------------------------------------------------------

def test_fourier_block_examples():
    co = fourier_block_coeffs(RationalMatrix.diag([Z]), -2, 2)
    assert np.allclose([m[0, 0] for m in co.matrices], [0, 0, 0, 1, 0])
    co = fourier_block_coeffs(RationalMatrix.diag([1 / (1 - Z / 2)]), 0, 5)
    assert np.allclose([m[0, 0] for m in co.matrices], 2.0 ** -np.arange(6))
    co = fourier_block_coeffs(RationalMatrix.diag([1 / Z]), -3, 3)
    assert np.allclose([m[0, 0] for m in co.matrices], [0, 0, 1, 0, 0, 0, 0])


def test_fourier_blocks_flip_symmetry(rng):
    M = random_poly_matrix(rng, 2, 3, deg=1) * b(random_point(rng)) * (1 / (Z - 0.4j)) * Z
    co = fourier_block_coeffs(M, -5, 5)
    ct = fourier_block_coeffs(M.para_conjugate(), -5, 5)
    for k in range(-5, 6):
        assert np.allclose(ct.at(k), co.at(-k).conj().T, atol=1e-12)
    # independent FFT oracle on one entry
    ref = fft_fourier(M.entries[1][2], -5, 5)
    assert np.allclose([co.at(k)[1, 2] for k in range(-5, 6)], ref, atol=1e-10)
    C, rho = co.decay_estimate()
    assert C > 0 and 0 < rho < 1.0 + 1e-9


def test_fourier_blocks_analytic_vanish_negative(rng):
    M = random_poly_matrix(rng, 2, 2, deg=2) * (1 / (Z - 1.7))
    co = fourier_block_coeffs(M, -6, -1)
    assert max(np.abs(m).max() for m in co.matrices) <= 1e-12


def test_fourier_blocks_pole_on_circle():
    with pytest.raises(PoleOnCircle):
        fourier_block_coeffs(RationalMatrix.diag([1 / (Z + 1)]), 0, 2)


# --- truncated operators ----------------------------------------------------

def test_hankel_of_analytic_symbol_is_zero(rng):
    M = random_poly_matrix(rng, 2, 2, deg=2)
    op = truncated_operator(M, 4, "hankel")
    assert op.rank == 0 and np.allclose(op.matrix, 0)


def test_toeplitz_backward_shift():
    op = truncated_operator(RationalMatrix.diag([1 / Z]), 3, "toeplitz")
    expect = np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    assert np.allclose(op.matrix, expect)
    assert op.kernel_dim == 1
    for n in (4, 6, 9):
        assert truncated_operator(RationalMatrix.diag([1 / Z]), n, "toeplitz").kernel_dim == 1


def test_hankel_conj_blaschke_rank_one():
    phi = RationalMatrix.diag([b(0.5 + 0.2j).para_conjugate()])
    for n in (1, 2, 5, 10):
        assert truncated_operator(phi, n, "hankel").rank == 1


def test_stabilized_rank_matches_degree(rng):
    zeros = [random_point(rng) for _ in range(3)]
    T = potapov_product(rng, 2, zeros)
    rank, ranks = stabilized_hankel_rank(T.para_conjugate(), 12)
    assert rank == 3
    assert all(x <= y for x, y in zip(ranks, ranks[1:]))


def test_truncated_operator_kind_and_csv():
    with pytest.raises(ValueError):
        truncated_operator(RationalMatrix.identity(1), 2, "bogus")
    with pytest.raises(ValueError):
        truncated_operator(RationalMatrix.identity(1), 0, "hankel")
    csv = truncated_operator(RationalMatrix.diag([1 / Z]), 2, "toeplitz").to_csv()
    rows = csv.strip().split("\n")
    assert len(rows) == 2 and len(rows[0].split(",")) == 4


# --- H2 pairing -------------------------------------------------------------

def test_h2_szego_kernels():
    a, c = 0.3 + 0.2j, -0.5j
    ka, kc = RationalFunction.szego_kernel(a), RationalFunction.szego_kernel(c)
    got = h2_inner_product(RationalMatrix.diag([ka]), RationalMatrix.diag([kc]))
    assert got == pytest.approx(1 / (1 - np.conj(a) * c))


def test_h2_monomials():
    z1, z2 = RationalMatrix.diag([Z]), RationalMatrix.diag([Z ** 2])
    assert abs(h2_inner_product(z1, z2)) < 1e-14
    assert h2_inner_product(z1, z1) == pytest.approx(1.0)


def test_h2_reproducing_and_quadrature(rng):
    f = col((Z - 0.2) / (Z - 1.8), Z ** 2 + 0.5j)
    w = random_point(rng)
    e = np.array([0.6, -0.8j])
    g = col(*(RationalFunction.szego_kernel(w) * complex(x) for x in e))
    assert h2_inner_product(f, g) == pytest.approx(np.vdot(e, f.at(w)[:, 0]), abs=1e-10)
    h = col(b(0.4), 1 / (Z - 3j))
    z = unit_grid(4096)
    quad = np.mean(np.sum(f(z)[:, :, 0] * np.conj(h(z)[:, :, 0]), axis=1))
    assert h2_inner_product(f, h) == pytest.approx(quad, abs=1e-10)


def test_h2_rejects_nonanalytic():
    with pytest.raises(NotAnalytic):
        h2_inner_product(RationalMatrix.diag([1 / Z]), RationalMatrix.diag([Z]))
