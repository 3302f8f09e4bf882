import numpy as np
import pytest

from conftest import aligned_error, potapov_product, random_point, random_unitary, separated_points
from modelspace.errors import NotAnalytic, Singular
from modelspace.matrix import RationalMatrix
from modelspace.multiplicity import (
    ZERO_SPACE_NOTE,
    beurling_degree,
    char_scalar,
    classify_contraction,
    coprime_theta_A,
    delta_sequence,
    max_cardinality_formula,
    model_spectrum_lower,
    nordgren_diagonal,
    omega,
    scalar_multiple,
    spectral_multiplicity,
    verify_interpolant,
)
from modelspace.scalar import BlaschkeProduct, RationalFunction, unit_grid

Z = RationalFunction.monomial(1)
S2 = 1 / np.sqrt(2)


def b(a):
    return RationalFunction.blaschke_factor(a)


def bp(*pairs):
    return BlaschkeProduct(tuple((complex(a), m) for a, m in pairs))


def diag(*items):
    return RationalMatrix.diag([RationalFunction.coerce(x) for x in items])


def col(*items):
    return RationalMatrix.column([RationalFunction.coerce(x) for x in items])


def mat(rows):
    return RationalMatrix([[RationalFunction.coerce(x) for x in r] for r in rows])


EXAMPLE_4X3 = [[Z, 0, 0], [0, Z, 0], [0, 0, 1], [0, 0, 0]]


# --- delta chains -----------------------------------------------------------

def test_delta_sequence_examples():
    assert delta_sequence(diag(Z, Z)).degrees() == [2, 1, 0]
    seq = delta_sequence(diag(Z ** 2, Z))
    assert seq.degrees() == [3, 1, 0] and seq.check_chain()
    U = RationalMatrix.constant(np.array([[0, 1j], [1, 0]]))
    assert delta_sequence(U).degrees() == [0, 0, 0]


def test_delta_sequence_requires_square_inner():
    with pytest.raises(ValueError):
        delta_sequence(col(S2, S2 * Z))
    with pytest.raises(NotAnalytic):
        delta_sequence(diag(2 * Z, 1))


def test_chain_random_potapov(rng):
    for _ in range(10):
        n = int(rng.integers(2, 5))
        T = potapov_product(rng, n, separated_points(rng, int(rng.integers(1, 7))))
        seq = delta_sequence(T)
        assert seq.check_chain()
        assert seq[len(seq) - 1].is_trivial()


# --- multiplicity -----------------------------------------------------------

def test_multiplicity_examples():
    assert spectral_multiplicity(diag(Z, 1)).mu == 1
    rep = spectral_multiplicity(mat(EXAMPLE_4X3))
    assert rep.mu == 2 and rep.route == "delta_s-reduction"
    assert rep.certificates["delta_1_outer"]
    U = RationalMatrix.constant(random_unitary(np.random.default_rng(1), 3))
    rep = spectral_multiplicity(U)
    assert rep.mu == 0 and rep.note == ZERO_SPACE_NOTE and rep.deg_b_convention == 1


def test_multiplicity_bounds_and_invariance(rng):
    for _ in range(6):
        n = int(rng.integers(2, 4))
        zs = separated_points(rng, 2)
        # repeat zeros so the chain has some structure
        T = potapov_product(rng, n, zs + zs[:1])
        mu = spectral_multiplicity(T).mu
        assert 0 <= mu <= n
        U = RationalMatrix.constant(random_unitary(rng, n))
        V = RationalMatrix.constant(random_unitary(rng, n))
        assert spectral_multiplicity(U @ T @ V).mu == mu


def test_multiplicity_non_square_column():
    rep = spectral_multiplicity(col(S2, S2 * Z))
    assert rep.mu == 1 and rep.bounds == (1, 2)


def test_square_two_sided_routes_agree():
    d = diag(Z, Z * b(0.4), b(0.4))
    direct = spectral_multiplicity(d).mu
    from modelspace.beurling import delta_s
    red = delta_s(d)
    assert spectral_multiplicity(red.delta_s).mu == direct


# --- Nordgren-Moore and Beurling degree -------------------------------------

def _diag_zeros(D):
    from modelspace.beurling import inner_part
    return [inner_part(D.entries[i][i]) for i in range(D.rows)]


def test_nordgren_examples():
    for src, expect in [((Z, Z), (bp((0, 1)), bp((0, 1)))),
                        ((Z ** 2, Z), (bp((0, 2)), bp((0, 1)))),
                        ((b(0.5), b(0.5)), (bp((0.5, 1)), bp((0.5, 1))))]:
        got = _diag_zeros(nordgren_diagonal(diag(*src)))
        assert all(g.equals(e) for g, e in zip(got, expect))


def test_nordgren_idempotent_and_invariant(rng):
    for _ in range(4):
        T = potapov_product(rng, 3, separated_points(rng, 2) * 2)
        D1 = nordgren_diagonal(T)
        D2 = nordgren_diagonal(D1)
        assert all(x.equals(y) for x, y in zip(_diag_zeros(D1), _diag_zeros(D2)))
        assert delta_sequence(D1).degrees() == delta_sequence(T).degrees()


def test_beurling_degree_examples():
    assert beurling_degree(diag(Z, Z, b(0.3))) == 2
    assert beurling_degree(mat(EXAMPLE_4X3)) == 2
    assert beurling_degree(RationalMatrix.identity(2)) == 0


def test_max_cardinality_formula():
    assert max_cardinality_formula([bp((0, 1)), bp((0, 1)), bp((0.3, 1))]) == 2
    assert max_cardinality_formula([BlaschkeProduct(), BlaschkeProduct()]) == 0


def test_diagonal_formulas_agree(rng):
    pool = [0, 0.5, -0.4j, 0.3 + 0.3j]
    for _ in range(20):
        n = int(rng.integers(1, 5))
        ents = []
        for _ in range(n):
            f = RationalFunction.const(1.0)
            for a in pool:
                f = f * b(a) ** int(rng.integers(0, 3))
            ents.append(f)
        beurling_degree(RationalMatrix.diag(ents))


# --- characteristic scalar inner functions ----------------------------------

def test_char_scalar_column():
    rep = char_scalar(col(S2, S2 * Z))
    assert rep.omega.equals(bp((0, 1)))
    assert rep.m.is_trivial()
    G = rep.witness_G
    assert G is not None and G.is_analytic()
    assert np.allclose(G.constant_value(), [[np.sqrt(2), 0]])


def test_char_scalar_completed():
    full = mat([[S2, S2], [S2 * Z, -S2 * Z]])
    rep = char_scalar(full)
    assert rep.omega.equals(bp((0, 1))) and rep.m.equals(bp((0, 1)))


def test_char_scalar_diagonal():
    a, c = 0.3 - 0.2j, -0.5
    rep = char_scalar(diag(b(a), b(c)))
    assert rep.omega.equals(bp((a, 1), (c, 1))) and rep.m.equals(rep.omega)
    z = unit_grid(64)
    G = rep.witness_G
    assert np.allclose(G(z) @ diag(b(a), b(c))(z), (b(a) * b(c))(z)[:, None, None] * np.eye(2), atol=1e-9)


def test_char_scalar_two_sided_random(rng):
    for _ in range(4):
        T = potapov_product(rng, 2, separated_points(rng, 2))
        rep = char_scalar(T)
        assert rep.m.equals(rep.omega)
        assert rep.m.divides(rep.omega)
        assert rep.witness_G.is_analytic()


# --- scalar multiples and coprimeness ---------------------------------------

def test_scalar_multiple_examples():
    a = 0.4j
    rep = scalar_multiple(diag(b(a), b(a)))
    assert rep.m.equals(bp((a, 1)))
    assert np.allclose(rep.witness_G.constant_value(), np.eye(2))
    rep = scalar_multiple(diag(Z, Z ** 2))
    assert rep.m.equals(bp((0, 2)))
    z = unit_grid(32)
    assert np.allclose(rep.witness_G(z), diag(Z, 1)(z), atol=1e-9)
    rep = scalar_multiple(mat([[2 + Z, 0], [1, 3]]))
    assert rep.m.is_trivial()


def test_scalar_multiple_singular():
    with pytest.raises(Singular):
        scalar_multiple(mat([[1, Z], [1, Z]]))


def test_coprime_examples():
    a = 0.3 + 0.1j
    assert not coprime_theta_A(bp((a, 1)), diag(b(a), 1))["left_coprime"]
    assert coprime_theta_A(bp((0, 1)), diag(b(a), b(a)))["right_coprime"]
    A = mat([[Z * (2 - Z), 1], [0, 1]])
    assert not coprime_theta_A(bp((0, 1)), A)["left_coprime"]


# --- classification, spectra, interpolation ---------------------------------

def test_classify():
    assert classify_contraction(diag(Z, b(0.2)))["is_C00"]
    c = classify_contraction(col(S2, S2 * Z))
    assert not c["is_C00"] and not c["is_C0"]
    assert not classify_contraction(mat(EXAMPLE_4X3))["is_C0"]


def test_model_spectrum_lower():
    a, c = 0.3 + 0.4j, -0.2j
    got = model_spectrum_lower(diag(b(a), b(c)))
    assert sorted(got, key=lambda x: x.imag) == sorted([np.conj(a), np.conj(c)], key=lambda x: x.imag)
    assert model_spectrum_lower(RationalMatrix.identity(2)) == []
    got = model_spectrum_lower(col(S2, S2 * Z))
    assert got == [0j] and str(got[0]) == "0j"


def test_omega_lcm():
    assert omega(diag(Z * b(0.5), Z ** 2)).equals(bp((0, 2), (0.5, 1)))


def test_verify_interpolant_examples():
    phi = diag(Z + 0.5, 1)
    rep = verify_interpolant(phi, RationalMatrix.zeros(2, 2))
    assert rep["feasible"] and rep["norm_ok"]
    herm = diag(2 + Z + 1 / Z, 1)
    rep = verify_interpolant(herm, RationalMatrix.identity(2))
    assert rep["feasible"] and rep["norm_ok"]
    a = 0.5
    phi = diag(b(a).para_conjugate())
    rep = verify_interpolant(phi, diag(b(a) ** 2))
    # b_a~ - b_a^2 b_a = b_a~ - b_a^3: the pole of b_a~ at a survives
    assert not rep["feasible"] and rep["norm_ok"]
    rep = verify_interpolant(phi, diag(b(a) ** 2 * 0 + 1.5))
    assert not rep["norm_ok"]
