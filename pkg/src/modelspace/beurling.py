"""
Constructive Beurling-Lax-Halmos layer.

Everything here works on rational symbols: the kernels of Hankel and
Toeplitz operators are finite-codimensional (or finite-dimensional), so
they can be written down through Szego-kernel representers, and the inner
function generating an invariant subspace is rebuilt from the reproducing
kernel of its orthocomplement.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CoprimenessUndecided,
    DegenerateProbe,
    DegreeOverflow,
    FitFailure,
    NotAnalytic,
    NotInvariant,
    RankDeficient,
    StabilizationFailure,
    SymbolicInputRequiresVerifier,
    ZeroClusterAmbiguity,
)
from .matrix import GRID_SIZE, InnerCertificate, RationalMatrix, check_inner, h2_inner_product, minors
from .scalar import (
    TAU_R,
    BlaschkeProduct,
    BoundaryZeroWarning,
    RationalFunction,
    from_roots,
    gcd_all,
    inner_outer_scalar,
    unit_grid,
)
from .spectral import matrix_spectral_factor

GRAM_RANK_REL = 1e-8
KERNEL_REL = 1e-7
NULL_REL = 1e-8


# ---------------------------------------------------------------------------
# small helpers
# ---------------------------------------------------------------------------

def reflect(e):
    """``e(1/z)`` as a rational function."""
    return e.para_conjugate().flip_conjugate()


def reflect_matrix(m):
    return m.map(reflect)


def inner_part(f):
    """Blaschke factor of an H-infinity scalar (trivial for the zero function is not allowed)."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BoundaryZeroWarning)
        return inner_outer_scalar(f).inner


def minors_inner_gcd(m, k=None, tol=TAU_R):
    """gcd of the inner parts of the nonzero ``k x k`` minors (``None`` when all vanish)."""
    k = min(m.rows, m.cols) if k is None else k
    parts = []
    for d in minors(m, k):
        if d.is_zero(1e-11):
            continue
        parts.append(inner_part(d))
    if not parts:
        return None
    return gcd_all(parts, tol)


def _combine(vectors, coeffs):
    acc = None
    for v, c in zip(vectors, coeffs):
        if abs(c) < 1e-15:
            continue
        term = v * complex(c)
        acc = term if acc is None else acc + term
    if acc is None:
        acc = RationalMatrix.zeros(vectors[0].rows, 1)
    return acc


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Condition:
    """Linear functional ``f -> sum_t weights[t] . f^{[t]}(point)`` on ``H^2_n``.

    ``f^{[t]}`` is the ``t``-th Taylor coefficient at ``point``.
    """

    point: complex
    weights: np.ndarray

    @property
    def order(self):
        nz = [t for t in range(self.weights.shape[0]) if np.any(np.abs(self.weights[t]) > 0)]
        return max(nz) if nz else 0

    def representer(self):
        n = self.weights.shape[1]
        col = []
        for j in range(n):
            acc = RationalFunction.zero()
            for t in range(self.weights.shape[0]):
                w = self.weights[t, j]
                if w != 0:
                    acc = acc + RationalFunction.szego_kernel(self.point, t) * np.conj(w)
            col.append(acc)
        return RationalMatrix.column(col)

    def apply(self, f):
        """Value of the functional on an analytic column ``f``."""
        T = self.weights.shape[0]
        total = 0j
        for j in range(self.weights.shape[1]):
            if not np.any(self.weights[:, j]):
                continue
            c = f.entries[j][0].taylor(self.point, T)
            total += np.dot(self.weights[:, j], c)
        return complex(total)


@dataclass(frozen=True)
class InterpolationConditions:
    n: int
    conditions: tuple = ()

    def __len__(self):
        return len(self.conditions)

    def __iter__(self):
        return iter(self.conditions)


class ModelSpace:
    """Finite-dimensional backward-shift invariant subspace of ``H^2_n``."""

    def __init__(self, n, basis, gram=None):
        self.n = n
        self.basis = list(basis)
        for b in self.basis:
            if not b.is_analytic():
                raise NotAnalytic("model space vectors must be analytic on the closed disk")
        if gram is None:
            k = len(self.basis)
            gram = np.zeros((k, k), complex)
            for i in range(k):
                for j in range(i, k):
                    gram[i, j] = h2_inner_product(self.basis[j], self.basis[i])
                    gram[j, i] = np.conj(gram[i, j])
        self.gram = np.asarray(gram, complex)

    @property
    def dim(self):
        return len(self.basis)

    @property
    def condition_number(self):
        if not self.dim:
            return 1.0
        return float(np.linalg.cond(self.gram))

    def orthonormal_basis(self):
        if not self.dim:
            return []
        lam, U = np.linalg.eigh(self.gram)
        out = []
        for i in range(self.dim):
            if lam[i] <= GRAM_RANK_REL * lam[-1]:
                continue
            out.append(_combine(self.basis, U[:, i] / np.sqrt(lam[i])))
        return out

    def check_invariance(self, tol=KERNEL_REL):
        """Raise :class:`NotInvariant` unless ``(f - f(0))/z`` stays in the span."""
        onb = self.orthonormal_basis()
        zinv = RationalFunction.monomial(-1)
        worst = 0.0
        for k in onb:
            f0 = k.at(0)[:, 0]
            h = RationalMatrix.column([(e - f0[i]) * zinv for i, e in enumerate(k.entries[j][0] for j in range(k.rows))])
            nh = h2_inner_product(h, h).real
            # form the residual vector itself; subtracting squared norms loses half the digits
            r = h - _combine(onb, [h2_inner_product(h, b) for b in onb])
            resid = max(h2_inner_product(r, r).real, 0.0)
            worst = max(worst, np.sqrt(resid) / max(1.0, np.sqrt(nh)))
        if worst > tol:
            raise NotInvariant(f"backward shift leaves the span by {worst:.3e}")
        return worst


@dataclass(frozen=True)
class InnerOuterPair:
    inner: RationalMatrix
    outer: RationalMatrix
    certificate: InnerCertificate
    residual: float


@dataclass(frozen=True)
class DSSFactorization:
    delta: RationalMatrix
    a: RationalMatrix
    inner: InnerCertificate
    coprime: bool
    coprime_gcd: BlaschkeProduct
    residual: float

    def __iter__(self):
        return iter((self.delta, self.a))


@dataclass(frozen=True)
class CanonicalDecomposition:
    delta: RationalMatrix
    a: RationalMatrix
    b: RationalMatrix
    nc: int
    dss: DSSFactorization

    def __iter__(self):
        return iter((self.delta, self.a, self.b))


@dataclass(frozen=True)
class DeltaSReduction:
    delta_s: RationalMatrix
    delta_1: RationalMatrix
    kernel: ModelSpace
    degree_bound: int
    nullities: tuple
    residual: float
    outer_certified: bool

    def __iter__(self):
        return iter((self.delta_s, self.delta_1))


# ---------------------------------------------------------------------------
# kernels and model spaces
# ---------------------------------------------------------------------------

def hankel_kernel_conditions(phi):
    """Conditions cutting out ``ker H_{phi*}``: ``phi~ f`` must be analytic in the disk."""
    phi.check_no_pole_on_circle()
    pt = phi.para_conjugate()
    n = phi.rows
    conds = []
    for rho, M in pt.poles_in_disk():
        # Laurent data of every entry aligned to order M
        lau = np.zeros((pt.rows, n, M), complex)
        for i in range(pt.rows):
            for j in range(n):
                e = pt.entries[i][j]
                if e.is_exact_zero():
                    continue
                m, c = e.laurent(rho, M)
                shift = M - m
                for s in range(M):
                    if 0 <= s - shift < len(c):
                        lau[i, j, s] = c[s - shift]
        for i in range(pt.rows):
            for k in range(1, M + 1):
                w = np.zeros((M, n), complex)
                for t in range(M - k + 1):
                    w[t] = lau[i, :, M - k - t]
                if np.any(np.abs(w) > 1e-14 * max(1.0, np.max(np.abs(lau)))):
                    conds.append(Condition(complex(rho), w))
    return InterpolationConditions(n, tuple(conds))


def model_space_from_conditions(conds, n=None):
    """Span of the representers of the conditions, pruned to an independent set."""
    n = conds.n if n is None else n
    reps = [c.representer() for c in conds]
    k = len(reps)
    if not k:
        return ModelSpace(n, [], np.zeros((0, 0)))
    gram = np.zeros((k, k), complex)
    for a, ca in enumerate(conds):
        for b in range(k):
            gram[a, b] = ca.apply(reps[b])
    gram = 0.5 * (gram + gram.conj().T)
    lam, U = np.linalg.eigh(gram)
    keep = lam > GRAM_RANK_REL * max(lam[-1], 1e-300)
    basis = [_combine(reps, U[:, i] / np.sqrt(lam[i])) for i in np.nonzero(keep)[0]]
    return ModelSpace(n, basis, np.eye(len(basis)))


def _probe_matrix(onb, n, w):
    acc = np.eye(n, dtype=complex)
    for kv in onb:
        v = kv.at(w)[:, 0]
        acc -= (1 - abs(w) ** 2) * np.outer(v, v.conj())
    return acc


def _probe_candidates():
    # real points first so real-coefficient data keeps real output
    yield 0j
    for r in (0.5, -0.5, 0.3, -0.3, 0.7, -0.7):
        yield complex(r)
    for r in (0.3, 0.6):
        for t in range(8):
            yield r * np.exp(2j * np.pi * (t + 0.25) / 8)


def model_space_to_inner(K, w0=None, check=True):
    """Two-sided inner ``Theta`` with ``H^2 - Theta H^2 = K``."""
    n = K.n
    if not K.dim:
        return RationalMatrix.identity(n)
    if check:
        K.check_invariance()
    onb = K.orthonormal_basis()
    if w0 is None:
        cands = list(_probe_candidates())
        lms = [np.linalg.eigvalsh(_probe_matrix(onb, n, w))[0] for w in cands]
        top = max(lms)
        # first candidate within a factor two of the best conditioned one
        w0 = next(w for w, lm in zip(cands, lms) if lm >= 0.5 * top)
    w0 = complex(w0)
    if abs(w0) >= 1:
        raise DegenerateProbe("probe point must lie inside the disk")
    Mw = _probe_matrix(onb, n, w0)
    Mw = 0.5 * (Mw + Mw.conj().T)
    lam, U = np.linalg.eigh(Mw)
    if lam[0] <= 1e-8:
        raise DegenerateProbe(f"M(w0) is singular at w0={w0} (lambda_min={lam[0]:.2e})")
    cinv = (U / np.sqrt(lam)) @ U.conj().T
    S = RationalMatrix.zeros(n, n)
    for kv in onb:
        S = S + kv @ kv.at(w0)[:, 0].conj()[None, :]
    lin = RationalFunction([1.0, -np.conj(w0)])
    M = RationalMatrix.identity(n) - S.map(lambda e: e * lin)
    theta = M @ cinv
    if check:
        cert = check_inner(theta)
        if not cert.two_sided:
            raise FitFailure(f"reconstructed function is not two-sided inner (residual {cert.grid_residual:.2e})",
                             cert.grid_residual)
    return theta


def adjoint_hankel_kernel_inner(phi, w0=None):
    """Two-sided inner ``Theta`` with ``ker H_{phi*} = Theta H^2``."""
    return model_space_to_inner(model_space_from_conditions(hankel_kernel_conditions(phi), phi.rows), w0)


# ---------------------------------------------------------------------------
# inner-outer factorization and nullspaces
# ---------------------------------------------------------------------------

def inner_outer_matrix(N, grid_size=GRID_SIZE):
    """``N = N^i N^e`` for analytic ``N`` of full column rank."""
    if not N.is_analytic():
        raise NotAnalytic("inner-outer factorization needs an analytic matrix")
    z = unit_grid(grid_size)
    vals = N(z)
    s = np.linalg.svd(vals, compute_uv=False)
    if N.rows < N.cols or np.max(s[..., -1]) <= 1e-9 * max(1.0, float(np.max(s))):
        raise RankDeficient("matrix does not have full column rank")
    G = N.para_conjugate() @ N
    outer = matrix_spectral_factor(G, grid_size).outer
    inner = N @ outer.inverse()
    resid = float(np.max(np.abs(inner(z) @ outer(z) - vals)))
    if resid > 1e-6 * max(1.0, float(np.max(np.abs(vals)))):
        raise FitFailure(f"inner-outer reconstruction residual {resid:.2e}", resid)
    cert = check_inner(inner, grid_size)
    if not cert.algebraic_pass:
        raise FitFailure(f"inner factor fails the inner check ({cert.grid_residual:.2e})", cert.grid_residual)
    return InnerOuterPair(inner, outer, cert, resid)


def _clear_denominators(M):
    """Multiply each row by its common denominator (poles, including z-powers)."""
    rows = []
    for row in M.entries:
        merged = []
        for e in row:
            for p, m in e.distinct_poles():
                for i, (q, mq) in enumerate(merged):
                    if abs(p - q) <= TAU_R * max(1.0, abs(q)):
                        merged[i] = (q, max(m, mq))
                        break
                else:
                    merged.append((p, m))
        roots = [p for p, m in merged for _ in range(m)]
        d = RationalFunction(from_roots(roots))
        new = []
        for e in row:
            f = e * d
            if f.poles.size:
                raise DegreeOverflow("denominator clearing left a pole behind")
            new.append(np.asarray(f.num))
        rows.append(new)
    return rows


def _conv_matrix(prow, deg):
    """Map coefficients of ``v`` (degree <= deg, n entries) to those of ``sum_j p_j v_j``."""
    n = len(prow)
    dp = max(len(c) for c in prow) - 1
    out = np.zeros((dp + deg + 1, n * (deg + 1)), complex)
    for j, c in enumerate(prow):
        for k in range(deg + 1):
            out[k:k + len(c), k * n + j] += c
    return out


def _null(A, rel=NULL_REL):
    if A.shape[0] == 0:
        return np.eye(A.shape[1], dtype=complex)
    u, s, vh = np.linalg.svd(A)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > rel * max(smax, 1e-300)))
    return vh[rank:].conj().T


def _shifted(vec, n, deg_from, deg_to, k):
    out = np.zeros(n * (deg_to + 1), complex)
    out[k * n:(k + deg_from + 1) * n] = vec[:n * (deg_from + 1)]
    return out


def poly_nullspace_basis(M):
    """Minimal-degree polynomial basis of the pointwise right nullspace of ``M``."""
    r, n = M.rows, M.cols
    if r >= n:
        raise ValueError("nullspace basis needs more columns than rows")
    target = n - r
    prows = _clear_denominators(M)
    maxdeg = max(max(len(c) - 1 for c in row) for row in prows)
    bound = max(4 * max(maxdeg, 1) * n, 1)
    found = []  # (degree, coefficient vector of length n*(deg+1))
    for deg in range(bound + 1):
        T = np.vstack([_conv_matrix(row, deg) for row in prows])
        N = _null(T)
        if found:
            S = np.array([_shifted(v, n, d, deg, k) for d, v in found for k in range(deg - d + 1)]).T
            q, _ = np.linalg.qr(S)
            N = N - q @ (q.conj().T @ N)
        if N.shape[1]:
            u, s, _ = np.linalg.svd(N, full_matrices=False)
            new = u[:, s > 1e-6]
            for i in range(new.shape[1]):
                found.append((deg, new[:, i]))
        if len(found) > target:
            raise RankDeficient("nullspace larger than expected: input drops rank identically")
        if len(found) == target:
            break
    else:
        raise DegreeOverflow(f"no complete nullspace basis up to degree {bound}")
    cols = []
    for deg, v in found:
        coeffs = v.reshape(deg + 1, n)
        scale = np.max(np.abs(coeffs))
        coeffs = np.where(np.abs(coeffs) > 1e-12 * scale, coeffs, 0)
        big = coeffs.ravel()[np.argmax(np.abs(coeffs.ravel()) > 0.5 * scale)]
        coeffs = coeffs * (abs(big) / big) / np.linalg.norm(coeffs)
        cols.append([RationalFunction(coeffs[:, j]) for j in range(n)])
    V = RationalMatrix([[cols[c][i] for c in range(target)] for i in range(n)], n, target)
    if not (M @ V).is_zero(1e-9):
        raise FitFailure("nullspace basis does not annihilate the input")
    return V


def complementary_factor(delta):
    """Inner ``Delta_c`` whose columns complete ``Delta`` to a two-sided inner function."""
    cert = check_inner(delta)
    if not cert.algebraic_pass:
        raise NotAnalytic("complementary factor needs an inner input")
    if delta.rows == delta.cols:
        return RationalMatrix([[] for _ in range(delta.rows)], delta.rows, 0)
    V = poly_nullspace_basis(delta.para_conjugate())
    return inner_outer_matrix(V).inner


# ---------------------------------------------------------------------------
# decompositions
# ---------------------------------------------------------------------------

def coprime_certificate(delta, a):
    """Right-coprimeness of ``(delta, a)``: maximal minors of ``[delta^, a^]`` share no zero."""
    F = RationalMatrix.hstack([delta.flip_adjoint(), a.flip_adjoint()])
    try:
        g = minors_inner_gcd(F, F.rows)
    except ZeroClusterAmbiguity as exc:
        raise CoprimenessUndecided(str(exc)) from exc
    if g is None:
        return False, None
    return g.is_trivial(), g


def dss_factorize(phi, w0=None):
    """``phi = Delta A~`` with ``Delta`` two-sided inner and ``(Delta, A)`` right coprime."""
    delta = adjoint_hankel_kernel_inner(phi, w0)
    a = phi.para_conjugate() @ delta
    if not a.is_analytic():
        raise NotAnalytic("A = phi~ Delta is not analytic: kernel inner function is wrong")
    diff = phi - delta @ a.para_conjugate()
    z = unit_grid(GRID_SIZE)
    resid = float(np.max(np.abs(diff(z)))) if diff.rows and diff.cols else 0.0
    if not diff.is_zero(1e-8):
        raise FitFailure(f"reconstruction residual {resid:.2e}", resid)
    coprime, g = coprime_certificate(delta, a)
    return DSSFactorization(delta, a, check_inner(delta), coprime, g, resid)


def canonical_decompose(phi, w0=None):
    if not isinstance(phi, RationalMatrix):
        raise SymbolicInputRequiresVerifier("symbolic input: use verify_canonical instead")
    dss = dss_factorize(phi, w0)
    b = RationalMatrix.zeros(phi.rows, phi.cols)
    return CanonicalDecomposition(dss.delta, dss.a, b, phi.rows, dss)


def _toeplitz_kernel(sym, q, r, deg):
    """Null vectors ``p`` (deg <= deg) with ``P_+(sym p/q) = 0``; returns (basis list, nullity)."""
    n = sym.rows
    cols = []
    total = sym.max_degree() + q.deg_den + deg + 2
    L = 2 * total + 8
    for k in range(deg + 1):
        mono = RationalFunction.monomial(k) / q
        for j in range(r):
            blocks = []
            for i in range(n):
                e = sym.entries[i][j]
                if e.is_exact_zero():
                    blocks.append(np.zeros(L + 1, complex))
                else:
                    blocks.append((e * mono).fourier(0, L))
            cols.append(np.concatenate(blocks))
    A = np.array(cols).T
    u, s, vh = np.linalg.svd(A)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > KERNEL_REL * max(smax, 1e-300)))
    null = vh[rank:].conj().T
    return null, null.shape[1]


def delta_s(delta):
    """``Delta = Delta_1 Delta_s`` with ``Delta_s`` square two-sided inner and ``Delta_1~`` outer."""
    cert = check_inner(delta)
    if not cert.algebraic_pass:
        raise NotAnalytic("delta_s needs an inner input")
    n, r = delta.shape
    F = delta.flip_adjoint()
    g = minors_inner_gcd(F, r)
    if g is None:
        raise RankDeficient("all maximal minors vanish")
    dstar = g.degree
    if dstar == 0:
        K = ModelSpace(r, [], np.zeros((0, 0)))
        ds = RationalMatrix.identity(r)
        return DeltaSReduction(ds, delta, K, 0, (0,), 0.0, True)
    lam = g.multiset()
    q = RationalFunction.const(1.0)
    for a in lam:
        if a != 0:
            q = q * RationalFunction([1.0, -np.conj(a)])
    sym = reflect_matrix(delta)
    # nullity must equal d* for three consecutive degree bounds, at the latest by d*+4
    nullities = []
    null = None
    for deg in range(dstar - 1, dstar + 4):
        v, k = _toeplitz_kernel(sym, q, r, deg)
        nullities.append(k)
        if k == dstar and null is None:
            null, ndeg = v, deg
        if len(nullities) >= 3 and all(x == dstar for x in nullities[-3:]):
            break
    else:
        raise StabilizationFailure(f"Toeplitz kernel dimensions {nullities} do not settle at {dstar}")
    basis = []
    for c in range(null.shape[1]):
        coeffs = null[:, c].reshape(ndeg + 1, r)
        basis.append(RationalMatrix.column([RationalFunction(coeffs[:, j]) / q for j in range(r)]))
    K = ModelSpace(r, basis)
    theta = model_space_to_inner(K)
    ds = theta.flip_adjoint()
    d1 = delta @ ds.para_conjugate()
    if not d1.is_analytic():
        raise NotAnalytic("Delta_1 picked up a pole in the disk")
    z = unit_grid(GRID_SIZE)
    resid = float(np.max(np.abs(d1(z) @ ds(z) - delta(z))))
    g1 = minors_inner_gcd(d1.flip_adjoint(), r)
    outer_ok = g1 is not None and g1.is_trivial()
    return DeltaSReduction(ds, d1, K, dstar, tuple(nullities), resid, outer_ok)
