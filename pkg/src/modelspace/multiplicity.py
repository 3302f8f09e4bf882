"""
Multiplicity invariants of model operators with rational inner symbols.

The square case reads everything off the chain of minor gcds; non-square
inner functions are first reduced to their square "s-part" with
:func:`modelspace.beurling.delta_s`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .beurling import adjoint_hankel_kernel_inner, complementary_factor, delta_s, inner_outer_matrix, inner_part
from .errors import DegreeBoundExceeded, FormulaMismatch, NotAnalytic, RouteMismatch, Singular
from .matrix import GRID_SIZE, RationalMatrix, check_inner, minors
from .scalar import TAU_R, BlaschkeProduct, RationalFunction, bt_decompose, gcd_all, inner_lattice, lcm_all, unit_grid

ZERO_SPACE_NOTE = ("zero model space: the operator acts on {0}, which the multiplicity-free "
                   "convention counts as deg_B = 1")
FEAS_REL = 1e-8


@dataclass(frozen=True)
class DeltaSequence:
    entries: tuple

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, k):
        return self.entries[k]

    def degrees(self):
        return [d.degree for d in self.entries]

    def check_chain(self):
        ok = all(self.entries[k + 1].divides(self.entries[k]) for k in range(len(self.entries) - 1))
        return ok and self.entries[-1].is_trivial()


@dataclass(frozen=True)
class MultiplicityReport:
    mu: int
    route: str
    bounds: tuple
    certificates: dict = field(default_factory=dict)
    deg_b_convention: int | None = None
    note: str | None = None


@dataclass(frozen=True)
class CharScalarReport:
    omega: BlaschkeProduct
    m: BlaschkeProduct
    witness_G: RationalMatrix | None
    exponents: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ScalarMultipleReport:
    m: BlaschkeProduct
    witness_G: RationalMatrix
    inner: RationalMatrix


# ---------------------------------------------------------------------------
# minor chains
# ---------------------------------------------------------------------------

def _require_inner(delta):
    cert = check_inner(delta)
    if not cert.algebraic_pass:
        raise NotAnalytic(f"input is not inner (grid residual {cert.grid_residual:.2e})")
    return cert


def delta_sequence(delta):
    """``delta_k`` = gcd of the inner parts of the ``(N-k)``-minors, ``k = 0..N``."""
    N = delta.rows
    if delta.cols != N:
        raise ValueError("delta_sequence needs a square inner matrix")
    _require_inner(delta)
    out = []
    for k in range(N + 1):
        order = N - k
        if order == 0:
            out.append(BlaschkeProduct())
            continue
        parts = [inner_part(d) for d in minors(delta, order) if not d.is_zero(1e-11)]
        if not parts:
            raise Singular(f"all minors of order {order} vanish")
        out.append(gcd_all(parts))
    return DeltaSequence(tuple(out))


def _mu_from_chain(seq):
    ent = list(seq.entries) + [seq.entries[-1]]
    for k in range(len(seq.entries)):
        if ent[k].equals(ent[k + 1]):
            return k
    return len(seq.entries) - 1


def spectral_multiplicity(delta):
    cert = _require_inner(delta)
    n, r = delta.shape
    if n == r:
        seq = delta_sequence(delta)
        mu = _mu_from_chain(seq)
        certs = {"delta_degrees": seq.degrees(), "two_sided": cert.two_sided}
        note = ZERO_SPACE_NOTE if mu == 0 else None
        return MultiplicityReport(mu, "square-direct", (r, r + 1), certs, 1 if mu == 0 else mu, note)
    red = delta_s(delta)
    seq = delta_sequence(red.delta_s)
    mu_s = _mu_from_chain(seq)
    # the model space of a non-square inner function is never {0}
    mu = max(mu_s, 1)
    certs = {
        "delta_s_degrees": seq.degrees(),
        "kernel_dim": red.kernel.dim,
        "nullities": list(red.nullities),
        "factor_residual": red.residual,
        "delta_1_outer": red.outer_certified,
    }
    return MultiplicityReport(mu, "delta_s-reduction", (r, r + 1), certs, mu)


def nordgren_factors(delta):
    seq = delta_sequence(delta)
    return [seq[k].quotient(seq[k + 1]) for k in range(len(seq) - 1)]


def nordgren_diagonal(delta):
    """Diagonal ``diag(delta_0/delta_1, ..., delta_{N-1}/delta_N)``."""
    return RationalMatrix.diag([b.to_rational() for b in nordgren_factors(delta)])


def _is_diagonal(delta):
    if delta.rows != delta.cols:
        return False
    return all(delta.entries[i][j].is_exact_zero()
               for i in range(delta.rows) for j in range(delta.cols) if i != j)


def max_cardinality_formula(thetas):
    """Largest ``#sigma`` with a nontrivial gcd of ``{theta_i : i in sigma}``."""
    best = 0
    seen = []
    for th in thetas:
        for a, _ in th.zeros:
            if any(abs(a - s) <= TAU_R for s in seen):
                continue
            seen.append(a)
            probe = BlaschkeProduct(((a, 1),))
            best = max(best, sum(1 for t in thetas if probe.divides(t)))
    return best


def beurling_degree(delta):
    report = spectral_multiplicity(delta)
    if _is_diagonal(delta):
        thetas = [inner_part(delta.entries[i][i]) for i in range(delta.rows)]
        alt = max_cardinality_formula(thetas)
        if alt != report.mu:
            raise FormulaMismatch(f"delta formula gives {report.mu}, diagonal formula gives {alt}")
    return report.mu


# ---------------------------------------------------------------------------
# characteristic scalar inner functions
# ---------------------------------------------------------------------------

def omega(delta):
    """lcm of the bounded-type inner parts of the entries."""
    parts = []
    for row in delta.entries:
        for e in row:
            if not e.is_zero(1e-13):
                parts.append(bt_decompose(e).theta)
    return lcm_all(parts)


def _principal_coeffs(f, rho, M):
    """Coefficients of ``(z - rho)**-t``, ``t = 1..M``."""
    out = np.zeros(M, complex)
    if f.is_exact_zero():
        return out
    m, c = f.laurent(rho, M)
    for t in range(1, min(m, M) + 1):
        out[t - 1] = c[m - t]
    return out


def _disk_poles(*mats):
    pts = []
    for m in mats:
        for p, k in m.poles_in_disk():
            for i, (q, kq) in enumerate(pts):
                if abs(p - q) <= TAU_R * max(1.0, abs(q)):
                    pts[i] = (q, max(k, kq))
                    break
            else:
                pts.append((p, k))
    return pts


def _feasible(delta, dc_t, d):
    """Solve for polynomial ``C`` with ``d Delta~ + C Delta_c~`` analytic; return (ok, G)."""
    base = delta.para_conjugate() * d.to_rational()
    r, n = base.shape
    if dc_t is None or dc_t.rows == 0:
        return base.is_analytic(), (base if base.is_analytic() else None)
    nc = dc_t.rows
    poles = _disk_poles(base, dc_t)
    if not poles:
        return True, base
    # Hermite interpolation of C's jets at the poles needs degree < total order
    deg = sum(k for _, k in poles) - 1
    if deg > base.max_degree() + 2:
        raise DegreeBoundExceeded(f"multiplier degree {deg} exceeds bound {base.max_degree() + 2}")
    rows_G = []
    for i in range(r):
        A_cols, rhs = [], []
        for l in range(nc):
            for k in range(deg + 1):
                col = []
                for j in range(n):
                    f = dc_t.entries[l][j] * RationalFunction.monomial(k)
                    for rho, M in poles:
                        col.append(_principal_coeffs(f, rho, M))
                A_cols.append(np.concatenate(col))
        for j in range(n):
            for rho, M in poles:
                rhs.append(_principal_coeffs(base.entries[i][j], rho, M))
        A = np.array(A_cols).T
        b = -np.concatenate(rhs)
        x = np.linalg.lstsq(A, b, rcond=None)[0]
        res = np.linalg.norm(A @ x - b)
        scale = max(1.0, np.linalg.norm(b), np.linalg.norm(A))
        if res > FEAS_REL * scale:
            return False, None
        x = np.where(np.abs(x) > 1e-13 * max(1.0, np.max(np.abs(x), initial=0)), x, 0)
        C = [RationalFunction(x[l * (deg + 1):(l + 1) * (deg + 1)]) for l in range(nc)]
        Crow = RationalMatrix.row(C)
        rows_G.append(RationalMatrix.row(base.entries[i]) + Crow @ dc_t)
    G = RationalMatrix.vstack(rows_G)
    return G.is_analytic(), G


def char_scalar(delta):
    """``omega`` (lcm of entry inner parts) and ``m`` (gcd of scalar multiples) with a witness."""
    _require_inner(delta)
    om = omega(delta)
    n, r = delta.shape
    dc = complementary_factor(delta) if n > r else None
    dc_t = dc.para_conjugate() if dc is not None and dc.cols else None
    exps = {}
    zeros = list(om.zeros)
    for idx, (a, ma) in enumerate(zeros):
        lo, hi = 0, ma
        while lo < hi:
            mid = (lo + hi) // 2
            trial = tuple((b, mb if j != idx else mid) for j, (b, mb) in enumerate(zeros))
            ok, _ = _feasible(delta, dc_t, BlaschkeProduct(tuple(z for z in trial if z[1] > 0)))
            if ok:
                hi = mid
            else:
                lo = mid + 1
        exps[complex(a)] = lo
    m = BlaschkeProduct(tuple((a, exps[complex(a)]) for a, _ in zeros if exps[complex(a)] > 0))
    ok, G = _feasible(delta, dc_t, m)
    if ok:
        check = G @ delta - RationalMatrix.identity(r) * m.to_rational()
        if not check.is_zero(1e-8):
            G = None
    return CharScalarReport(om, m, G if ok else None, exps)


def scalar_multiple(A):
    """``m_A`` for a square ``A`` in H-infinity, with ``G = m_A A^{-1}`` in H-infinity."""
    if A.rows != A.cols:
        raise ValueError("scalar multiples need a square matrix")
    if A.det().is_zero(1e-12):
        raise Singular("det A vanishes identically")
    Ai = inner_outer_matrix(A).inner
    m = omega(Ai)
    G = A.inverse() * m.to_rational()
    if not G.is_analytic():
        raise NotAnalytic("m_A A^{-1} is not analytic")
    return ScalarMultipleReport(m, G, Ai)


def coprime_theta_A(theta, A):
    if A.rows != A.cols:
        raise ValueError("coprimeness test needs a square matrix")
    det = A.det()
    if det.is_zero(1e-12):
        raise Singular("det A vanishes identically")
    det_inner = inner_part(det)
    _, _, via_det = inner_lattice(theta, det_inner)
    mA = scalar_multiple(A).m
    _, _, via_m = inner_lattice(theta, mA)
    if via_det != via_m:
        raise RouteMismatch(f"det route says {via_det}, m_A route says {via_m}")
    return {
        "left_coprime": via_det,
        "right_coprime": via_det,
        "certificates": {"det_inner_degree": det_inner.degree, "m_A_degree": mA.degree,
                         "det_route": via_det, "m_A_route": via_m},
    }


def classify_contraction(delta):
    cert = _require_inner(delta)
    return {
        "is_C0dot": True,
        "is_C00": cert.two_sided,
        "is_C0": cert.two_sided,
        "note": "rational symbols always admit a pseudo-continuation of bounded type",
    }


def model_spectrum_lower(delta):
    """Conjugated zeros of ``omega``: a lower bound for the spectrum of the model operator."""
    _require_inner(delta)
    # adding 0.0 turns a signed zero into +0.0 so reports stay stable
    pts = [complex(np.conj(a).real + 0.0, np.conj(a).imag + 0.0) for a, _ in omega(delta).zeros]
    return sorted(pts, key=lambda z: (round(z.real, 10), round(z.imag, 10)))


def verify_interpolant(phi, K, grid_size=GRID_SIZE):
    if phi.rows != phi.cols or K.shape != phi.shape:
        raise ValueError("interpolation data must be square and of equal size")
    phi.check_no_pole_on_circle()
    K.check_no_pole_on_circle()
    feasible = (phi - K @ phi.para_conjugate()).is_analytic() and K.is_analytic()
    vals = K(unit_grid(grid_size))
    norm = float(np.max(np.linalg.norm(vals, ord=2, axis=(-2, -1))))
    plus = phi.map(lambda e: e.analytic_part())
    theta_plus = adjoint_hankel_kernel_inner(plus)
    theta_minus = adjoint_hankel_kernel_inner(phi.para_conjugate())
    inclusion = (theta_minus.para_conjugate() @ theta_plus).is_analytic()
    return {"feasible": bool(feasible), "norm_ok": norm <= 1 + 1e-8, "kernel_inclusion": bool(inclusion),
            "sup_norm_K": norm}
