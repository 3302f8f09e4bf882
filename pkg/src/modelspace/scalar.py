"""
Scalar layer: complex polynomials, rational functions with explicitly
tracked poles, and finite Blaschke products.

A :class:`RationalFunction` stores its numerator as a coefficient array
(lowest degree first) and its monic denominator as the multiset of its
poles.  Keeping the poles explicit means sums and products never have to
re-discover a denominator by root finding; only division and zero
extraction call the companion-matrix root finder.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import (
    NotAnalytic,
    NotNonnegative,
    OddBoundaryMultiplicity,
    PoleOnCircle,
    ZeroClusterAmbiguity,
)

TAU_C = 1e-12       # relative coefficient chop
TAU_R = 1e-8        # root clustering / identity
TAU_CANCEL = 1e-11   # relative |num(p)| below which a pole is cancelled (multiple roots)
EPS = np.finfo(float).eps


class BoundaryZeroWarning(UserWarning):
    """A zero on the unit circle was kept in the outer factor."""


# ---------------------------------------------------------------------------
# polynomial helpers (coefficient arrays, lowest degree first)
# ---------------------------------------------------------------------------

def trim(c, rel=TAU_C):
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    if c.size == 0:
        return np.zeros(1, complex)
    scale = np.max(np.abs(c))
    if not np.isfinite(scale):
        raise ValueError("non-finite polynomial coefficient")
    if scale == 0.0:
        return np.zeros(1, complex)
    nz = np.nonzero(np.abs(c) > rel * scale)[0]
    return c[: nz[-1] + 1].copy()


def chop(c, scale, rel=TAU_C):
    """Zero out coefficients that are rounding noise relative to ``scale``."""
    c = np.array(c, dtype=complex)
    c[np.abs(c) <= rel * scale] = 0.0
    return c


def is_zero_poly(c):
    return bool(np.all(c == 0))


def from_roots(roots):
    roots = np.asarray(roots, complex)
    if roots.size == 0:
        return np.ones(1, complex)
    return P.polyfromroots(roots).astype(complex)


def deflate(c, p):
    """Divide ``c`` by ``(z - p)`` dropping the remainder.

    Forward recursion is used for |p| <= 1 and backward recursion
    otherwise, which keeps the division stable in both regimes.
    """
    n = len(c)
    if n <= 1:
        return np.zeros(1, complex)
    q = np.zeros(n - 1, complex)
    if abs(p) <= 1.0:
        q[-1] = c[-1]
        for k in range(n - 2, 0, -1):
            q[k - 1] = c[k] + p * q[k]
    else:
        q[0] = -c[0] / p
        for k in range(1, n - 1):
            q[k] = (q[k - 1] - c[k]) / p
    return q


def taylor_shift(c, w, count):
    """First ``count`` Taylor coefficients of the polynomial ``c`` at ``w``."""
    n = len(c)
    out = np.zeros(count, complex)
    for k in range(min(count, n)):
        s = 0j
        for j in range(k, n):
            s += c[j] * math.comb(j, k) * w ** (j - k)
        out[k] = s
    return out


def series_mul(a, b, count):
    return np.convolve(a, b)[:count]


def cluster_roots(roots, tol=TAU_R):
    """Group numerically computed roots into (centroid, multiplicity) pairs.

    A group of ``m`` roots is accepted as one multiple root when its spread
    is within the perturbation radius expected for an m-fold root in double
    precision, ``10 * eps**(1/m)`` (relative), or within ``tol``.
    """
    roots = np.asarray(roots, complex).ravel()
    remaining = list(range(roots.size))
    clusters = []
    while remaining:
        pts = roots[remaining]
        best = None
        for ii, i in enumerate(remaining):
            d = np.abs(pts - roots[i])
            order = np.argsort(d, kind="stable")
            for m in range(len(remaining), 1, -1):
                grp = order[:m]
                c = pts[grp].mean()
                spread = np.max(np.abs(pts[grp] - c))
                radius = max(tol, 10.0 * EPS ** (1.0 / m)) * max(1.0, abs(c))
                if spread <= radius:
                    if best is None or m > best[0] or (m == best[0] and spread < best[1]):
                        best = (m, spread, [remaining[g] for g in grp])
                    break
        if best is None:
            for i in remaining:
                clusters.append((complex(roots[i]), 1))
            break
        idx = best[2]
        clusters.append((complex(roots[idx].mean()), len(idx)))
        remaining = [i for i in remaining if i not in idx]
    return sort_points(clusters)


def point_key(z):
    return (round(z.real, 9), round(z.imag, 9))


def sort_points(pairs):
    return sorted(pairs, key=lambda t: point_key(t[0]))


def poly_roots(c):
    c = trim(c)
    if len(c) <= 1:
        return []
    r = P.polyroots(c)
    return cluster_roots(r)


# ---------------------------------------------------------------------------
# rational functions
# ---------------------------------------------------------------------------

def _cancel(num, poles):
    num = trim(num)
    if is_zero_poly(num):
        return num, np.zeros(0, complex)
    poles = list(poles)
    changed = True
    while changed and poles and len(num) > 1:
        changed = False
        roots = P.polyroots(num)
        for i, p in enumerate(poles):
            # a pole at (or near) the origin must not shrink the scale to the constant term alone
            absp = max(abs(p), 1.0)
            scale = np.sum(np.abs(num) * absp ** np.arange(len(num)))
            near_root = np.any(np.abs(roots - p) <= TAU_R * absp)
            if near_root or abs(P.polyval(p, num)) <= TAU_CANCEL * scale:
                num = trim(deflate(num, p))
                del poles[i]
                changed = True
                break
    return num, np.asarray(poles, complex)


def _sorted_poles(poles):
    poles = np.asarray(poles, complex).ravel()
    if poles.size == 0:
        return poles
    keys = [point_key(p) for p in poles]
    order = sorted(range(len(poles)), key=lambda i: keys[i])
    return poles[order]


def _match_poles(pa, pb, tol=TAU_R):
    """Union of two pole multisets plus the factors each side is missing."""
    used = np.zeros(len(pa), bool)
    missing_from_a = []
    for q in pb:
        hit = None
        for i, p in enumerate(pa):
            if not used[i] and abs(p - q) <= tol * max(1.0, abs(q)):
                hit = i
                break
        if hit is None:
            missing_from_a.append(q)
        else:
            used[hit] = True
    missing_from_b = [p for i, p in enumerate(pa) if not used[i]]
    union = np.concatenate([np.asarray(pa, complex), np.asarray(missing_from_a, complex)])
    return union, missing_from_a, missing_from_b


class RationalFunction:
    """Reduced complex rational function ``num(z) / prod(z - p)``."""

    __slots__ = ("num", "poles")

    def __init__(self, num, poles=(), reduce=True):
        num = np.atleast_1d(np.asarray(num, dtype=complex))
        poles = np.asarray(poles, dtype=complex).ravel()
        if not (np.all(np.isfinite(num)) and np.all(np.isfinite(poles))):
            raise ValueError("rational function with non-finite data")
        if reduce:
            num, poles = _cancel(num, poles)
        else:
            num = trim(num)
        num.setflags(write=False)
        poles = _sorted_poles(poles)
        poles.setflags(write=False)
        self.num = num
        self.poles = poles

    # -- constructors -------------------------------------------------------
    @classmethod
    def const(cls, c):
        return cls([complex(c)])

    @classmethod
    def zero(cls):
        return cls([0j])

    @classmethod
    def poly(cls, coeffs):
        return cls(coeffs)

    @classmethod
    def monomial(cls, k, c=1.0):
        if k >= 0:
            coeffs = np.zeros(k + 1, complex)
            coeffs[k] = c
            return cls(coeffs)
        return cls([c], [0j] * (-k))

    @classmethod
    def from_coeffs(cls, num, den):
        """Build from numerator/denominator coefficient arrays (lowest first)."""
        den = trim(den)
        if is_zero_poly(den):
            raise ZeroDivisionError("zero denominator")
        lead = den[-1]
        poles = []
        for r, m in poly_roots(den):
            poles.extend([r] * m)
        return cls(np.asarray(num, complex) / lead, poles)

    @classmethod
    def blaschke_factor(cls, alpha):
        alpha = complex(alpha)
        if abs(alpha) < TAU_C:
            return cls([0j, 1.0])
        c = -1.0 / np.conj(alpha)
        return cls(np.array([-alpha, 1.0]) * c, [1.0 / np.conj(alpha)])

    @classmethod
    def szego_kernel(cls, w, order=0):
        """``z**order / (1 - conj(w) z)**(order+1)``, the Taylor-coefficient representer at ``w``."""
        w = complex(w)
        num = np.zeros(order + 1, complex)
        num[order] = 1.0
        if abs(w) < TAU_C:
            return cls(num)
        wc = np.conj(w)
        return cls(num / (-wc) ** (order + 1), [1.0 / wc] * (order + 1))

    # -- basic structure ------------------------------------------------------
    @property
    def den(self):
        return from_roots(self.poles)

    @property
    def deg_num(self):
        return 0 if self.is_exact_zero() else len(self.num) - 1

    @property
    def deg_den(self):
        return len(self.poles)

    def is_exact_zero(self):
        return is_zero_poly(self.num)

    def is_zero(self, tol=1e-9):
        scale = max(1.0, float(np.max(np.abs(self.den))))
        return bool(np.max(np.abs(self.num)) <= tol * scale)

    def is_constant(self):
        return len(self.num) == 1 and self.poles.size == 0

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("not a constant")
        return complex(self.num[0])

    def __repr__(self):
        return f"RationalFunction(num={np.round(self.num, 12).tolist()}, poles={np.round(self.poles, 12).tolist()})"

    # -- evaluation -------------------------------------------------------------
    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        val = P.polyval(z, self.num)
        for p in self.poles:
            val = val / (z - p)
        return val

    # -- arithmetic ---------------------------------------------------------------
    @staticmethod
    def coerce(x):
        if isinstance(x, RationalFunction):
            return x
        if isinstance(x, (int, float, complex, np.number)):
            return RationalFunction.const(x)
        return NotImplemented

    def __add__(self, other):
        other = RationalFunction.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_exact_zero():
            return self
        if self.is_exact_zero():
            return other
        union, miss_a, miss_b = _match_poles(self.poles, other.poles)
        ta = P.polymul(self.num, from_roots(miss_a))
        tb = P.polymul(other.num, from_roots(miss_b))
        scale = max(np.max(np.abs(ta)), np.max(np.abs(tb)))
        num = chop(P.polyadd(ta, tb), scale)
        return RationalFunction(num, union)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.poles, reduce=False)

    def __sub__(self, other):
        other = RationalFunction.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            if other == 0:
                return RationalFunction.zero()
            return RationalFunction(self.num * other, self.poles, reduce=False)
        other = RationalFunction.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_exact_zero() or other.is_exact_zero():
            return RationalFunction.zero()
        num = P.polymul(self.num, other.num)
        return RationalFunction(num, np.concatenate([self.poles, other.poles]))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self * (1.0 / other)
        other = RationalFunction.coerce(other)
        if other.is_exact_zero():
            raise ZeroDivisionError("division by the zero rational function")
        lead = other.num[-1]
        new_poles = list(self.poles)
        for r, m in other.zeros():
            new_poles.extend([r] * m)
        num = P.polymul(self.num, other.den) / lead
        return RationalFunction(num, new_poles)

    def __rtruediv__(self, other):
        return RationalFunction.coerce(other) / self

    def __pow__(self, k):
        out = RationalFunction.const(1.0)
        for _ in range(int(k)):
            out = out * self
        return out

    # -- conjugations -----------------------------------------------------------
    def para_conjugate(self):
        """``conj(R(1/conj(z)))``; agrees with ``conj(R(z))`` on the circle."""
        if self.is_exact_zero():
            return self
        dn = len(self.num) - 1
        m = self.poles.size
        nrev = np.conj(self.num[::-1])
        nz = [p for p in self.poles if p != 0]
        c = np.prod([-np.conj(p) for p in nz]) if nz else 1.0
        new_poles = [1.0 / np.conj(p) for p in nz]
        shift = m - dn
        if shift >= 0:
            nrev = np.concatenate([np.zeros(shift, complex), nrev])
        else:
            new_poles.extend([0j] * (-shift))
        return RationalFunction(nrev / c, new_poles)

    def flip_conjugate(self):
        """``conj(R(conj(z)))`` (conjugate every coefficient)."""
        return RationalFunction(np.conj(self.num), np.conj(self.poles), reduce=False)

    # -- zeros, poles, expansions -------------------------------------------------
    def zeros(self):
        if self.is_exact_zero():
            raise ValueError("the zero function has no zero multiset")
        return poly_roots(self.num)

    def distinct_poles(self):
        return cluster_roots(self.poles) if self.poles.size else []

    def poles_in_disk(self, closed=True):
        r = 1.0 + TAU_R if closed else 1.0 - TAU_R
        return [(p, m) for p, m in self.distinct_poles() if abs(p) < r]

    def check_no_pole_on_circle(self):
        for p, _ in self.distinct_poles():
            if abs(abs(p) - 1.0) <= TAU_R:
                raise PoleOnCircle(f"pole at {p} lies on the unit circle")

    def is_analytic_in_closed_disk(self):
        return not self.poles_in_disk(closed=True)

    def pole_order_at(self, w, tol=TAU_R):
        return int(np.sum(np.abs(self.poles - w) <= tol * max(1.0, abs(w))))

    def laurent(self, w, count, order=None):
        """Laurent coefficients at ``w``.

        Returns ``(m, c)`` where ``m`` is the pole order at ``w`` and ``c[j]``
        is the coefficient of ``(z - w)**(j - m)`` for ``j < count``.
        """
        w = complex(w)
        if order is None:
            order = self.pole_order_at(w)
        if self.is_exact_zero():
            return order, np.zeros(count, complex)
        near = np.abs(self.poles - w) <= TAU_R * max(1.0, abs(w))
        others = self.poles[~near]
        series = taylor_shift(self.num, w, count)
        for q in others:
            d = w - q
            s = np.array([(-1) ** i / d ** (i + 1) for i in range(count)], complex)
            series = series_mul(series, s, count)
        return int(np.sum(near)), series

    def taylor(self, w, count):
        m, c = self.laurent(w, count)
        if m:
            raise NotAnalytic(f"pole of order {m} at {w}")
        return c

    def principal_parts(self):
        """Map distinct pole -> array ``c`` with ``c[k-1]`` the coefficient of ``(z-p)**-k``."""
        parts = []
        for p, m in self.distinct_poles():
            _, lc = self.laurent(p, m)
            parts.append((p, lc[::-1].copy()))
        return parts

    def polynomial_part(self):
        if self.is_exact_zero() or len(self.num) - 1 < self.poles.size:
            return np.zeros(1, complex)
        q, _ = P.polydiv(self.num, self.den)
        return trim(q)

    def fourier(self, k_lo, k_hi):
        """Fourier coefficients on the unit circle for ``k_lo <= k <= k_hi``."""
        self.check_no_pole_on_circle()
        ks = np.arange(k_lo, k_hi + 1)
        out = np.zeros(ks.size, complex)
        poly = self.polynomial_part()
        for k, c in enumerate(poly):
            if k_lo <= k <= k_hi:
                out[k - k_lo] += c
        for p, coeffs in self.principal_parts():
            for kk, c in enumerate(coeffs, start=1):
                if c == 0:
                    continue
                if abs(p) > 1:
                    # (z-p)^-k = (-p)^-k sum_n C(n+k-1,k-1) (z/p)^n
                    for i, n in enumerate(ks):
                        if n >= 0:
                            out[i] += c * (-p) ** (-kk) * math.comb(n + kk - 1, kk - 1) * p ** (-n)
                else:
                    # (z-p)^-k = sum_n C(n+k-1,k-1) p^n z^-(n+k)
                    for i, idx in enumerate(ks):
                        n = -idx - kk
                        if n >= 0:
                            out[i] += c * math.comb(n + kk - 1, kk - 1) * p ** n
        return out

    def _from_parts(self, poly, parts):
        acc = RationalFunction(poly)
        for p, coeffs in parts:
            for kk, c in enumerate(coeffs, start=1):
                if c != 0:
                    acc = acc + RationalFunction([c], [p] * kk)
        return acc

    def analytic_part(self):
        """Orthogonal projection onto H^2 (poles outside the disk plus polynomial part)."""
        self.check_no_pole_on_circle()
        parts = [(p, c) for p, c in self.principal_parts() if abs(p) > 1]
        return self._from_parts(self.polynomial_part(), parts)

    def coanalytic_part(self):
        return self - self.analytic_part()

    def is_close(self, other, tol=1e-9, grid=None):
        z = unit_grid(256) if grid is None else grid
        a, b = self(z), RationalFunction.coerce(other)(z)
        return bool(np.max(np.abs(a - b)) <= tol * max(1.0, np.max(np.abs(b))))


def unit_grid(n=512):
    return np.exp(2j * np.pi * (np.arange(n) + 0.5) / n)


# ---------------------------------------------------------------------------
# finite Blaschke products
# ---------------------------------------------------------------------------

def _normalize_zeros(pairs, tol=TAU_R):
    pts = []
    for a, m in pairs:
        a = complex(a)
        if abs(a) >= 1 - tol:
            raise ValueError(f"Blaschke zero {a} is not inside the open disk")
        if int(m) <= 0:
            raise ValueError("multiplicities must be positive")
        pts.extend([a] * int(m))
    if not pts:
        return ()
    merged = []
    for a in pts:
        for i, (b, m) in enumerate(merged):
            if abs(a - b) <= tol:
                merged[i] = ((b * m + a) / (m + 1), m + 1)
                break
        else:
            merged.append((a, 1))
    return tuple(sort_points(merged))


@dataclass(frozen=True, eq=False)
class BlaschkeProduct:
    """Finite Blaschke product ``constant * prod b_alpha**mult``."""

    zeros: tuple = field(default=())
    constant: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "zeros", _normalize_zeros(self.zeros))
        c = complex(self.constant)
        if abs(abs(c) - 1.0) > 1e-6:
            raise ValueError("Blaschke constant must be unimodular")
        object.__setattr__(self, "constant", c / abs(c))

    @classmethod
    def from_multiset(cls, points, constant=1.0):
        return cls(tuple((p, 1) for p in points), constant)

    @property
    def degree(self):
        return sum(m for _, m in self.zeros)

    def multiset(self):
        out = []
        for a, m in self.zeros:
            out.extend([a] * m)
        return out

    def is_trivial(self):
        return self.degree == 0

    def __call__(self, z):
        z = np.asarray(z, complex)
        val = np.full(z.shape, self.constant, dtype=complex)
        for a, m in self.zeros:
            val = val * (z - a if a == 0 else (z - a) / (1 - np.conj(a) * z)) ** m
        return val

    def to_rational(self):
        acc = RationalFunction.const(self.constant)
        for a, m in self.zeros:
            f = RationalFunction.blaschke_factor(a)
            for _ in range(m):
                acc = acc * f
        return acc

    def __mul__(self, other):
        return BlaschkeProduct(self.zeros + other.zeros, self.constant * other.constant)

    def power(self, k):
        return BlaschkeProduct(tuple((a, m * k) for a, m in self.zeros), self.constant ** k)

    def equals(self, other, tol=TAU_R):
        g, l, _ = inner_lattice(self, other, tol)
        return g.degree == self.degree == other.degree

    def divides(self, other, tol=TAU_R):
        g, _, _ = inner_lattice(self, other, tol)
        return g.degree == self.degree

    def quotient(self, divisor, tol=TAU_R):
        """``self / divisor`` as a Blaschke product (requires divisibility)."""
        left = list(self.zeros)
        for b, mb in divisor.zeros:
            for i, (a, ma) in enumerate(left):
                if abs(a - b) <= tol:
                    if ma < mb:
                        raise ValueError("not an inner divisor")
                    left[i] = (a, ma - mb)
                    break
            else:
                raise ValueError("not an inner divisor")
        return BlaschkeProduct(tuple((a, m) for a, m in left if m > 0),
                               self.constant / divisor.constant)

    def __repr__(self):
        zs = ", ".join(f"{np.round(a, 10)}^{m}" for a, m in self.zeros)
        return f"BlaschkeProduct([{zs}])"


def _pair_zeros(b1, b2, tol):
    pairs = []
    used = set()
    for i, (a, _) in enumerate(b1.zeros):
        for j, (b, _) in enumerate(b2.zeros):
            d = abs(a - b)
            if tol / 10 < d < tol:
                raise ZeroClusterAmbiguity(
                    f"zeros {a} and {b} are {d:.3e} apart: cannot decide identity at tolerance {tol}")
            if d <= tol / 10 and j not in used:
                pairs.append((i, j))
                used.add(j)
                break
    return pairs


def inner_lattice(b1, b2, tol=TAU_R):
    """gcd, lcm and coprimality of two finite Blaschke products (zero multisets)."""
    pairs = _pair_zeros(b1, b2, tol)
    gcd, lcm = [], []
    mi = {i for i, _ in pairs}
    mj = {j for _, j in pairs}
    for i, j in pairs:
        a, ma = b1.zeros[i]
        _, mb = b2.zeros[j]
        gcd.append((a, min(ma, mb)))
        lcm.append((a, max(ma, mb)))
    lcm.extend(z for i, z in enumerate(b1.zeros) if i not in mi)
    lcm.extend(z for j, z in enumerate(b2.zeros) if j not in mj)
    g = BlaschkeProduct(tuple(gcd))
    return g, BlaschkeProduct(tuple(lcm)), g.degree == 0


def gcd_all(items, tol=TAU_R):
    items = list(items)
    if not items:
        return BlaschkeProduct()
    acc = items[0]
    for b in items[1:]:
        acc, _, _ = inner_lattice(acc, b, tol)
    return acc


def lcm_all(items, tol=TAU_R):
    acc = BlaschkeProduct()
    for b in items:
        _, acc, _ = inner_lattice(acc, b, tol)
    return acc


# ---------------------------------------------------------------------------
# scalar operations
# ---------------------------------------------------------------------------

def para_conjugate(r):
    return RationalFunction.coerce(r).para_conjugate()


@dataclass(frozen=True)
class InnerOuterScalar:
    inner: BlaschkeProduct
    outer: RationalFunction
    boundary_zero: bool = False


def inner_outer_scalar(f):
    """Split an H-infinity rational function into Blaschke and outer factors."""
    f = RationalFunction.coerce(f)
    if f.poles_in_disk(closed=True):
        raise NotAnalytic("function has a pole in the closed unit disk")
    if f.is_exact_zero():
        raise ValueError("the zero function has no inner-outer factorization")
    inner, boundary = [], False
    for a, m in f.zeros():
        if abs(a) < 1 - TAU_R:
            inner.append((a, m))
        elif abs(abs(a) - 1) <= TAU_R:
            boundary = True
    if boundary:
        warnings.warn("zero on the unit circle kept in the outer factor", BoundaryZeroWarning, stacklevel=2)
    num = np.array(f.num)
    poles = list(f.poles)
    for a, m in inner:
        for _ in range(m):
            num = deflate(num, a)
            if a != 0:
                # multiply by (1 - conj(a) z)
                num = P.polymul(num, [1.0, -np.conj(a)])
    outer = RationalFunction(num, poles)
    return InnerOuterScalar(BlaschkeProduct(tuple(inner)), outer, boundary)


@dataclass(frozen=True)
class ScalarSpectralFactor:
    outer: RationalFunction
    boundary_zero: bool = False


def spectral_factor_scalar(r, grid_size=512):
    """Outer ``o`` with ``o * o~ = r`` for a nonnegative para-Hermitian rational ``r``."""
    r = RationalFunction.coerce(r)
    z = unit_grid(grid_size)
    vals = r(z)
    scale = max(1.0, float(np.max(np.abs(vals))))
    if np.max(np.abs(vals - np.conj(vals))) > 1e-9 * scale:
        raise ValueError("input is not para-Hermitian on the circle")
    if np.min(vals.real) < -1e-10 * scale:
        raise NotNonnegative(f"minimum on grid is {np.min(vals.real):.3e}")
    if r.is_exact_zero():
        raise NotNonnegative("zero function")
    zeros, boundary = [], False
    for a, m in r.zeros():
        if abs(abs(a) - 1.0) <= 1e-6:
            if m % 2:
                raise OddBoundaryMultiplicity(f"zero {a} on the circle has multiplicity {m}")
            zeros.extend([a / abs(a)] * (m // 2))
            boundary = True
        elif abs(a) > 1:
            zeros.extend([a] * m)
    poles = []
    for p, m in r.distinct_poles():
        if abs(abs(p) - 1.0) <= TAU_R:
            raise PoleOnCircle(f"pole {p} on the unit circle")
        if abs(p) > 1:
            poles.extend([p] * m)
    base = RationalFunction(from_roots(zeros), poles)
    ratio = vals.real / np.abs(base(z)) ** 2
    c = math.sqrt(float(np.mean(ratio)))
    if boundary:
        warnings.warn("boundary zero carried into the spectral factor", BoundaryZeroWarning, stacklevel=2)
    return ScalarSpectralFactor(base * c, boundary)


@dataclass(frozen=True)
class BoundedTypeSplit:
    theta: BlaschkeProduct
    a: RationalFunction


def bt_decompose(phi):
    """Write ``phi = theta * conj(a)`` on the circle with ``theta`` inner and ``a`` in H-infinity."""
    phi = RationalFunction.coerce(phi)
    phi.check_no_pole_on_circle()
    if phi.is_exact_zero():
        return BoundedTypeSplit(BlaschkeProduct(), RationalFunction.zero())
    zs = []
    for p, m in phi.distinct_poles():
        if abs(p) > 1:
            zs.append((1.0 / np.conj(p), m))
    excess = phi.deg_num - phi.deg_den
    if excess > 0:
        zs.append((0j, excess))
    theta = BlaschkeProduct(tuple(zs))
    a = theta.to_rational() * phi.para_conjugate()
    if a.poles_in_disk(closed=True):
        raise NotAnalytic("bounded-type split left a pole in the disk")
    return BoundedTypeSplit(theta, a)


def spectrum_inner(b):
    return [a for a, _ in b.zeros]


def blaschke_from_rational_inner(f):
    """Zero multiset of a rational function that is (up to an outer unit) inner."""
    return inner_outer_scalar(f).inner
