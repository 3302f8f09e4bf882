"""
Matrix-valued rational functions and the truncated-operator numeric oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NotAnalytic
from .scalar import RationalFunction, TAU_R, unit_grid

GRID_SIZE = 512
RANK_REL = 1e-7


class RationalMatrix:
    """Dense ``rows x cols`` grid of :class:`RationalFunction` entries."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries, rows=None, cols=None):
        ent = [[RationalFunction.coerce(e) for e in row] for row in entries]
        if rows is None:
            rows = len(ent)
        if cols is None:
            cols = len(ent[0]) if ent else 0
        if len(ent) != rows or any(len(r) != cols for r in ent):
            raise ValueError("inconsistent matrix dimensions")
        self.rows = rows
        self.cols = cols
        self.entries = tuple(tuple(r) for r in ent)

    # -- constructors ---------------------------------------------------------
    @classmethod
    def zeros(cls, rows, cols):
        z = RationalFunction.zero()
        return cls([[z] * cols for _ in range(rows)], rows, cols)

    @classmethod
    def identity(cls, n):
        return cls.constant(np.eye(n))

    @classmethod
    def constant(cls, c):
        c = np.atleast_2d(np.asarray(c, complex))
        return cls([[RationalFunction.const(v) for v in row] for row in c], *c.shape)

    @classmethod
    def diag(cls, items):
        items = [RationalFunction.coerce(x) for x in items]
        n = len(items)
        z = RationalFunction.zero()
        return cls([[items[i] if i == j else z for j in range(n)] for i in range(n)], n, n)

    @classmethod
    def column(cls, items):
        return cls([[x] for x in items])

    @classmethod
    def row(cls, items):
        return cls([list(items)])

    @classmethod
    def hstack(cls, blocks):
        blocks = [b for b in blocks if b.cols]
        rows = blocks[0].rows
        return cls([sum((list(b.entries[i]) for b in blocks), []) for i in range(rows)])

    @classmethod
    def vstack(cls, blocks):
        blocks = [b for b in blocks if b.rows]
        return cls([list(r) for b in blocks for r in b.entries])

    @classmethod
    def blockdiag(cls, blocks):
        rows = sum(b.rows for b in blocks)
        cols = sum(b.cols for b in blocks)
        z = RationalFunction.zero()
        out = [[z] * cols for _ in range(rows)]
        r0 = c0 = 0
        for b in blocks:
            for i in range(b.rows):
                for j in range(b.cols):
                    out[r0 + i][c0 + j] = b.entries[i][j]
            r0 += b.rows
            c0 += b.cols
        return cls(out, rows, cols)

    # -- structure ----------------------------------------------------------------
    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def submatrix(self, rows, cols):
        return RationalMatrix([[self.entries[i][j] for j in cols] for i in rows], len(rows), len(cols))

    def columns(self, cols):
        return self.submatrix(range(self.rows), list(cols))

    def transpose(self):
        return RationalMatrix([[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)],
                              self.cols, self.rows)

    def map(self, fn):
        return RationalMatrix([[fn(e) for e in row] for row in self.entries], self.rows, self.cols)

    def para_conjugate(self):
        return self.transpose().map(lambda e: e.para_conjugate())

    def flip_adjoint(self):
        """Entrywise ``conj(M(conj z))`` transposed (analytic when ``M`` is)."""
        return self.transpose().map(lambda e: e.flip_conjugate())

    def is_zero(self, tol=1e-9):
        return all(e.is_zero(tol) for row in self.entries for e in row)

    def is_constant(self):
        return all(e.is_constant() for row in self.entries for e in row)

    def constant_value(self):
        return np.array([[e.constant_value() for e in row] for row in self.entries], complex)

    def is_analytic(self):
        """No pole in the closed unit disk."""
        return all(e.is_analytic_in_closed_disk() for row in self.entries for e in row)

    def poles_in_disk(self):
        pts = []
        for row in self.entries:
            for e in row:
                for p, m in e.poles_in_disk(closed=False):
                    pts.append((p, m))
        return _merge_pole_orders(pts)

    def check_no_pole_on_circle(self):
        for row in self.entries:
            for e in row:
                e.check_no_pole_on_circle()

    def max_degree(self):
        return max((max(e.deg_num, e.deg_den) for row in self.entries for e in row), default=0)

    def __repr__(self):
        return f"RationalMatrix({self.rows}x{self.cols})"

    # -- evaluation -----------------------------------------------------------------
    def __call__(self, z):
        z = np.atleast_1d(np.asarray(z, complex))
        out = np.empty(z.shape + (self.rows, self.cols), complex)
        for i in range(self.rows):
            for j in range(self.cols):
                out[..., i, j] = self.entries[i][j](z)
        return out

    def at(self, z):
        return self(np.array([z]))[0]

    # -- arithmetic -------------------------------------------------------------------
    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return RationalMatrix([[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)],
                              self.rows, self.cols)

    def __sub__(self, other):
        return self + other * (-1.0)

    def __neg__(self):
        return self * (-1.0)

    def __mul__(self, other):
        if isinstance(other, RationalMatrix):
            return self @ other
        return self.map(lambda e: e * other)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, np.ndarray):
            other = RationalMatrix.constant(other)
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = RationalFunction.zero()
                for k in range(self.cols):
                    a, b = self.entries[i][k], other.entries[k][j]
                    if a.is_exact_zero() or b.is_exact_zero():
                        continue
                    acc = acc + a * b
                row.append(acc)
            out.append(row)
        return RationalMatrix(out, self.rows, other.cols)

    def __rmatmul__(self, other):
        return RationalMatrix.constant(other) @ self

    def det(self):
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        return _det(self.entries, self.rows)

    def inverse(self):
        n = self.rows
        d = self.det()
        if d.is_exact_zero():
            raise ZeroDivisionError("singular rational matrix")
        if n == 1:
            return RationalMatrix([[1 / d]])
        adj = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                minor = _det([[self.entries[r][c] for c in range(n) if c != j] for r in range(n) if r != i], n - 1)
                sign = -1.0 if (i + j) % 2 else 1.0
                adj[j][i] = minor * sign
        inv_d = 1 / d
        return RationalMatrix([[a * inv_d for a in row] for row in adj], n, n)


def _merge_pole_orders(pts, tol=TAU_R):
    merged = []
    for p, m in pts:
        for i, (q, mq) in enumerate(merged):
            if abs(p - q) <= tol * max(1.0, abs(q)):
                merged[i] = (q, max(m, mq))
                break
        else:
            merged.append((p, m))
    return merged


def _det_laplace(ent, rows, cols, memo):
    key = (rows[0], cols)
    if key in memo:
        return memo[key]
    if len(cols) == 1:
        val = ent[rows[0]][cols[0]]
    else:
        val = RationalFunction.zero()
        r, rest = rows[0], rows[1:]
        for idx, c in enumerate(cols):
            a = ent[r][c]
            if a.is_exact_zero():
                continue
            sub = _det_laplace(ent, rest, cols[:idx] + cols[idx + 1:], memo)
            if sub.is_exact_zero():
                continue
            term = a * sub
            val = val - term if idx % 2 else val + term
    memo[key] = val
    return val


def _det_elimination(ent, n):
    a = [list(r) for r in ent]
    det = RationalFunction.const(1.0)
    for k in range(n):
        cands = [i for i in range(k, n) if not a[i][k].is_zero(1e-13)]
        if not cands:
            return RationalFunction.zero()
        piv = min(cands, key=lambda i: (a[i][k].deg_num + a[i][k].deg_den, i))
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        p = a[k][k]
        det = det * p
        inv = 1 / p
        for i in range(k + 1, n):
            if a[i][k].is_exact_zero():
                continue
            f = a[i][k] * inv
            for j in range(k + 1, n):
                a[i][j] = a[i][j] - f * a[k][j]
    return det


def _det(ent, n):
    if n == 0:
        return RationalFunction.const(1.0)
    if n <= 6:
        return _det_laplace(ent, tuple(range(n)), tuple(range(n)), {})
    return _det_elimination(ent, n)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def minors(m, k):
    """All ``k x k`` minors, rows outer / columns inner in lexicographic order."""
    if not 0 <= k <= min(m.rows, m.cols):
        raise ValueError("minor order out of range")
    if k == 0:
        return [RationalFunction.const(1.0)]
    out = []
    for rs in itertools.combinations(range(m.rows), k):
        for cs in itertools.combinations(range(m.cols), k):
            out.append(_det([[m.entries[i][j] for j in cs] for i in rs], k))
    return out


def para_conjugate_matrix(m):
    return m.para_conjugate()


@dataclass(frozen=True)
class InnerCertificate:
    algebraic_pass: bool
    grid_residual: float
    two_sided: bool

    def as_dict(self):
        return {"algebraic_pass": self.algebraic_pass, "grid_residual": self.grid_residual,
                "two_sided": self.two_sided}


def check_inner(delta, grid_size=GRID_SIZE, tol=1e-9):
    """Certify ``delta~ delta = I`` algebraically and on a circle grid."""
    z = unit_grid(grid_size)
    vals = delta(z)
    r = delta.cols
    gram = np.conj(np.swapaxes(vals, -1, -2)) @ vals
    resid = float(np.max(np.linalg.norm(gram - np.eye(r), axis=(-2, -1))))
    alg = False
    if resid <= 1e-4:
        prod = delta.para_conjugate() @ delta
        alg = (prod - RationalMatrix.identity(r)).is_zero(tol) and resid <= max(1e-7, 100 * tol)
    two = False
    if alg and delta.rows == delta.cols:
        outer = vals @ np.conj(np.swapaxes(vals, -1, -2))
        if np.max(np.linalg.norm(outer - np.eye(delta.rows), axis=(-2, -1))) <= 1e-4:
            prod = delta @ delta.para_conjugate()
            two = (prod - RationalMatrix.identity(delta.rows)).is_zero(tol)
    return InnerCertificate(bool(alg), resid, bool(two))


def complementing_infimum(psi, grid_size=GRID_SIZE):
    psi.check_no_pole_on_circle()
    vals = psi(unit_grid(grid_size))
    s = np.linalg.svd(vals, compute_uv=False)
    return float(np.min(s[..., -1]))


@dataclass(frozen=True)
class BlockCoefficients:
    k_lo: int
    k_hi: int
    matrices: tuple

    def at(self, k):
        return self.matrices[k - self.k_lo]

    def decay_estimate(self):
        """Fit ``|c_k| <= C rho**|k|`` over the available range (loose check)."""
        ks = np.arange(self.k_lo, self.k_hi + 1)
        norms = np.array([np.linalg.norm(m) for m in self.matrices])
        mask = norms > 1e-300
        if mask.sum() < 2:
            return 0.0, 0.0
        slope = np.polyfit(np.abs(ks[mask]), np.log(norms[mask]), 1)[0]
        return float(norms[mask].max()), float(np.exp(slope))


def fourier_block_coeffs(m, k_lo, k_hi):
    mats = np.zeros((k_hi - k_lo + 1, m.rows, m.cols), complex)
    for i in range(m.rows):
        for j in range(m.cols):
            mats[:, i, j] = m.entries[i][j].fourier(k_lo, k_hi)
    return BlockCoefficients(k_lo, k_hi, tuple(mats))


@dataclass(frozen=True)
class TruncatedOperator:
    kind: str
    n: int
    matrix: np.ndarray
    rank: int
    kernel_dim: int
    singular_values: np.ndarray

    def to_csv(self):
        """Interleaved ``re,im`` columns, one matrix row per line."""
        lines = []
        for row in self.matrix:
            cells = []
            for v in row:
                cells.append(f"{v.real:.12g}")
                cells.append(f"{v.imag:.12g}")
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


def numeric_rank(a, rel=RANK_REL):
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0, s
    return int(np.sum(s > rel * s[0])), s


def truncated_operator(phi, n, kind):
    """Finite section of the Hankel or Toeplitz operator with symbol ``phi``."""
    if n < 1:
        raise ValueError("N must be positive")
    p, q = phi.rows, phi.cols
    if kind == "hankel":
        co = fourier_block_coeffs(phi, -2 * n, -1)
        blocks = [[co.at(-i - j - 1) for j in range(n)] for i in range(n)]
    elif kind == "toeplitz":
        co = fourier_block_coeffs(phi, -(n - 1), n - 1)
        blocks = [[co.at(i - j) for j in range(n)] for i in range(n)]
    else:
        raise ValueError(f"unknown operator kind {kind!r}")
    mat = np.block(blocks) if n else np.zeros((0, 0))
    rank, s = numeric_rank(mat)
    return TruncatedOperator(kind, n, mat, rank, mat.shape[1] - rank, s)


def stabilized_hankel_rank(phi, n_max, n_min=1):
    """Numeric Hankel ranks for N = n_min..n_max and the stabilized value."""
    ranks = [truncated_operator(phi, n, "hankel").rank for n in range(n_min, n_max + 1)]
    return ranks[-1], ranks


def h2_inner_product(f, g):
    """``<f, g>`` in vector H^2 computed by residues inside the disk."""
    for v in (f, g):
        if not v.is_analytic():
            raise NotAnalytic("H^2 inner product needs entries analytic on the closed disk")
    total = 0j
    zinv = RationalFunction.monomial(-1)
    for i in range(f.rows):
        for j in range(f.cols):
            a, b = f.entries[i][j], g.entries[i][j]
            if a.is_exact_zero() or b.is_exact_zero():
                continue
            h = a * b.para_conjugate() * zinv
            for p, coeffs in h.principal_parts():
                if abs(p) < 1:
                    total += coeffs[0]
    return complex(total)
