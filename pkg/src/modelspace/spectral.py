"""
Matrix spectral factorization of para-Hermitian rational matrices.

The outer factor is found in two stages: a block-Toeplitz Cholesky pass
(Bauer's method) gives the polynomial part of the factor to a few digits,
and a handful of Newton steps on the quadratic coefficient equations
(Wilson's iteration) polish it to working precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import FitFailure, NotPositive, PoleOnCircle
from .matrix import GRID_SIZE, RationalMatrix
from .scalar import TAU_R, RationalFunction, from_roots, unit_grid


@dataclass(frozen=True)
class SpectralFactor:
    outer: RationalMatrix
    residual: float
    bauer_blocks: int
    newton_steps: int


def _outside_denominator(g):
    """Monic common denominator collecting every pole of ``g`` outside the closed disk."""
    merged = []
    for row in g.entries:
        for e in row:
            for p, m in e.distinct_poles():
                if abs(abs(p) - 1) <= TAU_R:
                    raise PoleOnCircle(f"pole {p} on the unit circle")
                if abs(p) <= 1:
                    continue
                for i, (q, mq) in enumerate(merged):
                    if abs(p - q) <= TAU_R * abs(q):
                        merged[i] = (q, max(m, mq))
                        break
                else:
                    merged.append((p, m))
    poles = []
    for p, m in merged:
        poles.extend([p] * m)
    return np.asarray(poles, complex)


def laurent_coefficients(g, poles):
    """Coefficients ``W_k`` (k = -m..m) of the Laurent polynomial ``d~ d g``."""
    d = RationalFunction(from_roots(poles))
    weight = d.para_conjugate() * d
    p = g.rows
    entries = {}
    m = 0
    for i in range(p):
        for j in range(p):
            w = g.entries[i][j] * weight
            if w.is_exact_zero():
                entries[i, j] = (0, np.zeros(1, complex))
                continue
            if np.any(np.abs(w.poles) > 1e-12):
                raise FitFailure("symbol is not para-Hermitian: unmatched poles remain")
            s = w.poles.size
            entries[i, j] = (s, np.asarray(w.num))
            m = max(m, s, len(w.num) - 1 - s)
    W = np.zeros((2 * m + 1, p, p), complex)
    for (i, j), (s, num) in entries.items():
        for k, c in enumerate(num):
            W[k - s + m, i, j] += c
    return W, m


def _bauer(W, m, blocks):
    p = W.shape[1]
    n = blocks
    T = np.zeros((n * p, n * p), complex)
    for i in range(n):
        for j in range(n):
            k = j - i
            if -m <= k <= m:
                T[i * p:(i + 1) * p, j * p:(j + 1) * p] = W[k + m]
    T = 0.5 * (T + T.conj().T)
    L = np.linalg.cholesky(T)
    last = L[(n - 1) * p:, :]
    coeffs = np.zeros((m + 1, p, p), complex)
    for k in range(m + 1):
        col = n - 1 - k
        if col < 0:
            break
        coeffs[k] = last[:, col * p:(col + 1) * p].conj().T
    return coeffs


def _product_coeffs(Pc, m):
    """Coefficients k=0..m of ``P~ P`` for polynomial ``P`` with coefficients ``Pc``."""
    out = np.zeros((m + 1,) + Pc.shape[1:], complex)
    deg = Pc.shape[0] - 1
    for k in range(m + 1):
        for j in range(deg + 1 - k):
            out[k] += Pc[j].conj().T @ Pc[j + k]
    return out


def _newton(Pc, W, m, steps=8, tol=1e-15):
    p = Pc.shape[1]
    target = W[m:]
    nunk = (m + 1) * p * p
    done = 0
    for _ in range(steps):
        E = target - _product_coeffs(Pc, m)
        if np.max(np.abs(E)) <= tol * max(1.0, np.max(np.abs(target))):
            break
        # real-linear map X -> coeffs of P~X + X~P, assembled column by column
        cols = []
        for part in (1.0, 1j):
            for idx in range(nunk):
                X = np.zeros(nunk, complex)
                X[idx] = part
                X = X.reshape(Pc.shape)
                Y = np.zeros_like(target)
                for k in range(m + 1):
                    for j in range(m + 1 - k):
                        Y[k] += Pc[j].conj().T @ X[j + k] + X[j].conj().T @ Pc[j + k]
                cols.append(np.concatenate([Y.real.ravel(), Y.imag.ravel()]))
        A = np.array(cols).T
        b = np.concatenate([E.real.ravel(), E.imag.ravel()])
        sol = np.linalg.lstsq(A, b, rcond=None)[0]
        X = (sol[:nunk] + 1j * sol[nunk:]).reshape(Pc.shape)
        Pc = Pc + X
        done += 1
    return Pc, done


def _normalize(Pc):
    q, r = np.linalg.qr(Pc[0])
    d = np.diag(r)
    ph = np.where(np.abs(d) > 0, d / np.where(np.abs(d) > 0, np.abs(d), 1), 1.0)
    u = q * ph[None, :]
    return np.einsum("ij,kjl->kil", u.conj().T, Pc)


def matrix_spectral_factor(g, grid_size=GRID_SIZE, block_factor=16, tol=1e-6):
    """Outer ``O`` (analytic, det zero-free in the disk) with ``O~ O = g`` on the circle."""
    if g.rows != g.cols:
        raise ValueError("spectral factorization needs a square symbol")
    z = unit_grid(grid_size)
    vals = g(z)
    herm = np.max(np.abs(vals - np.conj(np.swapaxes(vals, -1, -2))))
    scale = max(1.0, float(np.max(np.abs(vals))))
    if herm > 1e-8 * scale:
        raise NotPositive(f"symbol is not Hermitian on the circle (defect {herm:.2e})")
    eig = np.linalg.eigvalsh(0.5 * (vals + np.conj(np.swapaxes(vals, -1, -2))))
    if np.min(eig) < 1e-8 * scale:
        raise NotPositive(f"minimum eigenvalue on grid is {np.min(eig):.3e}")
    poles = _outside_denominator(g)
    W, m = laurent_coefficients(g, poles)
    p = g.rows
    blocks = max(block_factor * max(m, 1), 8)
    Pc = _bauer(W, m, blocks)
    Pc, steps = _newton(Pc, W, m)
    Pc = _normalize(Pc)
    entries = [[RationalFunction(Pc[:, i, j], poles) for j in range(p)] for i in range(p)]
    outer = RationalMatrix(entries, p, p)
    ov = outer(z)
    resid = float(np.max(np.linalg.norm(np.conj(np.swapaxes(ov, -1, -2)) @ ov - vals, axis=(-2, -1))))
    if resid > tol * scale:
        raise FitFailure(f"spectral factor residual {resid:.3e} exceeds {tol:g}", resid)
    return SpectralFactor(outer, resid, blocks, steps)
