"""
A small term algebra for symbols that are not of bounded type.

An entry is a finite sum ``sum_k c_k(z) * x_k`` where ``c_k`` is rational and
``x_k`` is ``1``, an opaque H-infinity symbol ``u`` or its boundary conjugate
``conj(u)``.  Nothing is known about ``u`` beyond ``u in H-infinity`` and
``conj(u)`` not of bounded type, so the only simplifications are rational
identities (``conj(z) = 1/z`` on the circle is built into the para-conjugate).
The layer verifies decompositions; it never discovers them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .beurling import adjoint_hankel_kernel_inner, coprime_certificate, poly_nullspace_basis
from .errors import StructureNotSupported, Undecided
from .matrix import RationalMatrix, check_inner
from .scalar import BlaschkeProduct, RationalFunction

ONE = "1"
ZERO_TOL = 1e-10


@dataclass(frozen=True)
class OpaqueSymbol:
    name: str
    in_Hinfinity: bool = True
    conj_bounded_type: bool = False


def _split(factor):
    if factor == ONE:
        return ONE, None
    kind, _, name = factor.partition(":")
    if kind not in ("u", "conj") or not name:
        raise ValueError(f"bad factor {factor!r}")
    return kind, name


def _factor_product(f1, f2):
    if f1 == ONE:
        return f2
    if f2 == ONE:
        return f1
    raise StructureNotSupported(f"product {f1} * {f2} leaves the term language")


def _factor_conj(f):
    kind, name = _split(f)
    if kind == ONE:
        return ONE
    return f"conj:{name}" if kind == "u" else f"u:{name}"


class SymbolicEntry:
    """Sum of rational coefficients times ``1``, ``u`` or ``conj(u)``."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        acc = {}
        for factor, coef in (terms.items() if isinstance(terms, dict) else (terms or [])):
            _split(factor)
            coef = RationalFunction.coerce(coef)
            acc[factor] = acc[factor] + coef if factor in acc else coef
        self.terms = {f: c for f, c in acc.items() if not c.is_exact_zero()}

    @classmethod
    def rational(cls, r):
        return cls({ONE: r})

    @classmethod
    def symbol(cls, name, coef=1.0, conj=False):
        return cls({(f"conj:{name}" if conj else f"u:{name}"): coef})

    @classmethod
    def coerce(cls, x):
        if isinstance(x, SymbolicEntry):
            return x
        return cls.rational(RationalFunction.coerce(x))

    def simplify(self):
        return SymbolicEntry({f: c for f, c in self.terms.items() if not c.is_zero(ZERO_TOL)})

    def is_zero(self):
        return not self.simplify().terms

    def is_rational(self):
        return all(f == ONE for f in self.terms)

    def rational_part(self):
        return self.terms.get(ONE, RationalFunction.zero())

    def symbols(self):
        return {_split(f)[1] for f in self.terms if f != ONE}

    def __add__(self, other):
        other = SymbolicEntry.coerce(other)
        out = dict(self.terms)
        for f, c in other.terms.items():
            out[f] = out[f] + c if f in out else c
        return SymbolicEntry(out)

    __radd__ = __add__

    def __neg__(self):
        return SymbolicEntry({f: -c for f, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-SymbolicEntry.coerce(other))

    def __mul__(self, other):
        other = SymbolicEntry.coerce(other)
        out = {}
        for f1, c1 in self.terms.items():
            for f2, c2 in other.terms.items():
                f = _factor_product(f1, f2)
                c = c1 * c2
                out[f] = out[f] + c if f in out else c
        return SymbolicEntry(out)

    __rmul__ = __mul__

    def para_conjugate(self):
        return SymbolicEntry({_factor_conj(f): c.para_conjugate() for f, c in self.terms.items()})

    def __repr__(self):
        parts = [f"{c!r}*{f}" for f, c in self.terms.items()]
        return " + ".join(parts) if parts else "0"


def sym_analytic_check(entry):
    """'yes', 'no' or 'unknown' for analyticity in the closed disk."""
    e = SymbolicEntry.coerce(entry).simplify()
    if any(f.startswith("conj:") for f in e.terms):
        return "no"
    u_ok = all(c.is_analytic_in_closed_disk() for f, c in e.terms.items() if f != ONE)
    rat_ok = e.rational_part().is_analytic_in_closed_disk()
    if rat_ok and u_ok:
        return "yes"
    if not rat_ok and u_ok:
        return "no"
    return "unknown"


class SymbolicMatrix:
    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries, rows=None, cols=None):
        ent = [[SymbolicEntry.coerce(e) for e in row] for row in entries]
        self.rows = len(ent) if rows is None else rows
        self.cols = (len(ent[0]) if ent else 0) if cols is None else cols
        if len(ent) != self.rows or any(len(r) != self.cols for r in ent):
            raise ValueError("inconsistent symbolic matrix dimensions")
        self.entries = tuple(tuple(r) for r in ent)

    @classmethod
    def from_rational(cls, m):
        return cls([[SymbolicEntry.rational(e) for e in row] for row in m.entries], m.rows, m.cols)

    @classmethod
    def coerce(cls, m):
        return m if isinstance(m, SymbolicMatrix) else cls.from_rational(m)

    @property
    def shape(self):
        return (self.rows, self.cols)

    def is_rational(self):
        return all(e.is_rational() for row in self.entries for e in row)

    def to_rational(self):
        if not self.is_rational():
            raise StructureNotSupported("matrix carries opaque symbols")
        return RationalMatrix([[e.rational_part() for e in row] for row in self.entries], self.rows, self.cols)

    def symbols(self):
        out = set()
        for row in self.entries:
            for e in row:
                out |= e.symbols()
        return out

    def para_conjugate(self):
        return SymbolicMatrix([[self.entries[i][j].para_conjugate() for i in range(self.rows)]
                               for j in range(self.cols)], self.cols, self.rows)

    def __add__(self, other):
        other = SymbolicMatrix.coerce(other)
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return SymbolicMatrix([[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)],
                              self.rows, self.cols)

    def __sub__(self, other):
        other = SymbolicMatrix.coerce(other)
        return self + SymbolicMatrix([[-e for e in row] for row in other.entries], other.rows, other.cols)

    def __matmul__(self, other):
        other = SymbolicMatrix.coerce(other)
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = SymbolicEntry()
                for k in range(self.cols):
                    a, b = self.entries[i][k], other.entries[k][j]
                    if not a.terms or not b.terms:
                        continue
                    acc = acc + a * b
                row.append(acc)
            out.append(row)
        return SymbolicMatrix(out, self.rows, other.cols)

    def __rmatmul__(self, other):
        return SymbolicMatrix.coerce(other) @ self

    def is_zero(self):
        return all(e.is_zero() for row in self.entries for e in row)

    def submatrix(self, rows, cols):
        return SymbolicMatrix([[self.entries[i][j] for j in cols] for i in rows], len(rows), len(cols))


# ---------------------------------------------------------------------------
# declarations
# ---------------------------------------------------------------------------

@dataclass
class Declarations:
    """Caller-asserted facts; every conclusion resting on them is tagged ASSUMED."""

    symbols: dict = field(default_factory=dict)
    inner_columns: dict = field(default_factory=dict)   # name -> tuple of symbol names (row order)
    coprime_witness: str | None = None

    def column_for(self, names):
        for key, col in self.inner_columns.items():
            if tuple(col) == tuple(names):
                return key
        return None


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

def verify_subspace_inclusion(delta, phi):
    """PASS iff every entry of ``phi~ delta`` is analytic, certifying ``delta H^2`` in the kernel."""
    prod = SymbolicMatrix.coerce(phi).para_conjugate() @ SymbolicMatrix.coerce(delta)
    verdicts = [sym_analytic_check(e) for row in prod.entries for e in row]
    if "no" in verdicts:
        return {"verdict": "FAIL", "product": prod}
    if "unknown" in verdicts:
        raise Undecided("an entry of phi~ delta has undecidable analyticity")
    return {"verdict": "PASS", "product": prod}


def _declared_column_of(delta, j, decl):
    names = []
    for i in range(delta.rows):
        e = delta.entries[i][j].simplify()
        if not e.terms:
            names.append(None)
            continue
        if len(e.terms) != 1:
            return None
        (f, c), = e.terms.items()
        if not f.startswith("u:") or not c.is_constant() or abs(c.constant_value() - 1) > 1e-12:
            return None
        names.append(f[2:])
    support = [i for i, nm in enumerate(names) if nm is not None]
    key = decl.column_for([names[i] for i in support])
    return (key, support) if key is not None else None


def _check_inner_symbolic(delta, decl):
    """Verdict for condition (i) allowing declared opaque inner columns."""
    if delta.is_rational():
        cert = check_inner(delta.to_rational())
        return ("PASS" if cert.algebraic_pass else "FAIL"), cert.as_dict()
    declared, rational = [], []
    used_rows = set()
    for j in range(delta.cols):
        col = delta.submatrix(range(delta.rows), [j])
        if col.is_rational():
            rational.append(j)
            continue
        hit = _declared_column_of(delta, j, decl)
        if hit is None:
            return "UNDECIDED", {"reason": f"column {j} is neither rational nor a declared inner column"}
        declared.append((j, hit[0]))
        used_rows |= set(hit[1])
    rat = delta.submatrix(range(delta.rows), rational).to_rational() if rational else None
    if rat is not None:
        support = {i for i in range(rat.rows) if any(not rat.entries[i][c].is_zero(1e-13) for c in range(rat.cols))}
        if support & used_rows:
            return "UNDECIDED", {"reason": "declared and rational columns overlap in row support"}
        cert = check_inner(rat)
        if not cert.algebraic_pass:
            return "FAIL", cert.as_dict()
    return "ASSUMED", {"declared_columns": [name for _, name in declared], "rational_columns": rational}


def _symbolic_nc_default(phi):
    return nc_structured(phi, [{"kind": "mixed", "rows": list(range(phi.rows)), "cols": list(range(phi.cols))}])


def verify_canonical(phi, delta, a, b, decl=None, structure=None):
    """Per-condition verdicts for ``phi = delta a~ + b`` as a canonical decomposition."""
    decl = decl or Declarations()
    phi, delta, a, b = (SymbolicMatrix.coerce(x) for x in (phi, delta, a, b))
    report = {}

    def guarded(key, fn):
        try:
            report[key] = fn()
        except (StructureNotSupported, Undecided) as exc:
            report[key] = {"verdict": "UNDECIDED", "reason": str(exc)}

    def cond_i():
        v, detail = _check_inner_symbolic(delta, decl)
        return {"verdict": v, "detail": detail}

    def cond_iii():
        return {"verdict": "PASS" if (delta.para_conjugate() @ b).is_zero() else "FAIL"}

    def recon():
        diff = phi - (delta @ a.para_conjugate() + b)
        return {"verdict": "PASS" if diff.is_zero() else "FAIL"}

    def cond_ii():
        if delta.is_rational() and a.is_rational():
            ok, g = coprime_certificate(delta.to_rational(), a.to_rational())
            out = {"verdict": "PASS" if ok else "FAIL", "method": "computed"}
            if decl.coprime_witness:
                out["declared_witness"] = decl.coprime_witness
            return out
        if decl.coprime_witness:
            return {"verdict": "ASSUMED", "method": "declared", "witness": decl.coprime_witness}
        return {"verdict": "UNDECIDED", "reason": "A carries opaque symbols and no witness was declared"}

    def cond_iv():
        res = nc_structured(phi, structure, decl) if structure else _symbolic_nc_default(phi)
        if res["nc"] == "unknown":
            return {"verdict": "UNDECIDED", "nc": "unknown"}
        ok = res["nc"] <= delta.cols
        v = "PASS" if ok else "FAIL"
        if ok and res.get("assumed"):
            v = "ASSUMED"
        return {"verdict": v, "nc": res["nc"], "bound": delta.cols}

    guarded("i_inner", cond_i)
    guarded("ii_coprime", cond_ii)
    guarded("iii_orthogonal", cond_iii)
    guarded("iv_nc_bound", cond_iv)
    guarded("reconstruction", recon)
    verdicts = [v["verdict"] for v in report.values()]
    if "FAIL" in verdicts:
        overall = "FAIL"
    elif "UNDECIDED" in verdicts:
        overall = "UNDECIDED"
    else:
        overall = "PASS"
    report["overall"] = overall
    if overall == "PASS":
        tag = " (ASSUMED)" if "ASSUMED" in verdicts else ""
        report["conclusion"] = "ker H*_{flip(Phi)} = Delta H^2" + tag
    return report


# ---------------------------------------------------------------------------
# degree of non-cyclicity for structured symbols
# ---------------------------------------------------------------------------

def _mixed_block(block):
    """nc and kernel generator of a block whose flip carries at most one opaque symbol per row."""
    bt = block.para_conjugate()
    m, n = bt.shape
    C = [[RationalFunction.zero()] * n for _ in range(m)]
    D_rows = []
    for i in range(m):
        syms = set()
        drow = [RationalFunction.zero()] * n
        for j in range(n):
            for f, c in bt.entries[i][j].simplify().terms.items():
                if f == ONE:
                    C[i][j] = c
                elif f.startswith("u:"):
                    if not c.is_analytic_in_closed_disk():
                        raise StructureNotSupported("opaque term with a non-analytic coefficient")
                else:
                    syms.add(f)
                    drow[j] = c
        if len(syms) > 1:
            raise StructureNotSupported("more than one conjugated symbol in a row")
        if syms:
            D_rows.append(drow)
    Cm = RationalMatrix(C, m, n)
    if not D_rows:
        V = RationalMatrix.identity(n)
    else:
        # keep a generically independent set of rows
        D = RationalMatrix(D_rows, len(D_rows), n)
        sample = D.at(0.37 - 0.21j)
        keep = []
        for i in range(D.rows):
            trial = sample[keep + [i]]
            if np.linalg.matrix_rank(trial, tol=1e-9 * max(1.0, np.abs(sample).max())) == len(keep) + 1:
                keep.append(i)
        if len(keep) == n:
            return 0, None
        V = poly_nullspace_basis(D.submatrix(keep, range(n)))
    theta = adjoint_hankel_kernel_inner((Cm @ V).para_conjugate())
    return V.cols, V @ theta


def nc_structured(phi, structure=None, decl=None):
    """Degree of non-cyclicity summed over declared diagonal blocks."""
    phi = SymbolicMatrix.coerce(phi)
    decl = decl or Declarations()
    if structure is None:
        structure = [{"kind": "mixed", "rows": list(range(phi.rows)), "cols": list(range(phi.cols))}]
    covered = set()
    total = 0
    assumed = False
    parts = []
    for blk in structure:
        rows, cols = list(blk["rows"]), list(blk["cols"])
        covered |= {(i, j) for i in rows for j in cols}
        sub = phi.submatrix(rows, cols)
        kind = blk["kind"]
        if kind == "mixed":
            k, gen = _mixed_block(sub)
            parts.append({"kind": kind, "nc": k, "generator": gen})
        elif kind == "theta_conj":
            if sub.shape != (1, 1):
                raise StructureNotSupported("theta_conj blocks are scalar")
            e = sub.entries[0][0].simplify()
            if len(e.terms) != 1:
                raise StructureNotSupported("theta_conj block must be a single term")
            (f, c), = e.terms.items()
            if not f.startswith("conj:") or not check_inner(RationalMatrix([[c]])).algebraic_pass:
                raise StructureNotSupported("theta_conj block must read theta * conj(u) with theta inner")
            k = 1
            assumed = True
            parts.append({"kind": kind, "nc": 1, "generator": RationalMatrix([[c]])})
        elif kind == "declared_column":
            name = blk["column"]
            col = decl.inner_columns.get(name)
            if col is None:
                raise StructureNotSupported(f"undeclared inner column {name!r}")
            # every column of the block must be a rational multiple of the declared column
            for j in range(sub.cols):
                scale = None
                for i in range(sub.rows):
                    e = sub.entries[i][j].simplify()
                    key = f"u:{col[i]}"
                    if set(e.terms) - {key}:
                        raise StructureNotSupported("block column is not a multiple of the declared column")
                    c = e.terms.get(key, RationalFunction.zero())
                    if scale is None:
                        scale = c
                    elif not (c - scale).is_zero(ZERO_TOL):
                        raise StructureNotSupported("block column is not a multiple of the declared column")
            k = 1
            assumed = True
            parts.append({"kind": kind, "nc": 1, "generator": name})
        else:
            raise StructureNotSupported(f"unknown block kind {kind!r}")
        total += k
    for i in range(phi.rows):
        for j in range(phi.cols):
            if (i, j) not in covered and not phi.entries[i][j].is_zero():
                raise StructureNotSupported("nonzero entry outside the declared blocks")
    return {"nc": total, "assumed": assumed, "blocks": parts}
