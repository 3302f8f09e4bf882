"""
JSON schemas for scalars, rational functions, matrices and symbolic data.

complex      ``[re, im]`` or a bare number
poly         list of complex coefficients, lowest degree first
rational     ``{"num": poly, "den": poly}`` (``den`` optional), ``{"blaschke": blaschke}``,
             a bare number or a bare poly
blaschke     ``{"constant": complex, "zeros": [{"alpha": complex, "mult": int}]}``
matrix       ``{"rows": r, "cols": c, "entries": [[rational]]}``
symbolic     matrix whose entries are lists of ``{"coef": rational, "factor": "1" | "u:NAME" | "conj:NAME"}``
declarations ``{"symbols": [NAME], "inner_columns": {KEY: [NAME]}, "coprime_witness": str}``
"""

from __future__ import annotations

import math
import numbers

import numpy as np

from .errors import ParseError
from .matrix import RationalMatrix
from .scalar import BlaschkeProduct, RationalFunction, from_roots, trim
from .symbolic import Declarations, SymbolicEntry, SymbolicMatrix

SIG_DIGITS = 12
ZERO_FLOOR = 1e-12


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def parse_complex(x, path="$"):
    if isinstance(x, bool):
        raise ParseError("expected a number", path)
    if isinstance(x, numbers.Real):
        return complex(float(x))
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(
            isinstance(v, numbers.Real) and not isinstance(v, bool) for v in x):
        return complex(float(x[0]), float(x[1]))
    raise ParseError("expected a number or a [re, im] pair", path)


def parse_poly(x, path="$"):
    if not isinstance(x, list) or not x:
        raise ParseError("expected a non-empty coefficient list", path)
    return np.array([parse_complex(v, f"{path}[{i}]") for i, v in enumerate(x)], complex)


def parse_blaschke(x, path="$"):
    if not isinstance(x, dict):
        raise ParseError("expected a Blaschke object", path)
    const = parse_complex(x.get("constant", 1.0), f"{path}.constant")
    zs = []
    for i, z in enumerate(x.get("zeros", [])):
        p = f"{path}.zeros[{i}]"
        if not isinstance(z, dict) or "alpha" not in z:
            raise ParseError("zero entries need an 'alpha' field", p)
        a = parse_complex(z["alpha"], f"{p}.alpha")
        m = z.get("mult", 1)
        if not isinstance(m, int) or isinstance(m, bool) or m < 1:
            raise ParseError("multiplicity must be a positive integer", f"{p}.mult")
        if abs(a) >= 1:
            raise ParseError("Blaschke zeros must lie inside the unit disk", f"{p}.alpha")
        zs.append((a, m))
    try:
        return BlaschkeProduct(tuple(zs), const)
    except ValueError as exc:
        raise ParseError(str(exc), path) from exc


def _is_number(x):
    return isinstance(x, numbers.Real) and not isinstance(x, bool)


def parse_rational(x, path="$"):
    if _is_number(x):
        return RationalFunction.const(float(x))
    if isinstance(x, list):
        return RationalFunction(parse_poly(x, path))
    if not isinstance(x, dict):
        raise ParseError("expected a rational function", path)
    if "blaschke" in x:
        return parse_blaschke(x["blaschke"], f"{path}.blaschke").to_rational()
    if "num" not in x:
        raise ParseError("rational object needs 'num'", path)
    num = parse_poly(x["num"], f"{path}.num")
    if "den" not in x:
        return RationalFunction(num)
    den = parse_poly(x["den"], f"{path}.den")
    if not np.any(np.abs(den) > 0):
        raise ParseError("zero denominator", f"{path}.den")
    return RationalFunction.from_coeffs(num, den)


def _grid(x, path, cell):
    if not isinstance(x, dict) or "entries" not in x:
        raise ParseError("matrix object needs 'entries'", path)
    ent = x["entries"]
    if not isinstance(ent, list) or not all(isinstance(r, list) for r in ent):
        raise ParseError("entries must be a list of rows", f"{path}.entries")
    rows = x.get("rows", len(ent))
    cols = x.get("cols", len(ent[0]) if ent else 0)
    if len(ent) != rows or any(len(r) != cols for r in ent):
        raise ParseError(f"entries do not match declared shape {rows}x{cols}", f"{path}.entries")
    return [[cell(v, f"{path}.entries[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(ent)], rows, cols


def parse_matrix(x, path="$"):
    ent, r, c = _grid(x, path, parse_rational)
    return RationalMatrix(ent, r, c)


def parse_symbolic_entry(x, path="$"):
    if not isinstance(x, list):
        # plain rational entries are allowed inside symbolic matrices
        return SymbolicEntry.rational(parse_rational(x, path))
    terms = []
    for i, t in enumerate(x):
        p = f"{path}[{i}]"
        if not isinstance(t, dict) or "factor" not in t:
            if i == 0 and all(_is_number(v) or isinstance(v, list) for v in x):
                return SymbolicEntry.rational(parse_rational(x, path))
            raise ParseError("term needs 'coef' and 'factor'", p)
        f = t["factor"]
        if not isinstance(f, str) or not (f == "1" or (f.split(":", 1)[0] in ("u", "conj") and ":" in f and f.split(":", 1)[1])):
            raise ParseError("factor must be '1', 'u:NAME' or 'conj:NAME'", f"{p}.factor")
        terms.append((f, parse_rational(t.get("coef", 1.0), f"{p}.coef")))
    return SymbolicEntry(terms)


def parse_symbolic(x, path="$"):
    ent, r, c = _grid(x, path, parse_symbolic_entry)
    return SymbolicMatrix(ent, r, c)


def parse_any_matrix(x, path="$"):
    """Rational matrix when possible, symbolic otherwise."""
    m = parse_symbolic(x, path)
    return m.to_rational() if m.is_rational() else m


def parse_declarations(x, path="$"):
    if x is None:
        return Declarations()
    if not isinstance(x, dict):
        raise ParseError("declarations must be an object", path)
    cols = x.get("inner_columns", {})
    if not isinstance(cols, dict):
        raise ParseError("inner_columns must map names to symbol lists", f"{path}.inner_columns")
    syms = {s: True for s in x.get("symbols", [])}
    return Declarations(syms, {k: tuple(v) for k, v in cols.items()}, x.get("coprime_witness"))


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def fmt_float(v):
    v = float(v)
    if not math.isfinite(v):
        return v
    if abs(v) < ZERO_FLOOR:
        return 0.0
    return float(f"{v:.{SIG_DIGITS}g}") + 0.0


def render_complex(z):
    z = complex(z)
    if abs(z.imag) < ZERO_FLOOR:
        return fmt_float(z.real)
    return [fmt_float(z.real), fmt_float(z.imag)]


def render_poly(c):
    c = trim(np.asarray(c, complex))
    scale = max(1.0, float(np.max(np.abs(c))))
    return [render_complex(v if abs(v) > ZERO_FLOOR * scale else 0) for v in c]


def render_rational(r):
    if r.is_exact_zero():
        return 0.0
    if not r.poles.size:
        if len(r.num) == 1 and abs(r.num[0].imag) < ZERO_FLOOR:
            return fmt_float(r.num[0].real)
        return {"num": render_poly(r.num)}
    return {"num": render_poly(r.num), "den": render_poly(from_roots(r.poles))}


def render_matrix(m):
    return {"rows": m.rows, "cols": m.cols,
            "entries": [[render_rational(e) for e in row] for row in m.entries]}


def render_blaschke(b):
    return {"constant": render_complex(b.constant),
            "zeros": [{"alpha": render_complex(a), "mult": m} for a, m in b.zeros]}


def render_symbolic(m):
    def cell(e):
        e = e.simplify()
        return [{"coef": render_rational(c), "factor": f} for f, c in sorted(e.terms.items())]
    return {"rows": m.rows, "cols": m.cols, "entries": [[cell(e) for e in row] for row in m.entries]}


def to_jsonable(x):
    """Recursively convert report payloads into canonical JSON values."""
    if isinstance(x, RationalMatrix):
        return render_matrix(x)
    if isinstance(x, SymbolicMatrix):
        return render_symbolic(x)
    if isinstance(x, BlaschkeProduct):
        return render_blaschke(x)
    if isinstance(x, RationalFunction):
        return render_rational(x)
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return fmt_float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return render_complex(x)
    if isinstance(x, np.ndarray):
        return to_jsonable(x.tolist())
    if x is None or isinstance(x, str):
        return x
    raise TypeError(f"cannot serialize {type(x).__name__}")


# ---------------------------------------------------------------------------
# compact text forms
# ---------------------------------------------------------------------------

def _cstr(z):
    z = complex(z)
    re, im = fmt_float(z.real), fmt_float(z.imag)
    if im == 0:
        return f"{re:.6g}"
    if re == 0:
        return f"{im:.6g}i"
    return f"({re:.6g}{im:+.6g}i)"


def poly_str(c):
    terms = []
    for k, v in enumerate(np.asarray(c)):
        if abs(v) < ZERO_FLOOR:
            continue
        base = _cstr(v)
        if k:
            base = "" if base == "1" else "-" if base == "-1" else base
        terms.append(base if k == 0 else f"{base}z" if k == 1 else f"{base}z^{k}")
    return " + ".join(terms) if terms else "0"


def rational_str(r):
    if r.is_exact_zero():
        return "0"
    if not r.poles.size:
        return poly_str(r.num)
    return f"({poly_str(r.num)})/({poly_str(from_roots(r.poles))})"


def matrix_str(m):
    lines = []
    for row in m.entries:
        lines.append("  [" + ", ".join(rational_str(e) for e in row) + "]")
    return "\n".join(lines) if lines else "  []"
