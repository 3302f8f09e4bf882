"""Command-line front end: ``modelspace COMMAND INPUT [flags]``."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
import warnings
from importlib import resources
from pathlib import Path

import numpy as np

from . import beurling as bl
from . import multiplicity as mp
from . import symbolic as sy
from .errors import ModelSpaceError, ParseError, SymbolicInputRequiresVerifier, Undecided
from .io import (
    matrix_str,
    parse_any_matrix,
    parse_blaschke,
    parse_declarations,
    parse_matrix,
    parse_symbolic,
    to_jsonable,
)
from .matrix import GRID_SIZE, RationalMatrix, check_inner, stabilized_hankel_rank, truncated_operator
from .scalar import inner_outer_scalar

EXIT_OK, EXIT_INPUT, EXIT_FAIL, EXIT_UNDECIDED = 0, 1, 2, 3
CATALOG_PACKAGE = "modelspace.catalog"


# ---------------------------------------------------------------------------
# input documents
# ---------------------------------------------------------------------------

def catalog_names():
    root = resources.files(CATALOG_PACKAGE)
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def catalog_text(name):
    res = resources.files(CATALOG_PACKAGE) / f"{name}.json"
    if not res.is_file():
        raise ParseError(f"no catalog entry named {name!r}", "catalog")
    return res.read_text()


def expected_text(name):
    res = resources.files(CATALOG_PACKAGE) / "expected" / f"{name}.json"
    return res.read_text() if res.is_file() else None


def load_document(path):
    if path.startswith("catalog:"):
        text, label = catalog_text(path.split(":", 1)[1]), path
    else:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ParseError(f"cannot read input: {exc.strerror}", path) from exc
        label = Path(path).name
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}", label) from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", label)
    return doc, doc.get("name", label)


def _field(doc, *keys):
    for k in keys:
        if k in doc:
            return doc[k], f"$.{k}"
    raise ParseError(f"missing field {' or '.join(keys)!r}", "$")


def _rational(doc, *keys):
    x, p = _field(doc, *keys)
    return parse_matrix(x, p)


def _any(doc, *keys):
    x, p = _field(doc, *keys)
    return parse_any_matrix(x, p)


# ---------------------------------------------------------------------------
# commands (each returns status, results)
# ---------------------------------------------------------------------------

def _status(ok):
    return "PASS" if ok else "FAIL"


def cmd_inner_check(doc, opt):
    d = _rational(doc, "delta", "matrix")
    cert = check_inner(d, opt.grid, opt.tol)
    return _status(cert.algebraic_pass), {"shape": list(d.shape), **cert.as_dict()}


def cmd_factor(doc, opt):
    n = _rational(doc, "matrix", "f", "delta")
    if n.shape == (1, 1):
        res = inner_outer_scalar(n.entries[0][0])
        return "OK", {"kind": "scalar", "inner": res.inner, "outer": res.outer, "boundary_zero": res.boundary_zero}
    pair = bl.inner_outer_matrix(n, opt.grid)
    return "OK", {"kind": "matrix", "inner": pair.inner, "outer": pair.outer, "residual": pair.residual,
                  "inner_certificate": pair.certificate.as_dict()}


def cmd_complement(doc, opt):
    d = _rational(doc, "delta", "matrix")
    dc = bl.complementary_factor(d)
    full = RationalMatrix.hstack([d, dc]) if dc.cols else d
    cert = check_inner(full, opt.grid, opt.tol)
    return _status(cert.two_sided), {"delta_c": dc, "columns": dc.cols, "completed": cert.as_dict()}


def cmd_dss(doc, opt):
    phi = _rational(doc, "phi", "matrix")
    f = bl.dss_factorize(phi, opt.probe)
    return _status(f.coprime), {"delta": f.delta, "a": f.a, "certificates": {
        "inner": f.inner.as_dict(), "coprime": f.coprime, "residual": f.residual}}


def cmd_canonical(doc, opt):
    phi = _any(doc, "phi", "matrix")
    c = bl.canonical_decompose(phi, opt.probe)
    return _status(c.dss.coprime), {"delta": c.delta, "a": c.a, "b": c.b, "nc": c.nc, "certificates": {
        "inner": c.dss.inner.as_dict(), "coprime": c.dss.coprime, "residual": c.dss.residual}}


def _mult_payload(r):
    return {"mu": r.mu, "route": r.route, "bounds": list(r.bounds), "deg_b_convention": r.deg_b_convention,
            "note": r.note, "certificates": r.certificates}


def cmd_multiplicity(doc, opt):
    d = _rational(doc, "delta", "matrix")
    r = mp.spectral_multiplicity(d)
    return _status(r.mu <= r.bounds[0] or r.route == "square-direct"), _mult_payload(r)


def cmd_beurling_degree(doc, opt):
    d = _rational(doc, "delta", "matrix")
    deg = mp.beurling_degree(d)
    r = mp.spectral_multiplicity(d)
    out = {"deg_b": deg, "deg_b_convention": r.deg_b_convention, "route": r.route}
    if mp._is_diagonal(d):
        out["diagonal_formula"] = mp.max_cardinality_formula(
            [bl.inner_part(d.entries[i][i]) for i in range(d.rows)])
    return "OK", out


def cmd_nordgren(doc, opt):
    d = _rational(doc, "delta", "matrix")
    seq = mp.delta_sequence(d)
    return "OK", {"diagonal": mp.nordgren_diagonal(d), "factors": mp.nordgren_factors(d),
                  "delta_degrees": seq.degrees()}


def cmd_char_inner(doc, opt):
    d = _rational(doc, "delta", "matrix")
    r = mp.char_scalar(d)
    analytic = r.witness_G is not None and r.witness_G.is_analytic()
    return "OK", {"omega": r.omega, "m": r.m, "m_divides_omega": r.m.divides(r.omega),
                  "witness_G": r.witness_G, "witness_analytic": analytic}


def cmd_scalar_multiple(doc, opt):
    a = _rational(doc, "a", "matrix")
    r = mp.scalar_multiple(a)
    return "OK", {"m_A": r.m, "witness_G": r.witness_G, "witness_analytic": r.witness_G.is_analytic()}


def cmd_coprime(doc, opt):
    x, p = _field(doc, "theta")
    theta = parse_blaschke(x, p)
    a = _rational(doc, "a", "matrix")
    r = mp.coprime_theta_A(theta, a)
    return _status(r["left_coprime"]), r


def cmd_hankel_kernel(doc, opt):
    phi = _rational(doc, "phi", "matrix")
    conds = bl.hankel_kernel_conditions(phi)
    K = bl.model_space_from_conditions(conds, phi.rows)
    theta = bl.model_space_to_inner(K, opt.probe)
    cert = check_inner(theta, opt.grid, opt.tol)
    return _status(cert.two_sided), {"conditions": len(conds), "model_space_dim": K.dim,
                                     "theta": theta, "inner": cert.as_dict()}


def cmd_delta_s(doc, opt):
    d = _rational(doc, "delta", "matrix")
    r = bl.delta_s(d)
    return _status(r.outer_certified and r.residual <= 1e-7), {
        "delta_s": r.delta_s, "delta_1": r.delta_1, "kernel_dim": r.kernel.dim,
        "degree_bound": r.degree_bound, "nullities": list(r.nullities), "residual": r.residual,
        "delta_1_outer": r.outer_certified}


def cmd_classify(doc, opt):
    return "OK", mp.classify_contraction(_rational(doc, "delta", "matrix"))


def cmd_spectrum(doc, opt):
    return "OK", {"lower_bound": mp.model_spectrum_lower(_rational(doc, "delta", "matrix"))}


def cmd_verify_interpolant(doc, opt):
    phi = _rational(doc, "phi")
    k = _rational(doc, "k")
    r = mp.verify_interpolant(phi, k, opt.grid)
    return _status(r["feasible"] and r["norm_ok"]), r


def cmd_verify_canonical(doc, opt):
    phi = _any(doc, "phi")
    delta = _any(doc, "delta")
    a = _any(doc, "a")
    b = _any(doc, "b") if "b" in doc else RationalMatrix.zeros(phi.rows, phi.cols)
    decl = parse_declarations(doc.get("declarations"), "$.declarations")
    rep = sy.verify_canonical(phi, delta, a, b, decl, doc.get("structure"))
    return rep["overall"], rep


def cmd_nc(doc, opt):
    phi = _any(doc, "phi", "matrix")
    decl = parse_declarations(doc.get("declarations"), "$.declarations")
    r = sy.nc_structured(phi, doc.get("structure"), decl)
    blocks = [{"kind": b["kind"], "nc": b["nc"]} for b in r["blocks"]]
    out = {"nc": r["nc"], "assumed": r["assumed"], "blocks": blocks}
    if "expect_nc" in doc:
        return _status(r["nc"] == doc["expect_nc"]), out
    return "OK", out


def cmd_oracle(doc, opt):
    phi = _rational(doc, "phi", "matrix")
    theta = bl.adjoint_hankel_kernel_inner(phi, opt.probe)
    deg = bl.inner_part(theta.det()).degree
    n = opt.N or 4 * max(phi.max_degree(), 1) * max(phi.rows, phi.cols)
    rank, ranks = stabilized_hankel_rank(phi.para_conjugate(), n)
    if opt.csv:
        Path(opt.csv).write_text(truncated_operator(phi.para_conjugate(), n, "hankel").to_csv())
    return _status(rank == deg), {"engine_degree": deg, "truncation": n, "stabilized_rank": rank,
                                  "ranks": ranks}


COMMANDS = {
    "inner-check": cmd_inner_check,
    "factor": cmd_factor,
    "complement": cmd_complement,
    "dss": cmd_dss,
    "canonical": cmd_canonical,
    "multiplicity": cmd_multiplicity,
    "beurling-degree": cmd_beurling_degree,
    "nordgren": cmd_nordgren,
    "char-inner": cmd_char_inner,
    "scalar-multiple": cmd_scalar_multiple,
    "coprime": cmd_coprime,
    "hankel-kernel": cmd_hankel_kernel,
    "delta-s": cmd_delta_s,
    "classify": cmd_classify,
    "spectrum": cmd_spectrum,
    "verify-interpolant": cmd_verify_interpolant,
    "verify-canonical": cmd_verify_canonical,
    "nc": cmd_nc,
    "oracle": cmd_oracle,
}

STATUS_EXIT = {"PASS": EXIT_OK, "OK": EXIT_OK, "FAIL": EXIT_FAIL, "UNDECIDED": EXIT_UNDECIDED}


def run(command, path, opt):
    """Execute one command; returns (report dict, exit code, elapsed seconds)."""
    t0 = time.perf_counter()
    doc, label = load_document(path)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            status, results = COMMANDS[command](doc, opt)
        except Undecided as exc:
            status, results = "UNDECIDED", {"reason": str(exc)}
    report = {
        "command": command,
        "input": label,
        "status": status,
        "results": to_jsonable(results),
        "warnings": sorted({str(w.message) for w in caught}),
    }
    return report, STATUS_EXIT[status], time.perf_counter() - t0


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def dumps(report):
    return json.dumps(report, indent=2, sort_keys=True)


def _text(value, indent=0):
    pad = "  " * indent
    lines = []
    if isinstance(value, dict) and "entries" in value and "rows" in value:
        m = parse_any_matrix(value)
        body = matrix_str(m) if isinstance(m, RationalMatrix) else repr(m.entries)
        return [pad + line for line in body.splitlines()]
    if isinstance(value, dict):
        for k, v in value.items():
            if isinstance(v, (dict, list)) and v and not (isinstance(v, list) and all(
                    isinstance(x, (int, float, str)) for x in v)):
                lines.append(f"{pad}{k}:")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
        return lines
    if isinstance(value, list):
        for v in value:
            sub = _text(v, indent + 1)
            lines.append(f"{pad}-" + (" " + sub[0].strip() if sub else ""))
            lines.extend(sub[1:])
        return lines
    return [pad + str(value)]


def render_text(report, elapsed):
    head = f"{report['command']} {report['input']}: {report['status']}  ({elapsed:.3f} s)"
    body = _text(report["results"], 1)
    warn = [f"  warning: {w}" for w in report["warnings"]]
    return "\n".join([head, *body, *warn])


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

def _close(a, b, tol=1e-8):
    if isinstance(a, dict) and isinstance(b, dict):
        return a.keys() == b.keys() and all(_close(a[k], b[k], tol) for k in a)
    if isinstance(a, list) and isinstance(b, list):
        return len(a) == len(b) and all(_close(x, y, tol) for x, y in zip(a, b))
    if isinstance(a, (int, float)) and isinstance(b, (int, float)) and not isinstance(a, bool):
        return abs(a - b) <= tol * max(1.0, abs(a), abs(b))
    return a == b


def default_options(**over):
    ns = argparse.Namespace(tol=1e-9, grid=GRID_SIZE, N=None, probe=None, csv=None, json=True)
    for k, v in over.items():
        setattr(ns, k, v)
    return ns


def replay_catalog(names=None):
    """Run every catalog entry with default flags; returns list of (name, report, matches)."""
    out = []
    for name in names or catalog_names():
        doc = json.loads(catalog_text(name))
        report, _, _ = run(doc["command"], f"catalog:{name}", default_options())
        exp = expected_text(name)
        ok = exp is not None and _close(json.loads(dumps(report)), json.loads(exp))
        out.append((name, report, ok))
    return out


def cmd_catalog(args):
    if args.export:
        dest = Path(args.export)
        dest.mkdir(parents=True, exist_ok=True)
        for name in catalog_names():
            (dest / f"{name}.json").write_text(catalog_text(name))
        print(f"wrote {len(catalog_names())} entries to {dest}")
        return EXIT_OK
    if args.show:
        print(catalog_text(args.show), end="")
        return EXIT_OK
    if args.replay:
        results = replay_catalog()
        for name, _, ok in results:
            print(f"{'ok  ' if ok else 'DIFF'} {name}")
        return EXIT_OK if all(ok for _, _, ok in results) else EXIT_FAIL
    entries = []
    for name in catalog_names():
        doc = json.loads(catalog_text(name))
        entries.append({"name": name, "command": doc.get("command"), "description": doc.get("description", "")})
    if args.json:
        print(json.dumps({"count": len(entries), "entries": entries}, indent=2, sort_keys=True))
    else:
        for e in entries:
            print(f"{e['name']:<28} {e['command']:<18} {e['description']}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _probe(text):
    try:
        re_, im_ = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("probe must read re,im") from exc
    if re_ * re_ + im_ * im_ >= 1:
        raise argparse.ArgumentTypeError("probe must lie inside the unit disk")
    return complex(re_, im_)


def _bounded(lo, hi, kind):
    def conv(text):
        v = kind(text)
        if not lo <= v <= hi:
            raise argparse.ArgumentTypeError(f"value must lie in [{lo}, {hi}]")
        return v
    return conv


def build_parser():
    p = argparse.ArgumentParser(prog="modelspace", description="Model spaces of rational inner functions.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        c = sub.add_parser(name)
        c.add_argument("input", help="JSON document or catalog:NAME")
        c.add_argument("--tol", type=_bounded(1e-14, 1e-4, float), default=1e-9)
        c.add_argument("--grid", type=_bounded(64, 8192, int), default=GRID_SIZE)
        c.add_argument("--json", action="store_true", help="emit the canonical JSON report")
        c.add_argument("--N", type=_bounded(1, 4096, int), default=None, help="truncation size for oracle")
        c.add_argument("--probe", type=_probe, default=None, help="probe point re,im for inner reconstruction")
        c.add_argument("--csv", default=None, help="oracle: write the truncated Hankel section as CSV")
    c = sub.add_parser("catalog")
    c.add_argument("--json", action="store_true")
    c.add_argument("--show", metavar="NAME")
    c.add_argument("--export", metavar="DIR")
    c.add_argument("--replay", action="store_true", help="replay every entry against its fixture")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if os.environ.get("MSK_SEED"):
        np.random.seed(int(os.environ["MSK_SEED"]))
    try:
        if args.command == "catalog":
            return cmd_catalog(args)
        report, code, elapsed = run(args.command, args.input, args)
    except ParseError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SymbolicInputRequiresVerifier as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ModelSpaceError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(dumps(report) if args.json else render_text(report, elapsed))
    return code


if __name__ == "__main__":
    sys.exit(main())
