"""Regenerate the shipped catalog inputs (fixtures are produced with --fixtures)."""

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1] / "src" / "modelspace" / "catalog"
S = 0.7071067811865476
Z = [0, 1]


def bl(alpha):
    return {"blaschke": {"zeros": [{"alpha": alpha, "mult": 1}]}}


def u(name, coef=1):
    return [{"coef": coef, "factor": f"u:{name}"}]


def conj(name, coef=1):
    return [{"coef": coef, "factor": f"conj:{name}"}]


def mat(rows):
    return {"rows": len(rows), "cols": len(rows[0]), "entries": rows}


THETA = {"blaschke": {"zeros": [{"alpha": 0.5, "mult": 1}]}}
FG = {"symbols": ["f", "g", "a", "b"], "inner_columns": {"fg": ["f", "g"]},
      "coprime_witness": "Delta^ H2 v A^ H2 = H2 (declared)"}

ENTRIES = {
    "rembdbffvfv_4x3": {
        "command": "multiplicity",
        "description": "4x3 inner matrix with two repeated z columns",
        "delta": mat([[Z, 0, 0], [0, Z, 0], [0, 0, 1], [0, 0, 0]]),
    },
    "exlema444_column": {
        "command": "char-inner",
        "description": "column (1/sqrt2)[1; z]: omega = z, m = 1",
        "delta": mat([[S], [[0, S]]]),
    },
    "col_1z": {
        "command": "inner-check",
        "description": "column (1/sqrt2)[1; z] is inner, not two-sided",
        "delta": mat([[S], [[0, S]]]),
    },
    "exlema444_completed": {
        "command": "char-inner",
        "description": "[Delta, Delta_c] = (1/sqrt2)[1 1; z -z]: omega = m = z",
        "delta": mat([[S, S], [[0, S], [0, -S]]]),
    },
    "pair_first": {
        "command": "verify-canonical",
        "description": "Phi = diag(theta1, theta2, a) with B carrying a",
        "phi": mat([[bl(0.5), 0, 0], [0, bl([0, -0.4]), 0], [0, 0, u("a")]]),
        "delta": mat([[bl(0.5), 0], [0, bl([0, -0.4])], [0, 0]]),
        "a": mat([[1, 0], [0, 1], [0, 0]]),
        "b": mat([[0, 0, 0], [0, 0, 0], [0, 0, u("a")]]),
        "declarations": {"symbols": ["a"], "coprime_witness": "Delta^ H2 v A^ H2 = H2"},
    },
    "pair_second": {
        "command": "verify-canonical",
        "description": "Phi = [f f 0; g g 0; 0 0 theta conj(a)] with declared inner column [f; g]",
        "phi": mat([[u("f"), u("f"), 0], [u("g"), u("g"), 0], [0, 0, conj("a", THETA)]]),
        "delta": mat([[u("f"), 0], [u("g"), 0], [0, THETA]]),
        "a": mat([[1, 0], [1, 0], [0, u("a")]]),
        "b": mat([[0, 0, 0], [0, 0, 0], [0, 0, 0]]),
        "declarations": FG,
        "structure": [{"kind": "declared_column", "rows": [0, 1], "cols": [0, 1], "column": "fg"},
                      {"kind": "theta_conj", "rows": [2], "cols": [2]}],
    },
    "ex8712": {
        "command": "verify-canonical",
        "description": "Phi = [z za; 1 -a], Delta = (1/sqrt2)[z; 1]",
        "phi": mat([[Z, u("a", Z)], [1, u("a", -1)]]),
        "delta": mat([[[0, S]], [S]]),
        "a": mat([[1.4142135623730951], [0]]),
        "b": mat([[0, u("a", Z)], [0, u("a", -1)]]),
        "declarations": {"symbols": ["a"]},
    },
    "nc_case1": {
        "command": "nc",
        "description": "[f f 0; g g 0; 0 0 a] with conj(a) not of bounded type",
        "phi": mat([[u("f"), u("f"), 0], [u("g"), u("g"), 0], [0, 0, u("a")]]),
        "declarations": FG,
        "structure": [{"kind": "declared_column", "rows": [0, 1], "cols": [0, 1], "column": "fg"},
                      {"kind": "mixed", "rows": [2], "cols": [2]}],
        "expect_nc": 1,
    },
    "nc_case2": {
        "command": "nc",
        "description": "[f f 0; g g 0; 0 0 theta conj(b)] with theta, b coprime",
        "phi": mat([[u("f"), u("f"), 0], [u("g"), u("g"), 0], [0, 0, conj("b", THETA)]]),
        "declarations": FG,
        "structure": [{"kind": "declared_column", "rows": [0, 1], "cols": [0, 1], "column": "fg"},
                      {"kind": "theta_conj", "rows": [2], "cols": [2]}],
        "expect_nc": 2,
    },
    "diag_balpha": {
        "command": "oracle",
        "description": "diag(b_alpha, b_beta): Hankel rank equals det degree",
        "phi": mat([[bl(0.5), 0], [0, bl([0, -0.3])]]),
    },
    "canonical_z0": {
        "command": "canonical",
        "description": "Phi = [z 0; 1 0] gives Delta = diag(z, 1)",
        "phi": mat([[Z, 0], [1, 0]]),
    },
    "diag_zzb_degree": {
        "command": "beurling-degree",
        "description": "diag(z, z, b_alpha): largest subset with common zero has size 2",
        "delta": mat([[Z, 0, 0], [0, Z, 0], [0, 0, bl(0.5)]]),
    },
}


def main():
    ROOT.mkdir(parents=True, exist_ok=True)
    for name, doc in ENTRIES.items():
        (ROOT / f"{name}.json").write_text(json.dumps({"name": name, **doc}, indent=2) + "\n")
    if "--fixtures" in sys.argv:
        from modelspace.cli import default_options, dumps, run
        (ROOT / "expected").mkdir(exist_ok=True)
        for name, doc in ENTRIES.items():
            report, _, _ = run(doc["command"], f"catalog:{name}", default_options())
            (ROOT / "expected" / f"{name}.json").write_text(dumps(report) + "\n")
            print(name, report["status"])


if __name__ == "__main__":
    main()
