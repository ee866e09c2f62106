"""Serialization of congruence reports, rank tables and series dumps."""

from __future__ import annotations

import csv
import io
import json

from . import __version__

SCHEMA_VERSION = 1

REPORT_FIELDS = ("schema_version", "engine_version", "ell", "m", "b1", "b2", "scalar",
                 "prec_used", "sturm_target", "status", "checks")


def progression_label(ell: int, b: int, n_var: str = "n") -> str:
    from .engine import b_coefficient_index
    a = b_coefficient_index(ell, b, 0)
    head = f"{ell}^{b}{n_var}" if b > 1 else (f"{ell}{n_var}" if b == 1 else n_var)
    if a == 0:
        return f"b_{ell}({head})"
    sign = "+" if a > 0 else "-"
    return f"b_{ell}({head}{sign}{abs(a)})"


def congruence_summary(report) -> str:
    mod = f"{report.ell}" if report.m == 1 else f"{report.ell}^{report.m}"
    lhs = progression_label(report.ell, report.b1)
    if report.status == "ZeroScalar":
        return f"{lhs} = 0 (mod {mod}) for all n >= 0"
    rhs = progression_label(report.ell, report.b2)
    coset = ""
    if report.scalar_coset_modulus and report.scalar_coset_modulus != report.ell**report.m:
        coset = f" (scalar determined mod {report.scalar_coset_modulus})"
    return f"{lhs} = {report.scalar} * {rhs} (mod {mod}) for all n >= 0{coset}"


def report_record(report, extra: dict | None = None) -> dict:
    d = report.to_dict()
    rec = {"schema_version": SCHEMA_VERSION, "engine_version": __version__}
    for k in REPORT_FIELDS[2:]:
        rec[k] = d.pop(k)
    rec["checks"] = [{"n": c["n"], "lhs": c["lhs"], "rhs": c["rhs"],
                      "index_lhs": c.get("index_lhs"), "index_rhs": c.get("index_rhs")}
                     for c in rec["checks"]]
    rec.update(d)
    rec["summary"] = congruence_summary(report)
    if extra:
        rec.update(extra)
    return rec


def parse_report(text: str) -> dict:
    rec = json.loads(text)
    missing = [k for k in REPORT_FIELDS if k not in rec]
    if missing:
        raise ValueError(f"report lacks fields {missing}")
    if rec["schema_version"] != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema version {rec['schema_version']}")
    return rec


def series_record(f, ell: int, b: int, m: int) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "engine_version": __version__,
        "kind": "R",
        "ell": ell,
        "b": b,
        "m": m,
        "modulus": f.ring.modulus,
        "offset": f.offset,
        "prec": f.prec,
        "coefficients": [int(x) for x in f.to_list()],
    }


def table_record(table) -> dict:
    rec = {"schema_version": SCHEMA_VERSION, "engine_version": __version__}
    rec.update(table.to_dict())
    return rec


TABLE_COLUMNS = ("ell", "m", "parity", "b", "rank", "howell_rows", "rank_bound", "status")


def table_rows(table):
    for b in sorted(table.entries):
        yield {"ell": table.ell, "m": table.m, "parity": table.parity, "b": b,
               "rank": table.entries[b], "howell_rows": table.howell_rows[b],
               "rank_bound": table.rank_bound, "status": table.statuses.get(b, "")}


def table_csv(table) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=TABLE_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in table_rows(table):
        w.writerow(row)
    return buf.getvalue()


def dumps(rec: dict) -> str:
    return json.dumps(rec, indent=2, sort_keys=True)
