"""Table and report persistence: CSV rows, JSON documents, atomic writes.

The CSV schema is a stable exchange format: fixed column order, floats at
17 significant digits so every double round-trips exactly, level always a
degeneracy-group index.  Identical runs must serialize byte-identically,
so rows are emitted in sorted key order regardless of solve order.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import os
import tempfile

from .density import BOND_KINDS
from .errors import DomainError
from .sweep import BoundaryReport, OddEvenReport, SweepRecord, SweepTable

CSV_COLUMNS = (
    "theta_over_pi", "L", "bond", "level", "n_up", "energy",
    "discord", "classical_corr", "mutual_info", "concurrence",
    "entropy_ab", "degenerate_flag",
)

_BOND_ORDER = {b: i for i, b in enumerate(BOND_KINDS)}


def _fmt(x: float) -> str:
    return "%.17g" % x


def _sorted_records(table: SweepTable) -> list[SweepRecord]:
    keys = sorted(table.records,
                  key=lambda k: (k[0], k[1], _BOND_ORDER[k[2]], k[3]))
    return [table.records[k] for k in keys]


def _row(rec: SweepRecord) -> list[str]:
    return [
        _fmt(rec.theta_over_pi), str(rec.L), rec.bond, str(rec.level),
        str(rec.n_up), _fmt(rec.energy), _fmt(rec.discord),
        _fmt(rec.classical_corr), _fmt(rec.mutual_info),
        _fmt(rec.concurrence), _fmt(rec.entropy_ab),
        "1" if rec.degenerate else "0",
    ]


def atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def table_to_csv(table: SweepTable) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for rec in _sorted_records(table):
        lines.append(",".join(_row(rec)))
    return "\n".join(lines) + "\n"


def write_table_csv(table: SweepTable, path: str) -> None:
    atomic_write_text(path, table_to_csv(table))


def read_table_csv(path: str) -> SweepTable:
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or tuple(header) != CSV_COLUMNS:
            raise DomainError(
                "unexpected CSV header in %s: %r" % (path, header)
            )
        rows = list(reader)
    table = SweepTable(bonds=(), levels=1)
    bonds = []
    levels = 1
    for row in rows:
        if len(row) != len(CSV_COLUMNS):
            raise DomainError("ragged CSV row in %s: %r" % (path, row))
        rec = SweepRecord(
            theta_over_pi=float(row[0]), L=int(row[1]), bond=row[2],
            level=int(row[3]), n_up=int(row[4]), energy=float(row[5]),
            discord=float(row[6]), classical_corr=float(row[7]),
            mutual_info=float(row[8]), concurrence=float(row[9]),
            entropy_ab=float(row[10]), degenerate=row[11] == "1",
        )
        table.add(rec)
        if rec.bond not in bonds:
            bonds.append(rec.bond)
        levels = max(levels, rec.level + 1)
    table.bonds = tuple(bonds)
    table.levels = levels
    return table


def table_to_json(table: SweepTable) -> str:
    doc = {
        "columns": list(CSV_COLUMNS),
        "records": [
            {col: getattr(rec, attr) for col, attr in _JSON_FIELDS}
            for rec in _sorted_records(table)
        ],
        "invalid": [
            {"theta_over_pi": t, "L": L, "reason": reason}
            for (t, L), reason in sorted(table.invalid.items())
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


_JSON_FIELDS = tuple(
    (col, "degenerate" if col == "degenerate_flag" else col)
    for col in CSV_COLUMNS
)


def write_table_json(table: SweepTable, path: str) -> None:
    atomic_write_text(path, table_to_json(table))


def read_table_json(path: str) -> SweepTable:
    with open(path) as handle:
        doc = json.load(handle)
    table = SweepTable(bonds=(), levels=1)
    bonds = []
    levels = 1
    for entry in doc.get("records", []):
        kwargs = {attr: entry[col] for col, attr in _JSON_FIELDS}
        kwargs["degenerate"] = bool(kwargs["degenerate"])
        rec = SweepRecord(**kwargs)
        table.add(rec)
        if rec.bond not in bonds:
            bonds.append(rec.bond)
        levels = max(levels, rec.level + 1)
    for entry in doc.get("invalid", []):
        table.mark_invalid(entry["theta_over_pi"], entry["L"], entry["reason"])
    table.bonds = tuple(bonds)
    table.levels = levels
    return table


def read_table(path: str) -> SweepTable:
    """Dispatch on extension; .json reads the JSON document, else CSV."""
    if path.endswith(".json"):
        return read_table_json(path)
    return read_table_csv(path)


def boundary_report_to_dict(report: BoundaryReport) -> dict:
    doc = dataclasses.asdict(report)
    doc["jump_intervals"] = [list(span) for span in report.jump_intervals]
    doc["extremum_by_size"] = {
        str(L): theta for L, theta in sorted(report.extremum_by_size.items())
    }
    return doc


def odd_even_report_to_dict(report: OddEvenReport) -> dict:
    return {
        "theta_over_pi": report.theta_over_pi,
        "bond": report.bond,
        "eps_deg": report.eps_deg,
        "alternating": report.alternating,
        "rows": [dataclasses.asdict(row) for row in report.rows],
    }


def write_json_doc(doc: dict, path: str) -> None:
    atomic_write_text(path, json.dumps(doc, indent=2) + "\n")
