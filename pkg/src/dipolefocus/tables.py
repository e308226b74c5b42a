"""Tabular output records and their CSV / JSON serialisation."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from importlib import resources

SCHEMA_VERSION = 1
SIG_DIGITS = 12


def _round(value):
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value
    value = float(value)
    if not math.isfinite(value):
        return value
    return float(f"{value:.{SIG_DIGITS}g}")


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (str, int)):
        return str(value)
    return f"{value:.{SIG_DIGITS}g}"


def _parse_cell(text):
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


@dataclass
class Table:
    """Column names, rows, and a flat footer of summary values.

    Numbers are rounded to 12 significant digits on construction so that a
    CSV round trip reproduces the table exactly.
    """

    columns: list
    rows: list
    footer: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = [str(c) for c in self.columns]
        self.rows = [[_round(v) for v in row] for row in self.rows]
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(f"row has {len(row)} cells, expected {len(self.columns)}")
        self.footer = {str(k): _round(v) for k, v in self.footer.items()}

    def column(self, name):
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


def to_csv(table):
    """Header row, data rows, then footer lines of the form ``# key=value``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_fmt(v) for v in row])
    for key, value in table.footer.items():
        buf.write(f"# {key}={_fmt(value)}\n")
    return buf.getvalue()


def from_csv(text):
    lines = text.splitlines()
    body = [ln for ln in lines if not ln.startswith("#")]
    footer = {}
    for ln in lines:
        if ln.startswith("# ") and "=" in ln:
            key, value = ln[2:].split("=", 1)
            footer[key] = _parse_cell(value)
    reader = csv.reader(body)
    columns = next(reader)
    rows = [[_parse_cell(c) for c in row] for row in reader]
    return Table(columns, rows, footer)


def to_json(table, config=None):
    doc = {
        "schema_version": SCHEMA_VERSION,
        "config": config or {},
        "columns": table.columns,
        "rows": [dict(zip(table.columns, row)) for row in table.rows],
        "footer": table.footer,
    }
    return json.dumps(doc, indent=2, sort_keys=False, allow_nan=False) + "\n"


def from_json(text):
    doc = json.loads(text)
    cols = doc["columns"]
    rows = [[r[c] for c in cols] for r in doc["rows"]]
    return Table(cols, rows, doc.get("footer", {}))


def output_schema():
    """The JSON schema for version-1 output documents."""
    ref = resources.files("dipolefocus").joinpath("schemas/output-v1.json")
    return json.loads(ref.read_text(encoding="utf-8"))
