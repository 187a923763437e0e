"""CSV / JSON serialization of result tables.

Floats are written with ``repr`` so they round-trip exactly. JSON has no NaN,
so non-finite numbers become ``null`` there; CSV keeps ``nan``/``inf``.
"""

from __future__ import annotations

import csv
import io
import json
import math

__all__ = ["to_csv", "to_json", "render", "read_json_table"]


def _cell(value):
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    return "" if value is None else str(value)


def _json_value(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return value


def to_csv(rows, fields) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow([_cell(row[f]) for f in fields])
    return buf.getvalue()


def to_json(obj) -> str:
    return json.dumps(_json_value(obj), indent=2, allow_nan=False) + "\n"


def render(rows, fields, fmt: str) -> str:
    if fmt == "csv":
        return to_csv(rows, fields)
    if fmt == "json":
        return to_json([{f: row[f] for f in fields} for row in rows])
    raise ValueError(f"unknown output format {fmt!r}")


def read_json_table(text: str) -> list[dict]:
    """Inverse of ``render(..., 'json')``: ``null`` numbers come back as NaN."""
    rows = json.loads(text)
    return [{k: (math.nan if v is None else v) for k, v in row.items()} for row in rows]
