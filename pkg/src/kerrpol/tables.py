"""CSV and JSON serialization of SweepTable."""

from __future__ import annotations

import csv
import io
import json
import os
import sys

from .errors import KerrPolError
from .sweep import SweepTable

FORMATS = ("csv", "json")


class OutputError(KerrPolError):
    pass


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        # 17 significant digits round-trip every double
        return format(value, ".17g")
    return str(value)


def table_to_csv(table: SweepTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.schema)
    for row in table.rows:
        writer.writerow([format_cell(row[name]) for name in table.schema])
    return buf.getvalue()


def table_to_json(table: SweepTable) -> str:
    doc = {"metadata": table.metadata, "schema": table.schema, "rows": table.rows}
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def table_from_json(text: str) -> SweepTable:
    doc = json.loads(text)
    return SweepTable(schema=list(doc["schema"]), rows=list(doc["rows"]), metadata=dict(doc["metadata"]))


def read_csv(text: str) -> tuple[list[str], list[dict]]:
    """Parse an emitted CSV back into (schema, rows); numeric cells become floats."""
    reader = csv.reader(io.StringIO(text))
    schema = next(reader)
    rows = []
    for raw in reader:
        row = {}
        for name, cell in zip(schema, raw):
            if cell == "":
                row[name] = None
                continue
            try:
                row[name] = float(cell)
            except ValueError:
                row[name] = cell
        rows.append(row)
    return schema, rows


def emit_table(table: SweepTable, fmt: str = "csv", destination=None) -> int:
    """Write ``table`` to a path, an open text stream, or stdout (None).

    Returns the number of bytes written (UTF-8).
    """
    if fmt not in FORMATS:
        raise OutputError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    text = table_to_csv(table) if fmt == "csv" else table_to_json(table)
    data = text.encode("utf-8")
    if destination is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    elif hasattr(destination, "write"):
        destination.write(text)
    else:
        path = os.fspath(destination)
        try:
            with open(path, "wb") as fh:
                fh.write(data)
        except OSError as err:
            raise OutputError(f"cannot write {path}: {err.strerror}") from err
    return len(data)
