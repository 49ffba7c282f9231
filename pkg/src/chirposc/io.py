"""Deterministic tabular output: CSV with ``#key=value`` headers, and JSON.

Floats are written in their shortest round-trip form (``repr``), columns in
a fixed order and metadata keys sorted, so identical inputs give
byte-identical files.  Missing values are empty CSV fields and JSON nulls.
"""
from __future__ import annotations

import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .spectrum import Spectrum

__all__ = ["Table", "format_value", "write_table", "render_table", "read_json_table", "read_spectrum"]


@dataclass
class Table:
    columns: list[str]
    rows: list[list]
    metadata: dict = field(default_factory=dict)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


def _plain(value):
    """numpy scalars and arrays to builtin types; non-finite floats to None."""
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    return value


def format_value(value) -> str:
    value = _plain(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True, separators=(",", ":"))
    return str(value)


def render_table(table: Table, fmt: str) -> str:
    if fmt == "csv":
        out = io.StringIO()
        for key in sorted(table.metadata):
            out.write(f"#{key}={format_value(table.metadata[key])}\n")
        out.write(",".join(table.columns) + "\n")
        for row in table.rows:
            out.write(",".join(format_value(v) for v in row) + "\n")
        return out.getvalue()
    if fmt == "json":
        doc = {"metadata": _plain(table.metadata), "columns": list(table.columns),
               "rows": [_plain(list(r)) for r in table.rows]}
        return json.dumps(doc, sort_keys=True, indent=1, allow_nan=False) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def write_table(table: Table, path, fmt: str) -> None:
    """Write to ``path`` (UTF-8, Unix newlines); ``None`` or ``"-"`` means stdout."""
    text = render_table(table, fmt)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def read_json_table(path) -> Table:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return Table(columns=doc["columns"], rows=doc["rows"], metadata=doc["metadata"])


def read_spectrum(path) -> Spectrum:
    """Rebuild a ``Spectrum`` from JSON written by the ``spectrum`` subcommand."""
    table = read_json_table(path)
    return Spectrum(np.array(table.column("delta"), dtype=float), np.array(table.column("p1"), dtype=float),
                    table.metadata)
