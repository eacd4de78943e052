"""Rendering of tables (CSV/JSON) and JSON reports."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Any


def format_number(x: float, precision: str = "short") -> str:
    """6 significant digits for "short", shortest round-trip repr for "full"."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if precision == "full":
        return repr(x)
    return f"{x:.6g}"


def _cell(v, precision):
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, (int, float)):
        return format_number(v, precision)
    return v


def jsonable(obj: Any) -> Any:
    """Recursively convert to JSON-safe values; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "tolist"):
        return jsonable(obj.tolist())
    if isinstance(obj, float) and not math.isfinite(obj):
        return format_number(obj)
    return obj


def dump_report(report: dict) -> str:
    return json.dumps(jsonable(report), indent=2) + "\n"


@dataclass
class OutputTable:
    """Rectangular table of named columns."""

    columns: dict[str, list]

    def __post_init__(self):
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise ValueError("table columns must all have the same length")

    @property
    def n_rows(self) -> int:
        return len(next(iter(self.columns.values()), []))

    def rows(self):
        names = list(self.columns)
        for i in range(self.n_rows):
            yield {name: self.columns[name][i] for name in names}

    def to_csv(self, precision: str = "short") -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(list(self.columns))
        for row in self.rows():
            writer.writerow([_cell(v, precision) for v in row.values()])
        return buf.getvalue()

    def to_json(self, precision: str = "short") -> str:
        def conv(v):
            if isinstance(v, float) or (isinstance(v, int) and not isinstance(v, bool)):
                s = format_number(v, precision)
                return float(s) if math.isfinite(float(v)) else s
            return v

        return json.dumps([{k: conv(v) for k, v in row.items()} for row in self.rows()], indent=2) + "\n"

    def render(self, fmt: str = "csv", precision: str = "short") -> str:
        if fmt == "csv":
            return self.to_csv(precision)
        if fmt == "json":
            return self.to_json(precision)
        raise ValueError(f"unknown format {fmt!r}")
