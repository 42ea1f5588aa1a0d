"""CSV and JSON emission for CLI reports.

CSV: UTF-8, LF line endings, floats with 17 significant digits. A report
may hold several tables; they are separated by one blank line and each
starts with its own header row.

JSON: one object ``{"metadata": ..., "command": ..., "result": ...}``
validated by ``schema/output.schema.json``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Any

import numpy as np

from . import __version__
from .game import EXTENDED_LAYOUT
from .gates import Convention

QUBIT_ORDER = {
    "logical": ["alice_1", "alice_2", "bob_1", "bob_2"],
    "extended": list(EXTENDED_LAYOUT),
    "bit_significance": "big-endian (first listed qubit is the most significant bit)",
}


@dataclass
class Table:
    header: list[str]
    rows: list[list[Any]] = field(default_factory=list)


@dataclass
class Report:
    command: str
    result: dict[str, Any]
    tables: list[Table]
    convention: Convention | None = None
    extra_metadata: dict[str, Any] = field(default_factory=dict)

    def metadata(self) -> dict[str, Any]:
        meta = {
            "package": "magicsquare",
            "version": __version__,
            "qubit_order": QUBIT_ORDER,
            "convention": self.convention.as_dict() if self.convention else None,
        }
        meta.update(self.extra_metadata)
        return meta


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def _cell(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return fmt_float(v)
    if isinstance(v, (tuple, list)):
        return "".join(str(int(x)) for x in v)
    return str(v)


def to_csv(report: Report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for i, table in enumerate(report.tables):
        if i:
            buf.write("\n")
        writer.writerow(table.header)
        for row in table.rows:
            writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _jsonable(v: Any) -> Any:
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


def to_json(report: Report) -> str:
    doc = {"metadata": report.metadata(), "command": report.command, "result": report.result}
    return json.dumps(_jsonable(doc), indent=2, allow_nan=False) + "\n"


def render(report: Report, fmt: str) -> str:
    if fmt == "csv":
        return to_csv(report)
    if fmt == "json":
        return to_json(report)
    raise ValueError(f"unknown format {fmt!r}")


def read_csv_tables(text: str) -> list[list[dict[str, str]]]:
    """Parse CSV produced by :func:`to_csv` back into lists of row dicts."""
    tables = []
    for block in text.strip("\n").split("\n\n"):
        tables.append(list(csv.DictReader(io.StringIO(block))))
    return tables


def load_schema() -> dict:
    with resources.files("magicsquare").joinpath("schema/output.schema.json").open() as fh:
        return json.load(fh)
