"""CSV and JSON emitters for curves, sample sets and reports.

CSV layout: ``# key=value`` metadata lines, one header row, then data rows
with 17 significant digits so that every double survives a round trip.
Re-reading a file and writing it again reproduces it byte for byte.
"""
from __future__ import annotations

import json
import math
import subprocess
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, TextIO

import numpy as np

__all__ = ["Table", "format_value", "write_csv", "read_csv", "to_json", "load_schema",
           "table_to_json", "provenance"]


def format_value(v: float) -> str:
    return format(float(v), ".17g")


@dataclass
class Table:
    """Named float columns plus string metadata."""

    columns: List[str]
    data: np.ndarray  # (rows, len(columns))
    meta: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float).reshape(-1, len(self.columns))
        self.meta = {str(k): _meta_str(v) for k, v in self.meta.items()}

    def column(self, name: str) -> np.ndarray:
        return self.data[:, self.columns.index(name)]

    @classmethod
    def from_columns(cls, columns: Dict[str, np.ndarray], meta=None) -> "Table":
        names = list(columns)
        data = np.column_stack([np.asarray(columns[n], dtype=float) for n in names])
        return cls(names, data, dict(meta or {}))


def _meta_str(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format_value(v)
    s = str(v)
    if "\n" in s:
        raise ValueError("metadata values must be single-line")
    return s


def write_csv(table: Table, stream: TextIO) -> None:
    for k, v in table.meta.items():
        stream.write(f"# {k}={v}\n")
    stream.write(",".join(table.columns) + "\n")
    for row in table.data:
        stream.write(",".join(format_value(v) for v in row) + "\n")


def read_csv(stream: TextIO) -> Table:
    meta: Dict[str, str] = {}
    header: Optional[List[str]] = None
    rows = []
    for line in stream:
        line = line.rstrip("\n")
        if header is None and line.startswith("# "):
            key, _, value = line[2:].partition("=")
            meta[key] = value
        elif header is None:
            header = line.split(",")
        elif line:
            rows.append([float(x) for x in line.split(",")])
    if header is None:
        raise ValueError("CSV has no header row")
    return Table(header, np.array(rows, dtype=float).reshape(-1, len(header)), meta)


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def to_json(obj) -> str:
    """Serialize with non-finite floats mapped to null."""
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def table_to_json(command: str, table: Table, extra=None) -> dict:
    out = {
        "command": command,
        "meta": dict(table.meta),
        "columns": list(table.columns),
        "data": {name: table.data[:, i] for i, name in enumerate(table.columns)},
    }
    if extra:
        out.update(extra)
    return out


def load_schema() -> dict:
    text = resources.files("coulomb_extremes").joinpath("schemas/output.schema.json").read_text()
    return json.loads(text)


def provenance() -> str:
    """git describe of the source tree if available, else the package version."""
    here = Path(__file__).resolve().parent
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"], cwd=here,
                             capture_output=True, text=True, timeout=5)
        if out.returncode == 0 and out.stdout.strip():
            return out.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    from . import __version__

    return __version__
