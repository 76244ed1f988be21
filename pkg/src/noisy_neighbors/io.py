"""Plain-text inputs and outputs: matrices, vectors, tables and run manifests."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from pathlib import Path

import numpy as np


class ParseError(ValueError):
    pass


class EmptyFile(ParseError):
    pass


class RaggedRows(ParseError):
    pass


class NonNumeric(ParseError):
    pass


def fmt(value) -> str:
    """Round-trip decimal text for numbers; empty for None."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(value)


def _parse_cell(cell: str, lineno: int, path) -> float:
    try:
        return float(cell)
    except ValueError:
        raise NonNumeric(f"{path}:{lineno}: non-numeric cell {cell.strip()!r}") from None


def load_matrix(path) -> np.ndarray:
    """Read a CSV of reals (rows = points). Blank lines are skipped."""
    path = Path(path)
    rows = []
    width = None
    with open(path, newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            cells = line.strip().split(",")
            row = [_parse_cell(c, lineno, path) for c in cells]
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise RaggedRows(f"{path}:{lineno}: expected {width} values, found {len(row)}")
            rows.append(row)
    if not rows:
        raise EmptyFile(f"{path}: no data rows")
    return np.array(rows, dtype=float)


def save_matrix(path, X) -> None:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    with open(path, "w") as fh:
        for row in X:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def load_vector(path) -> np.ndarray:
    """One real per line."""
    path = Path(path)
    values = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if line.strip():
                values.append(_parse_cell(line.strip(), lineno, path))
    if not values:
        raise EmptyFile(f"{path}: no values")
    return np.array(values)


def load_gap_series(path):
    """Two-column CSV ``d,gap``; a non-numeric first line is taken as a header."""
    path = Path(path)
    dims, gaps = [], []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or not "".join(row).strip():
                continue
            if len(row) != 2:
                raise RaggedRows(f"{path}:{lineno}: expected 2 columns (d,gap), found {len(row)}")
            if lineno == 1 and not _looks_numeric(row[0]):
                continue
            dims.append(int(_parse_cell(row[0], lineno, path)))
            gaps.append(_parse_cell(row[1], lineno, path))
    if not dims:
        raise EmptyFile(f"{path}: no data rows")
    return dims, gaps


def _looks_numeric(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def table_csv(rows, columns) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(fmt(row.get(c)) for c in columns) + "\n")
    return buf.getvalue()


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v) or math.isinf(v):
            return fmt(v)
        return v
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def config_hash(config: dict) -> str:
    blob = json.dumps(to_jsonable(config), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]
