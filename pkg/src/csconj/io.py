"""CSV ingestion for grouped and multivariate data."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .errors import DataError
from .intercept import GroupedData


def _parse_float(text: str, line: int) -> float:
    try:
        v = float(text)
    except ValueError:
        raise DataError(f"non-numeric value {text!r}", line=line) from None
    if not math.isfinite(v):
        raise DataError(f"non-finite value {text!r}", line=line)
    return v


def _rows(path):
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            return [(i, row) for i, row in enumerate(csv.reader(fh), 1) if any(c.strip() for c in row)]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None


def ingest_grouped_csv(path) -> GroupedData:
    """Read a ``group,value`` CSV into :class:`GroupedData`.

    Groups keep the order of their first appearance; labels are arbitrary
    strings and group lengths may differ.
    """
    rows = _rows(path)
    if not rows:
        raise DataError(f"{path}: file is empty")
    line, header = rows[0]
    if [c.strip().lower() for c in header] != ["group", "value"]:
        raise DataError(f"expected header 'group,value', got {','.join(header)!r}", line=line)
    groups: dict[str, list[float]] = {}
    for line, row in rows[1:]:
        if len(row) != 2:
            raise DataError(f"expected 2 fields, got {len(row)}", line=line)
        label = row[0].strip()
        if not label:
            raise DataError("empty group label", line=line)
        groups.setdefault(label, []).append(_parse_float(row[1].strip(), line))
    if len(groups) < 2:
        raise DataError(f"{path}: need at least 2 groups, found {len(groups)}")
    return GroupedData(list(groups.values()), list(groups.keys()))


def ingest_matrix_csv(path, d: int | None = None) -> np.ndarray:
    """Read a rectangular numeric CSV (one observation per row) into an ``(n, d)`` array.

    A first row that does not parse as numbers is taken as a header.  A
    file holding only a header gives an empty ``(0, d)`` array.
    """
    rows = _rows(path)
    if not rows:
        if d is None:
            raise DataError(f"{path}: file is empty")
        return np.zeros((0, d))
    first_line, first = rows[0]
    try:
        [float(c) for c in first]
        body = rows
    except ValueError:
        body = rows[1:]
    width = len(first)
    out = []
    for line, row in body:
        if len(row) != width:
            raise DataError(f"ragged row: expected {width} fields, got {len(row)}", line=line)
        out.append([_parse_float(c.strip(), line) for c in row])
    if d is not None and width != d:
        raise DataError(f"{path}: expected {d} columns, got {width}", line=first_line)
    return np.array(out, dtype=float).reshape(len(out), width)
