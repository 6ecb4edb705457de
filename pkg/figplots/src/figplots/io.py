"""Reading and validating probe-metrics CSV tables.

The plotting layer never recomputes physics: it only reads columns written
by the probe CLI and takes square roots and differences of them.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

HEADER = "# probe-metrics v1"
ORDERING_TOL = 1e-9


class ParseError(Exception):
    """A CSV file is malformed; the message carries the offending line."""


class MissingColumn(Exception):
    """A required column is absent or empty."""


@dataclass
class ScatterTable:
    lqu: np.ndarray
    avsk: np.ndarray
    variance: np.ndarray | None
    family: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.lqu)


@dataclass
class BoundaryTable:
    family: str
    param: np.ndarray
    lqu: np.ndarray
    avsk: np.ndarray
    variance: np.ndarray

    def __len__(self) -> int:
        return len(self.param)


def _open_table(path: str, required: tuple) -> list[dict]:
    with open(path, newline="") as fh:
        first = fh.readline().rstrip("\n")
        if first != HEADER:
            raise ParseError(f"{path}:1: expected header {HEADER!r}, got {first!r}")
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ParseError(f"{path}:2: no column header row")
        missing = [c for c in required if c not in reader.fieldnames]
        if missing:
            raise MissingColumn(f"{path}: missing columns {missing}")
        rows = list(reader)
    if not rows:
        raise ParseError(f"{path}:3: no data rows")
    return rows


def _parse_float(path: str, line: int, name: str, raw: str) -> float:
    try:
        return float(raw)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{path}:{line}: bad {name} value {raw!r}") from exc


def read_scatter(path: str, need_variance: bool = False) -> ScatterTable:
    """Load a scatter CSV, enforcing the avsk >= lqu row invariant."""
    rows = _open_table(path, ("lqu", "avsk", "variance"))
    lqu, avsk, variance, family = [], [], [], []
    has_variance = True
    for i, row in enumerate(rows):
        line = i + 3  # header comment + column row
        l = _parse_float(path, line, "lqu", row["lqu"])
        a = _parse_float(path, line, "avsk", row["avsk"])
        if a < l - ORDERING_TOL:
            raise ParseError(f"{path}:{line}: row violates avsk >= lqu ({a} < {l})")
        lqu.append(l)
        avsk.append(a)
        family.append(row.get("familyTag", ""))
        raw_v = row.get("variance", "")
        if raw_v in ("", None):
            has_variance = False
        else:
            variance.append(_parse_float(path, line, "variance", raw_v))
    if need_variance and not has_variance:
        raise MissingColumn(f"{path}: variance values are empty; rerun scatter with --with-variance")
    return ScatterTable(
        lqu=np.array(lqu),
        avsk=np.array(avsk),
        variance=np.array(variance) if has_variance else None,
        family=family,
    )


def read_boundary(path: str) -> BoundaryTable:
    rows = _open_table(path, ("family", "param", "lqu", "avsk", "variance"))
    fam = rows[0]["family"]
    param, lqu, avsk, variance = [], [], [], []
    for i, row in enumerate(rows):
        line = i + 3
        param.append(_parse_float(path, line, "param", row["param"]))
        lqu.append(_parse_float(path, line, "lqu", row["lqu"]))
        avsk.append(_parse_float(path, line, "avsk", row["avsk"]))
        variance.append(_parse_float(path, line, "variance", row["variance"]))
    return BoundaryTable(
        family=fam,
        param=np.array(param),
        lqu=np.array(lqu),
        avsk=np.array(avsk),
        variance=np.array(variance),
    )
