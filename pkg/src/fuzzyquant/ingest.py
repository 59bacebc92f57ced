"""CSV ingestion into integer-indexed series."""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .temporal import RawSeries, TimeAxis


class DataError(ValueError):
    """Malformed or inconsistent input data."""


@dataclass
class Dataset:
    axis: TimeAxis
    series: dict[str, RawSeries]
    time_labels: list[str]

    def label_of(self, t: int) -> str:
        return self.time_labels[self.axis.position(t)]

    def instant_of(self, label: str) -> int:
        """Map a time label (or an integer instant) onto the axis."""
        if label in self.time_labels:
            return self.axis.start + self.time_labels.index(label)
        try:
            return int(label)
        except ValueError:
            raise DataError(f"unknown time {label!r}") from None


def _parse_times(raw: list[str], line_nos: list[int]):
    """Return (start instant, step description) or raise on nonuniform spacing."""
    try:
        ints = [int(x) for x in raw]
    except ValueError:
        ints = None
    if ints is not None:
        steps = [b - a for a, b in zip(ints, ints[1:])]
        for k, s in enumerate(steps):
            if s != steps[0] or s <= 0:
                raise DataError(f"row {line_nos[k + 1]}: nonuniform time spacing")
        if not steps or steps[0] == 1:
            return ints[0], "step"
        return 0, f"{steps[0]} units"
    dates = []
    for k, x in enumerate(raw):
        try:
            dates.append(dt.date.fromisoformat(x.strip()))
        except ValueError:
            raise DataError(f"row {line_nos[k]}: cannot parse time {x!r}") from None
    deltas = [(b - a).days for a, b in zip(dates, dates[1:])]
    for k, d in enumerate(deltas):
        if d != deltas[0] or d <= 0:
            raise DataError(f"row {line_nos[k + 1]}: nonuniform time spacing")
    return 0, f"{deltas[0] if deltas else 1} day"


def load_csv(path: str | Path, time_column: str | None = None, value_columns: Sequence[str] | None = None) -> Dataset:
    """Read a CSV with a header row into a :class:`Dataset`.

    The time column (first column by default) may hold integers or ISO
    dates; either way the spacing must be uniform. Empty cells are missing.
    Row numbers in error messages count the header as row 1.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file, header row expected") from None
        numbered = [(reader.line_num, r) for r in reader if r and any(c.strip() for c in r)]
    line_nos = [n for n, _ in numbered]
    rows = [r for _, r in numbered]
    time_column = time_column or header[0]
    if time_column not in header:
        raise DataError(f"time column {time_column!r} not in header {header}")
    if value_columns is None:
        value_columns = [h for h in header if h != time_column]
    for c in value_columns:
        if c not in header:
            raise DataError(f"column {c!r} not in header {header}")
    if not rows:
        raise DataError(f"{path}: no data rows")
    t_idx = header.index(time_column)
    for k, r in enumerate(rows):
        if len(r) != len(header):
            raise DataError(f"row {line_nos[k]}: expected {len(header)} cells, found {len(r)}")
    labels = [r[t_idx].strip() for r in rows]
    start, step = _parse_times(labels, line_nos)
    axis = TimeAxis(start, len(rows), step)
    series = {}
    for c in value_columns:
        j = header.index(c)
        values = np.empty(len(rows))
        for k, r in enumerate(rows):
            cell = r[j].strip()
            if cell == "":
                values[k] = math.nan
                continue
            try:
                values[k] = float(cell)
            except ValueError:
                raise DataError(f"row {line_nos[k]}: cannot parse {cell!r} in column {c!r}") from None
        series[c] = RawSeries(axis, values)
    return Dataset(axis, series, labels)
