"""Summaries of numeric data by quantified sentences.

The evaluation matrix crosses the labels of a linguistic variable with the
quantifiers of a proportional partition. Statements are read off the matrix
either one at a time (:func:`best_single`) or greedily
(:func:`greedy_extract`), optionally merging neighbouring quantifiers.
:func:`rate_search` looks for the crisp "between r1 and r2" quantifier that
best fits a pair of fuzzy sets.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .fuzzy import ClampedSum, FuzzySet, LinguisticVariable, ProportionalPartition, fuzzify_values
from .qfm import Method, apply, fuzzify
from .quantifiers import q_prop_unary, q_rate

DEFAULT_TAU = 0.5
DEFAULT_MARGIN = 0.1
DEFAULT_TAU_MERGE = 0.2
DEFAULT_STEP = 0.025


@dataclass(frozen=True, eq=False)
class EvaluationMatrix:
    rows: tuple[str, ...]
    cols: tuple[str, ...]
    cells: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        cells = np.asarray(self.cells, dtype=float)
        if cells.shape != (len(self.rows), len(self.cols)):
            raise ValueError("cell grid does not match row/column labels")
        if np.any((cells < 0) | (cells > 1)):
            raise ValueError("matrix degrees must lie in [0, 1]")
        object.__setattr__(self, "cells", cells)

    def restrict(self, rows: Sequence[str]) -> "EvaluationMatrix":
        idx = [self.rows.index(r) for r in rows]
        return EvaluationMatrix(tuple(rows), self.cols, self.cells[idx], dict(self.provenance))

    def row_sums(self) -> np.ndarray:
        return self.cells.sum(axis=1)

    def to_json(self) -> dict:
        return {"rows": list(self.rows), "cols": list(self.cols), "cells": self.cells.tolist()}

    @classmethod
    def from_json(cls, obj) -> "EvaluationMatrix":
        return cls(tuple(obj["rows"]), tuple(obj["cols"]), np.asarray(obj["cells"], dtype=float))


@dataclass(frozen=True)
class SummaryStatement:
    quantifiers: tuple[str, ...]
    label: str
    degree: float
    merged: bool = False

    @property
    def quantifier(self) -> str:
        if len(self.quantifiers) == 1:
            return self.quantifiers[0]
        return f"{self.quantifiers[0]}..{self.quantifiers[-1]}"

    def to_json(self) -> dict:
        return {"quantifier": self.quantifier, "label": self.label, "degree": self.degree, "merged": self.merged}


@dataclass(frozen=True)
class NoneAdequate:
    """No single statement stands out; carries the two best candidates."""

    top: tuple[SummaryStatement, ...]

    def to_json(self) -> dict:
        return {"none_adequate": True, "top": [s.to_json() for s in self.top]}


@dataclass(frozen=True)
class MergedCell:
    start: int
    end: int  # inclusive
    degree: float

    @property
    def merged(self) -> bool:
        return self.end > self.start


@dataclass(frozen=True)
class RateSearchResult:
    r1: float
    r2: float
    degree: float
    step: float
    all_zero: bool = False

    def to_json(self) -> dict:
        return {"r1": self.r1, "r2": self.r2, "degree": self.degree, "step": self.step, "all_zero": self.all_zero}


# --------------------------------------------------------------------------
# Matrix construction
# --------------------------------------------------------------------------


def build_matrix(
    values: Sequence[float],
    lv: LinguisticVariable,
    pp: ProportionalPartition,
    method: Method,
    *,
    workers: int = 1,
    data_id: str = "",
) -> EvaluationMatrix:
    """Degree of "Q_i of the data are l_j" for every label and quantifier."""
    if len(values) == 0:
        raise ValueError("cannot summarise an empty dataset")
    label_sets = [fuzzify_values(values, fn) for _, fn in lv.labels]
    quants = [q_prop_unary(fn, name) for name, fn in pp.quantifiers]
    jobs = [(j, i) for j in range(len(label_sets)) for i in range(len(quants))]

    def cell(job):
        j, i = job
        return apply(quants[i], method, label_sets[j])

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            flat = list(pool.map(cell, jobs))
    else:
        flat = [cell(job) for job in jobs]
    cells = np.clip(np.array(flat).reshape(len(label_sets), len(quants)), 0.0, 1.0)
    return EvaluationMatrix(
        tuple(lv.label_names),
        tuple(pp.names),
        cells,
        {"method": method.descriptor(), "data": data_id},
    )


# --------------------------------------------------------------------------
# Statement extraction
# --------------------------------------------------------------------------


def _ranked_cells(m: EvaluationMatrix):
    cells = [(m.cells[j, i], j, i) for j in range(len(m.rows)) for i in range(len(m.cols))]
    # ties go to the earlier label, then the earlier quantifier
    return sorted(cells, key=lambda c: (-c[0], c[1], c[2]))


def best_single(
    m: EvaluationMatrix, tau: float = DEFAULT_TAU, margin: float = DEFAULT_MARGIN
) -> SummaryStatement | NoneAdequate:
    if not 0.0 <= tau <= 1.0 or margin < 0.0:
        raise ValueError("need 0 <= tau <= 1 and margin >= 0")
    ranked = _ranked_cells(m)
    top = [SummaryStatement((m.cols[i],), m.rows[j], float(d)) for d, j, i in ranked[:2]]
    best = ranked[0][0]
    runner_up = ranked[1][0] if len(ranked) > 1 else 0.0
    if best >= tau and best - runner_up >= margin:
        return top[0]
    return NoneAdequate(tuple(top))


def merge_adjacent(row: Sequence[float], tau_merge: float = DEFAULT_TAU_MERGE) -> list[MergedCell]:
    """Collapse every maximal run of two or more neighbouring cells that are
    all at least ``tau_merge`` into one cell holding their (clamped) sum."""
    out: list[MergedCell] = []
    i = 0
    n = len(row)
    while i < n:
        j = i
        if row[i] >= tau_merge:
            while j + 1 < n and row[j + 1] >= tau_merge:
                j += 1
        if j > i:
            out.append(MergedCell(i, j, min(1.0, math.fsum(row[i : j + 1]))))
        else:
            out.append(MergedCell(i, i, float(row[i])))
        i = j + 1
    return out


def merged_degree_exact(
    X: FuzzySet, pp: ProportionalPartition, start: int, end: int, method: Method
) -> float:
    """Degree of the disjunction of partition members ``start..end``,
    evaluated directly as one quantifier."""
    fn = ClampedSum(tuple(pp[k] for k in range(start, end + 1)))
    return fuzzify(q_prop_unary(fn), method)(X)


def greedy_extract(
    m: EvaluationMatrix,
    tau: float = DEFAULT_TAU,
    suppress_bottom: bool = True,
    merge: bool = False,
    tau_merge: float = DEFAULT_TAU_MERGE,
) -> list[SummaryStatement]:
    """One statement per label: its best (possibly merged) cell, if >= tau.

    Statements about the bottom quantifier are dropped when
    ``suppress_bottom`` is set. The result is ordered by degree, then by
    quantifier position (larger proportions first), then by label order.
    """
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must lie in [0, 1]")
    picked = []
    for j, label in enumerate(m.rows):
        row = m.cells[j]
        if merge:
            cells = merge_adjacent(row, tau_merge)
        else:
            cells = [MergedCell(i, i, float(d)) for i, d in enumerate(row)]
        best = max(cells, key=lambda c: (c.degree, -c.start))
        if best.degree < tau or best.degree <= 0.0:
            continue
        if suppress_bottom and best.start == 0 and not best.merged:
            continue
        names = tuple(m.cols[best.start : best.end + 1])
        picked.append((best, j, SummaryStatement(names, label, best.degree, best.merged)))
    picked.sort(key=lambda p: (-p[0].degree, -p[0].start, p[1]))
    return [s for _, _, s in picked]


# --------------------------------------------------------------------------
# Rate search
# --------------------------------------------------------------------------


def rate_grid(delta_max: float, step: float) -> list[float]:
    """Left ends h = 0, step, 2*step, ... with h <= 1 - delta_max."""
    if not 0.0 < delta_max <= 1.0:
        raise ValueError("delta_max must lie in (0, 1]")
    if not 0.0 < step <= delta_max:
        raise ValueError("step must lie in (0, delta_max]")
    count = math.floor((1.0 - delta_max) / step + 1e-9)
    return [round(k * step, 12) for k in range(count + 1)]


def rate_search(
    X1: FuzzySet,
    X2: FuzzySet,
    delta_max: float,
    step: float = DEFAULT_STEP,
    method: Method | None = None,
) -> RateSearchResult:
    """Best ``rate[h, h + delta_max]`` over the grid; ties go to the smallest h."""
    method = method or Method.a("dp")
    best = None
    for h in rate_grid(delta_max, step):
        r2 = min(1.0, round(h + delta_max, 12))
        degree = fuzzify(q_rate(h, r2), method)(X1, X2)
        if best is None or degree > best[2]:
            best = (h, r2, degree)
    h, r2, degree = best
    return RateSearchResult(h, r2, degree, step, all_zero=degree == 0.0)
