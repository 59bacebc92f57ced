"""Finite fuzzy sets, parametric fuzzy numbers and alpha-cuts.

Crisp subsets of a base set are stored as integer bit masks (bit ``i`` set
means element ``i`` belongs to the set). This keeps quantifier evaluation
cheap and lets the fuzzification code vectorise over many subsets at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np


class FuzzyError(ValueError):
    """Invalid construction of a fuzzy object."""


# --------------------------------------------------------------------------
# Fuzzy numbers
# --------------------------------------------------------------------------


class FuzzyNumber:
    """Base class for membership functions over the real line.

    Instances are callable on a float or on a numpy array.
    """

    kind: str = ""

    def scalar(self, x: float) -> float:
        raise NotImplementedError

    def array(self, x: np.ndarray) -> np.ndarray:
        return np.vectorize(self.scalar, otypes=[float])(x)

    def __call__(self, x):
        if isinstance(x, np.ndarray):
            return self.array(x.astype(float, copy=False))
        return self.scalar(float(x))

    def to_json(self) -> dict[str, Any]:
        raise NotImplementedError


@dataclass(frozen=True)
class Trapezoid(FuzzyNumber):
    """Trapezoid ``T_{a,b,c,d}``.

    Degenerate edges (``a == b`` or ``c == d``) are steps that already take
    the plateau value at the knot, so ``Trapezoid(-8, -5, 0, 0)(0) == 1``.
    """

    a: float
    b: float
    c: float
    d: float
    kind = "trapezoid"

    def __post_init__(self):
        vals = (self.a, self.b, self.c, self.d)
        if not all(math.isfinite(v) for v in vals):
            raise FuzzyError(f"trapezoid parameters must be finite: {vals}")
        if not (self.a <= self.b <= self.c <= self.d):
            raise FuzzyError(f"trapezoid requires a <= b <= c <= d, got {vals}")

    def scalar(self, x: float) -> float:
        a, b, c, d = self.a, self.b, self.c, self.d
        if x < a or x > d:
            return 0.0
        if b <= x <= c:
            return 1.0
        if x < b:
            return (x - a) / (b - a)
        return (d - x) / (d - c)

    def array(self, x: np.ndarray) -> np.ndarray:
        a, b, c, d = self.a, self.b, self.c, self.d
        out = np.zeros_like(x, dtype=float)
        out[(x >= b) & (x <= c)] = 1.0
        if b > a:
            m = (x >= a) & (x < b)
            out[m] = (x[m] - a) / (b - a)
        if d > c:
            m = (x > c) & (x <= d)
            out[m] = (d - x[m]) / (d - c)
        return out

    def support(self) -> tuple[float, float]:
        return self.a, self.d

    def to_json(self):
        return {"kind": "trapezoid", "a": self.a, "b": self.b, "c": self.c, "d": self.d}


def _s_scalar(x: float, alpha: float, gamma: float) -> float:
    if x <= alpha:
        return 0.0
    if x > gamma:
        return 1.0
    width = gamma - alpha
    if x <= (alpha + gamma) / 2:
        return 2.0 * ((x - alpha) / width) ** 2
    return 1.0 - 2.0 * ((x - gamma) / width) ** 2


def _s_array(x: np.ndarray, alpha: float, gamma: float) -> np.ndarray:
    width = gamma - alpha
    mid = (alpha + gamma) / 2
    low = 2.0 * ((x - alpha) / width) ** 2
    high = 1.0 - 2.0 * ((x - gamma) / width) ** 2
    out = np.where(x <= mid, low, high)
    out = np.where(x <= alpha, 0.0, out)
    return np.where(x > gamma, 1.0, out)


@dataclass(frozen=True)
class SShape(FuzzyNumber):
    """Quadratic S-function ``S_{alpha,gamma}``, nondecreasing from 0 to 1."""

    alpha: float
    gamma: float
    kind = "s"

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.gamma)):
            raise FuzzyError("S-function parameters must be finite")
        if not self.alpha < self.gamma:
            raise FuzzyError(f"S-function requires alpha < gamma, got {self.alpha}, {self.gamma}")

    def scalar(self, x: float) -> float:
        return _s_scalar(x, self.alpha, self.gamma)

    def array(self, x):
        return _s_array(x, self.alpha, self.gamma)

    def to_json(self):
        return {"kind": "s", "alpha": self.alpha, "gamma": self.gamma}


@dataclass(frozen=True)
class LeftSShape(FuzzyNumber):
    """Mirrored S-function, ``1 - S_{alpha,gamma}``; nonincreasing."""

    alpha: float
    gamma: float
    kind = "s_left"

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.gamma)):
            raise FuzzyError("S-function parameters must be finite")
        if not self.alpha < self.gamma:
            raise FuzzyError(f"S-function requires alpha < gamma, got {self.alpha}, {self.gamma}")

    def scalar(self, x: float) -> float:
        return 1.0 - _s_scalar(x, self.alpha, self.gamma)

    def array(self, x):
        return 1.0 - _s_array(x, self.alpha, self.gamma)

    def to_json(self):
        return {"kind": "s_left", "alpha": self.alpha, "gamma": self.gamma}


@dataclass(frozen=True)
class ClampedSum(FuzzyNumber):
    """``min(1, sum of parts)``; used for the disjunction of adjacent
    members of a Ruspini partition."""

    parts: tuple[FuzzyNumber, ...]
    kind = "sum"

    def scalar(self, x):
        return min(1.0, sum(p.scalar(x) for p in self.parts))

    def array(self, x):
        return np.minimum(1.0, sum(p.array(x) for p in self.parts))

    def to_json(self):
        return {"kind": "sum", "parts": [p.to_json() for p in self.parts]}


def eval_fuzzy_number(fn: FuzzyNumber, x: float) -> float:
    return fn.scalar(float(x))


def fuzzy_number_from_json(obj: Mapping[str, Any]) -> FuzzyNumber:
    try:
        kind = obj["kind"]
        if kind == "trapezoid":
            return Trapezoid(float(obj["a"]), float(obj["b"]), float(obj["c"]), float(obj["d"]))
        if kind == "s":
            return SShape(float(obj["alpha"]), float(obj["gamma"]))
        if kind == "s_left":
            return LeftSShape(float(obj["alpha"]), float(obj["gamma"]))
        if kind == "sum":
            return ClampedSum(tuple(fuzzy_number_from_json(p) for p in obj["parts"]))
    except (KeyError, TypeError) as exc:
        raise FuzzyError(f"malformed fuzzy number {obj!r}: {exc}") from exc
    raise FuzzyError(f"unknown fuzzy number kind {obj.get('kind')!r}")


# --------------------------------------------------------------------------
# Sets
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BaseSet:
    elements: tuple

    def __post_init__(self):
        if len(set(self.elements)) != len(self.elements):
            raise FuzzyError("base set identifiers must be unique")

    @classmethod
    def range(cls, n: int) -> "BaseSet":
        return cls(tuple(range(n)))

    def __len__(self):
        return len(self.elements)

    def index(self, element) -> int:
        return self.elements.index(element)


@dataclass(frozen=True)
class CrispSet:
    base: BaseSet
    mask: int

    @classmethod
    def from_elements(cls, base: BaseSet, members: Iterable) -> "CrispSet":
        mask = 0
        for e in members:
            mask |= 1 << base.index(e)
        return cls(base, mask)

    @classmethod
    def from_bools(cls, base: BaseSet, flags: Sequence[bool]) -> "CrispSet":
        if len(flags) != len(base):
            raise FuzzyError("membership length does not match base set")
        return cls(base, bools_to_mask(flags))

    def __len__(self):
        return self.mask.bit_count()

    def __contains__(self, element):
        return bool(self.mask >> self.base.index(element) & 1)

    def members(self) -> list:
        return [e for i, e in enumerate(self.base.elements) if self.mask >> i & 1]


def bools_to_mask(flags: Iterable[bool]) -> int:
    mask = 0
    for i, f in enumerate(flags):
        if f:
            mask |= 1 << i
    return mask


@dataclass(frozen=True)
class FuzzySet:
    base: BaseSet
    mu: tuple[float, ...]

    def __post_init__(self):
        if len(self.mu) != len(self.base):
            raise FuzzyError(f"membership vector has length {len(self.mu)}, base set has {len(self.base)}")
        for m in self.mu:
            if not 0.0 <= m <= 1.0:
                raise FuzzyError(f"membership degree {m} outside [0, 1]")

    @classmethod
    def of(cls, mu: Sequence[float], base: BaseSet | None = None) -> "FuzzySet":
        mu = tuple(float(m) for m in mu)
        return cls(base if base is not None else BaseSet.range(len(mu)), mu)

    @classmethod
    def crisp(cls, crisp: CrispSet) -> "FuzzySet":
        return cls(crisp.base, tuple(float(crisp.mask >> i & 1) for i in range(len(crisp.base))))

    def __len__(self):
        return len(self.mu)

    def is_crisp(self) -> bool:
        return all(m in (0.0, 1.0) for m in self.mu)


def alpha_cut(X: FuzzySet, alpha: float) -> CrispSet:
    """Elements whose membership is at least ``alpha``."""
    if not 0.0 < alpha <= 1.0:
        raise FuzzyError(f"alpha must lie in (0, 1], got {alpha}")
    return CrispSet(X.base, bools_to_mask(m >= alpha for m in X.mu))


def level_breakpoints(*sets: FuzzySet) -> list[float]:
    """Sorted distinct positive membership values of all sets, ending at 1.

    On each interval ``(v_k, v_{k+1}]`` every alpha-cut equals the cut at
    ``v_{k+1}``.
    """
    if not sets:
        raise FuzzyError("at least one fuzzy set is required")
    levels = {m for X in sets for m in X.mu if m > 0.0}
    levels.add(1.0)
    return sorted(levels)


def fuzzify_values(values: Sequence[float], fn: FuzzyNumber) -> FuzzySet:
    arr = np.asarray(values, dtype=float)
    return FuzzySet.of(fn(arr).tolist() if arr.size else ())


# --------------------------------------------------------------------------
# Linguistic variables and quantified partitions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LinguisticVariable:
    name: str
    labels: tuple[tuple[str, FuzzyNumber], ...]
    lo: float
    hi: float

    def __post_init__(self):
        if not self.labels:
            raise FuzzyError(f"linguistic variable {self.name!r} needs at least one label")
        if not self.lo < self.hi:
            raise FuzzyError(f"linguistic variable {self.name!r} needs lo < hi")
        names = [n for n, _ in self.labels]
        if len(set(names)) != len(names):
            raise FuzzyError(f"duplicate label names in {self.name!r}")

    @property
    def label_names(self) -> list[str]:
        return [n for n, _ in self.labels]

    def label(self, name: str) -> FuzzyNumber:
        for n, fn in self.labels:
            if n == name:
                return fn
        raise KeyError(name)

    @property
    def members(self):
        return self.labels

    @property
    def domain(self):
        return self.lo, self.hi


@dataclass(frozen=True)
class ProportionalPartition:
    """Ordered quantifiers over the proportion axis ``[0, 1]``.

    The first member is the bottom of the partition (e.g. "nearly none").
    """

    name: str
    quantifiers: tuple[tuple[str, FuzzyNumber], ...]
    lo: float = field(default=0.0, init=False)
    hi: float = field(default=1.0, init=False)

    def __post_init__(self):
        if not self.quantifiers:
            raise FuzzyError(f"partition {self.name!r} is empty")
        names = self.names
        if len(set(names)) != len(names):
            raise FuzzyError(f"duplicate quantifier names in {self.name!r}")

    @property
    def names(self) -> list[str]:
        return [n for n, _ in self.quantifiers]

    @property
    def members(self):
        return self.quantifiers

    @property
    def domain(self):
        return 0.0, 1.0

    def __len__(self):
        return len(self.quantifiers)

    def __getitem__(self, i: int) -> FuzzyNumber:
        return self.quantifiers[i][1]


def ruspini_check(
    family: LinguisticVariable | ProportionalPartition,
    grid_points: int = 1001,
    tol: float = 1e-9,
) -> tuple[bool, float]:
    """Sample the domain and report whether the memberships sum to 1.

    Returns ``(ok, worst absolute deviation)``.
    """
    if grid_points < 2:
        raise FuzzyError("grid_points must be at least 2")
    lo, hi = family.domain
    xs = np.linspace(lo, hi, grid_points)
    total = np.zeros_like(xs)
    for _, fn in family.members:
        total += fn(xs)
    worst = float(np.max(np.abs(total - 1.0)))
    return worst <= tol, worst


def variable_to_json(lv: LinguisticVariable) -> dict:
    return {
        "domain": [lv.lo, lv.hi],
        "labels": [{"name": n, "fn": fn.to_json()} for n, fn in lv.labels],
    }


def variable_from_json(name: str, obj: Mapping[str, Any]) -> LinguisticVariable:
    lo, hi = obj["domain"]
    labels = tuple((item["name"], fuzzy_number_from_json(item["fn"])) for item in obj["labels"])
    return LinguisticVariable(name, labels, float(lo), float(hi))


def partition_to_json(pp: ProportionalPartition) -> list[dict]:
    return [{"name": n, "fn": fn.to_json()} for n, fn in pp.quantifiers]


def partition_from_json(name: str, items: Sequence[Mapping[str, Any]]) -> ProportionalPartition:
    return ProportionalPartition(
        name, tuple((item["name"], fuzzy_number_from_json(item["fn"])) for item in items)
    )
