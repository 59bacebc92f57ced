"""Fuzzy signals over an integer time axis and sliding quantified patterns.

A pattern such as "in most of the last five years, increments were small"
is a fuzzified quantifier whose first argument is a relative temporal
window. :func:`sliding_evaluate` moves the window along the axis and
evaluates the quantifier at every requested instant.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .fuzzy import BaseSet, FuzzyError, FuzzyNumber, FuzzySet, Trapezoid
from .qfm import FuzzifiedQuantifier


class NumericDomainError(ArithmeticError):
    """Arithmetic on a series is undefined at some instant."""


@dataclass(frozen=True)
class TimeAxis:
    start: int
    length: int
    step: str = "step"

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("a time axis needs at least one instant")

    @property
    def end(self) -> int:
        """Last instant (inclusive)."""
        return self.start + self.length - 1

    @property
    def instants(self) -> range:
        return range(self.start, self.start + self.length)

    def __contains__(self, t: int) -> bool:
        return self.start <= t <= self.end

    def position(self, t: int) -> int:
        return t - self.start


def _missing_array(axis: TimeAxis, missing) -> np.ndarray:
    if missing is None:
        return np.zeros(axis.length, dtype=bool)
    return np.asarray(missing, dtype=bool)


@dataclass(frozen=True, eq=False)
class RawSeries:
    axis: TimeAxis
    values: np.ndarray
    missing: np.ndarray = field(default=None)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        missing = _missing_array(self.axis, self.missing) | np.isnan(values)
        if values.shape != (self.axis.length,) or missing.shape != values.shape:
            raise ValueError("series length does not match its time axis")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "missing", missing)

    def __len__(self):
        return self.axis.length


@dataclass(frozen=True, eq=False)
class FuzzySignal:
    axis: TimeAxis
    mu: np.ndarray
    missing: np.ndarray = field(default=None)

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        missing = _missing_array(self.axis, self.missing)
        if mu.shape != (self.axis.length,) or missing.shape != mu.shape:
            raise ValueError("signal length does not match its time axis")
        if np.any((mu < 0) | (mu > 1)):
            raise FuzzyError("signal degrees must lie in [0, 1]")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "missing", missing)

    def at(self, t: int) -> float:
        return float(self.mu[self.axis.position(t)]) if t in self.axis else 0.0

    def is_missing(self, t: int) -> bool:
        return bool(self.missing[self.axis.position(t)]) if t in self.axis else True


@dataclass(frozen=True)
class TemporalWindow:
    """Fuzzy number over integer offsets, relative to instant 0.

    Trapezoids carry their own support; other shapes need explicit
    ``lo``/``hi`` bounds outside which the window is treated as 0.
    """

    shape: FuzzyNumber
    lo: int | None = None
    hi: int | None = None

    def __post_init__(self):
        if self.lo is None or self.hi is None:
            if not isinstance(self.shape, Trapezoid):
                raise FuzzyError("non-trapezoidal windows need explicit lo/hi bounds")
            object.__setattr__(self, "lo", math.ceil(self.shape.a) if self.lo is None else self.lo)
            object.__setattr__(self, "hi", math.floor(self.shape.d) if self.hi is None else self.hi)
        if self.lo > self.hi:
            raise FuzzyError("window support is empty")

    def membership(self, offset: int) -> float:
        if offset < self.lo or offset > self.hi:
            return 0.0
        return self.shape.scalar(float(offset))

    def offsets(self) -> list[tuple[int, float]]:
        """Offsets with strictly positive membership."""
        out = []
        for off in range(self.lo, self.hi + 1):
            m = self.membership(off)
            if m > 0.0:
                out.append((off, m))
        return out


@dataclass(frozen=True, eq=False)
class BinaryObservableSeries:
    axis_instants: tuple[int, ...]
    flags: tuple[bool, ...]
    threshold: float


@dataclass(frozen=True)
class SlidePoint:
    t: int
    degree: float
    degraded: bool = False


# --------------------------------------------------------------------------
# Series operations
# --------------------------------------------------------------------------


def pct_change(raw: RawSeries) -> RawSeries:
    """Percentage variation with respect to the previous instant."""
    values = np.full(raw.axis.length, np.nan)
    missing = np.ones(raw.axis.length, dtype=bool)
    for i in range(1, raw.axis.length):
        if raw.missing[i] or raw.missing[i - 1]:
            continue
        prev = raw.values[i - 1]
        if prev == 0.0:
            raise NumericDomainError(
                f"zero value at instant {raw.axis.start + i - 1} used as denominator"
            )
        values[i] = 100.0 * (raw.values[i] - prev) / prev
        missing[i] = False
    return RawSeries(raw.axis, values, missing)


def fuzzify_series(raw: RawSeries, fn: FuzzyNumber) -> FuzzySignal:
    mu = np.zeros(raw.axis.length)
    present = ~raw.missing
    if present.any():
        mu[present] = fn(raw.values[present])
    return FuzzySignal(raw.axis, mu, raw.missing.copy())


def signal_from_degrees(axis: TimeAxis, degrees: Sequence[float], missing=None) -> FuzzySignal:
    degrees = np.asarray(degrees, dtype=float)
    gaps = np.isnan(degrees) if missing is None else np.asarray(missing, dtype=bool) | np.isnan(degrees)
    return FuzzySignal(axis, np.where(gaps, 0.0, degrees), gaps)


def displace_window(w: TemporalWindow, t0: int, axis: TimeAxis | None = None) -> FuzzySet:
    """Window moved to ``t0``: membership at t is ``w(t - t0)``.

    The base set holds the instants with positive membership, restricted to
    ``axis`` when one is given. The result may have an empty base set.
    """
    pairs = [(t0 + off, m) for off, m in w.offsets()]
    if axis is not None:
        pairs = [(t, m) for t, m in pairs if t in axis]
    return FuzzySet(BaseSet(tuple(t for t, _ in pairs)), tuple(m for _, m in pairs))


def displace_signal(s: FuzzySignal, d: int) -> FuzzySignal:
    """``out(t) = s(t - d)``; instants with no source value are missing."""
    n = s.axis.length
    mu = np.zeros(n)
    missing = np.ones(n, dtype=bool)
    if abs(d) < n:
        if d >= 0:
            mu[d:] = s.mu[: n - d]
            missing[d:] = s.missing[: n - d]
        else:
            mu[:d] = s.mu[-d:]
            missing[:d] = s.missing[-d:]
    return FuzzySignal(s.axis, mu, missing)


def _evaluate_at(
    fq: FuzzifiedQuantifier,
    w: TemporalWindow,
    signals: Sequence[FuzzySignal],
    t: int,
    clip_zero: bool,
) -> SlidePoint:
    axis = signals[0].axis if signals else None
    offsets = w.offsets()
    clipped = False
    if clip_zero:
        instants = []
        window_mu = []
        for off, m in offsets:
            ti = t + off
            if axis is not None and ti not in axis:
                clipped = True
                continue
            instants.append(ti)
            window_mu.append(m)
    else:
        instants = list(axis.instants)
        window_mu = [w.membership(ti - t) for ti in instants]
        clipped = any(t + off not in axis for off, _ in offsets)

    degraded = clipped or any(s.is_missing(ti) for s in signals for ti, m in zip(instants, window_mu) if m > 0)
    if not instants:
        # empty restriction: every argument is the empty set
        degree = fq.source.eval_masks([0] * fq.arity, 0)
        return SlidePoint(t, degree, True)
    base = BaseSet(tuple(instants))
    args = [FuzzySet(base, tuple(window_mu))]
    for s in signals:
        args.append(FuzzySet(base, tuple(s.at(ti) for ti in instants)))
    return SlidePoint(t, fq(*args), degraded)


def sliding_evaluate(
    fq: FuzzifiedQuantifier,
    w: TemporalWindow,
    signals: Sequence[tuple[FuzzySignal, int]] | Sequence[FuzzySignal],
    instants: Iterable[int] | None = None,
    *,
    clip_zero: bool = True,
    workers: int = 1,
) -> list[SlidePoint]:
    """Evaluate ``fq(window at t, S1^d1, ..., Sn^dn)`` for each instant t.

    ``signals`` holds ``(signal, displacement)`` pairs (a bare signal means
    displacement 0). With ``clip_zero`` (the default) only instants where
    the window is positive form the base set; turning it off uses the whole
    axis and gives the same degrees.
    """
    pairs = [(s, 0) if isinstance(s, FuzzySignal) else s for s in signals]
    if fq.arity != 1 + len(pairs):
        raise ValueError(f"quantifier {fq.name} has arity {fq.arity}, pattern supplies {1 + len(pairs)} arguments")
    if not pairs:
        raise ValueError("at least one signal is required to fix the time axis")
    axis = pairs[0][0].axis
    if any(s.axis != axis for s, _ in pairs):
        raise ValueError("all signals must share one time axis")
    moved = [displace_signal(s, d) if d else s for s, d in pairs]
    ts = list(axis.instants if instants is None else instants)

    def one(t):
        return _evaluate_at(fq, w, moved, t, clip_zero)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(one, ts))
    return [one(t) for t in ts]


def threshold_observable(series: Sequence[SlidePoint | tuple[int, float]], theta: float) -> BinaryObservableSeries:
    """Flag the instants whose degree is strictly above ``theta``."""
    if not 0.0 <= theta <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    ts, flags = [], []
    for point in series:
        t, degree = (point.t, point.degree) if isinstance(point, SlidePoint) else point
        ts.append(t)
        flags.append(degree > theta)
    return BinaryObservableSeries(tuple(ts), tuple(flags), theta)
