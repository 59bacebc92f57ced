"""Semi-fuzzy quantifiers: crisp arguments in, a degree in [0, 1] out.

Every built-in quantifier is defined by a *kernel* over bit masks. The same
kernel runs on plain Python ints (one tuple of sets, any base-set size) and
on ``uint64`` numpy arrays (many tuples at once, base sets up to 63
elements). Quantifiers whose value depends only on a few cardinalities also
carry a :class:`CardinalitySignature`, which the F^A dynamic program uses.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from .fuzzy import CrispSet, FuzzyError, FuzzyNumber, fuzzy_number_from_json

MAX_VECTOR_BITS = 63


class QuantifierError(ValueError):
    """Bad arguments passed to a quantifier."""


def popcount(x):
    if isinstance(x, np.ndarray):
        return np.bitwise_count(x).astype(np.int64)
    return int(x).bit_count()


def full_mask(size: int):
    return (1 << size) - 1


def _ratio(num, den, fn: FuzzyNumber, empty_value: float):
    """``fn(num / den)``, or ``empty_value`` where ``den == 0``."""
    if isinstance(den, np.ndarray):
        safe = np.where(den == 0, 1, den)
        return np.where(den == 0, empty_value, fn(num / safe))
    if den == 0:
        return empty_value
    return fn(num / den)


class SignatureKind(Enum):
    ABSOLUTE_INTERSECTION = "absolute_intersection"
    PROPORTIONAL_PAIR = "proportional_pair"
    RESTRICTED_PROPORTIONAL_PAIR = "restricted_proportional_pair"
    SIMILARITY_PAIR = "similarity_pair"

    @property
    def n_stats(self) -> int:
        return 1 if self is SignatureKind.ABSOLUTE_INTERSECTION else 2


@dataclass(frozen=True)
class CardinalitySignature:
    """Declares that a quantifier depends only on certain counts.

    ``reduced(stats, size)`` receives the statistic tuple (as ints or as
    broadcastable integer arrays) and the base-set size.

    * ABSOLUTE_INTERSECTION: ``(|Y1 & ... & Yn|,)``
    * PROPORTIONAL_PAIR: ``(|Y1 & Y2|, |Y1|)``
    * RESTRICTED_PROPORTIONAL_PAIR: ``(|T & Y1 & Y2|, |T & Y1|)``
    * SIMILARITY_PAIR: ``(|T & Y1 & Y2|, |T & (Y1 | Y2)|)``
    """

    kind: SignatureKind
    reduced: Callable[..., Any]

    def statistics(self, masks: Sequence, size: int) -> tuple:
        k = self.kind
        if k is SignatureKind.ABSOLUTE_INTERSECTION:
            inter = masks[0]
            for m in masks[1:]:
                inter = inter & m
            return (popcount(inter),)
        if k is SignatureKind.PROPORTIONAL_PAIR:
            y1, y2 = masks
            return popcount(y1 & y2), popcount(y1)
        if k is SignatureKind.RESTRICTED_PROPORTIONAL_PAIR:
            t, y1, y2 = masks
            return popcount(t & y1 & y2), popcount(t & y1)
        t, y1, y2 = masks
        return popcount(t & y1 & y2), popcount(t & (y1 | y2))

    def check_arity(self, arity: int) -> None:
        needed = {
            SignatureKind.PROPORTIONAL_PAIR: 2,
            SignatureKind.RESTRICTED_PROPORTIONAL_PAIR: 3,
            SignatureKind.SIMILARITY_PAIR: 3,
        }.get(self.kind)
        if needed is not None and arity != needed:
            raise QuantifierError(f"{self.kind.value} signature needs arity {needed}, got {arity}")


@dataclass(frozen=True, eq=False)
class SemiFuzzyQuantifier:
    name: str
    arity: int
    kernel: Callable[[Sequence, int], Any]
    signature: CardinalitySignature | None = None
    descriptor: Mapping[str, Any] | None = None

    def __post_init__(self):
        if self.arity < 1:
            raise QuantifierError("arity must be at least 1")
        if self.signature is not None:
            self.signature.check_arity(self.arity)

    def eval_masks(self, masks: Sequence[int], size: int) -> float:
        return float(self.kernel(tuple(masks), size))

    def eval_mask_arrays(self, masks: Sequence[np.ndarray], size: int) -> np.ndarray:
        out = self.kernel(tuple(masks), size)
        return np.broadcast_to(np.asarray(out, dtype=float), np.broadcast(*masks).shape)

    def __call__(self, *args: CrispSet) -> float:
        return evaluate(self, *args)

    def __repr__(self):
        return f"SemiFuzzyQuantifier({self.name!r}, arity={self.arity})"


def check_args(q: SemiFuzzyQuantifier, args: Sequence) -> None:
    if len(args) != q.arity:
        raise QuantifierError(f"{q.name} takes {q.arity} arguments, got {len(args)}")
    if len({a.base for a in args}) > 1:
        raise QuantifierError(f"{q.name}: arguments are defined over different base sets")


def evaluate(q: SemiFuzzyQuantifier, *args: CrispSet) -> float:
    check_args(q, args)
    masks = [a.mask for a in args]
    size = len(args[0].base)
    value = q.eval_masks(masks, size)
    if q.signature is not None:
        reduced = float(q.signature.reduced(q.signature.statistics(masks, size), size))
        if reduced != value:
            raise AssertionError(f"{q.name}: signature map gives {reduced}, direct evaluation {value}")
    return value


# --------------------------------------------------------------------------
# Built-in families
# --------------------------------------------------------------------------


def q_all() -> SemiFuzzyQuantifier:
    def kernel(m, size):
        y1, y2 = m
        miss = y1 & ~y2
        if isinstance(miss, np.ndarray):
            return (miss == 0).astype(float)
        return 1.0 if miss == 0 else 0.0

    def reduced(stats, size):
        inter, n1 = stats
        if isinstance(n1, np.ndarray):
            return np.where(inter == n1, 1.0, 0.0)
        return float(inter == n1)

    return SemiFuzzyQuantifier(
        "all", 2, kernel, CardinalitySignature(SignatureKind.PROPORTIONAL_PAIR, reduced), {"kind": "all"}
    )


def _threshold_ratio(num, den, p, empty_value):
    if isinstance(den, np.ndarray):
        safe = np.where(den == 0, 1, den)
        return np.where(den == 0, empty_value, (num / safe >= p).astype(float))
    if den == 0:
        return empty_value
    return 1.0 if num / den >= p else 0.0


def q_at_least_pct(p: float) -> SemiFuzzyQuantifier:
    """Crisp "at least p of the Y1 are Y2"; true when Y1 is empty."""
    if not 0.0 < p <= 1.0:
        raise QuantifierError(f"proportion must lie in (0, 1], got {p}")

    def kernel(m, size):
        y1, y2 = m
        return _threshold_ratio(popcount(y1 & y2), popcount(y1), p, 1.0)

    def reduced(stats, size):
        return _threshold_ratio(stats[0], stats[1], p, 1.0)

    return SemiFuzzyQuantifier(
        f"at_least_{p:g}",
        2,
        kernel,
        CardinalitySignature(SignatureKind.PROPORTIONAL_PAIR, reduced),
        {"kind": "at_least_pct", "p": p},
    )


def q_about_abs(fn: FuzzyNumber) -> SemiFuzzyQuantifier:
    """Absolute quantifier ``fn(|Y1 & Y2|)``."""

    def kernel(m, size):
        y1, y2 = m
        c = popcount(y1 & y2)
        return fn(c.astype(float)) if isinstance(c, np.ndarray) else fn(c)

    def reduced(stats, size):
        c = stats[0]
        return fn(np.asarray(c, dtype=float)) if isinstance(c, np.ndarray) else fn(c)

    return SemiFuzzyQuantifier(
        "about_abs",
        2,
        kernel,
        CardinalitySignature(SignatureKind.ABSOLUTE_INTERSECTION, reduced),
        {"kind": "about_abs", "fn": fn.to_json()},
    )


def _unary_ratio(count, size, fn):
    # only reachable through an empty sliding window
    if size == 0:
        return fn(count * 0.0)
    return fn(count / size)


def q_prop_unary(fn: FuzzyNumber, name: str = "prop_unary") -> SemiFuzzyQuantifier:
    """Unary proportional quantifier ``fn(|Y| / |E|)``."""

    def kernel(m, size):
        return _unary_ratio(popcount(m[0]), size, fn)

    def reduced(stats, size):
        return _unary_ratio(stats[0], size, fn)

    return SemiFuzzyQuantifier(
        name,
        1,
        kernel,
        CardinalitySignature(SignatureKind.ABSOLUTE_INTERSECTION, reduced),
        {"kind": "prop_unary", "fn": fn.to_json()},
    )


def q_prop_binary(fn: FuzzyNumber, name: str = "prop_binary") -> SemiFuzzyQuantifier:
    """``Q(T, Y) = fn(|T & Y| / |T|)``, 1 when T is empty."""

    def kernel(m, size):
        t, y = m
        return _ratio(popcount(t & y), popcount(t), fn, 1.0)

    def reduced(stats, size):
        return _ratio(stats[0], stats[1], fn, 1.0)

    return SemiFuzzyQuantifier(
        name,
        2,
        kernel,
        CardinalitySignature(SignatureKind.PROPORTIONAL_PAIR, reduced),
        {"kind": "prop_binary", "fn": fn.to_json()},
    )


def q_prop_ternary(fn: FuzzyNumber, name: str = "prop_ternary") -> SemiFuzzyQuantifier:
    """``Q(T, Y1, Y2) = fn(|T & Y1 & Y2| / |T & Y1|)``, 1 when T & Y1 is empty."""

    def kernel(m, size):
        t, y1, y2 = m
        ty1 = t & y1
        return _ratio(popcount(ty1 & y2), popcount(ty1), fn, 1.0)

    def reduced(stats, size):
        return _ratio(stats[0], stats[1], fn, 1.0)

    return SemiFuzzyQuantifier(
        name,
        3,
        kernel,
        CardinalitySignature(SignatureKind.RESTRICTED_PROPORTIONAL_PAIR, reduced),
        {"kind": "prop_ternary", "fn": fn.to_json()},
    )


def q_similarity(fn: FuzzyNumber, name: str = "similarity") -> SemiFuzzyQuantifier:
    """``fn(|T & Y1 & Y2| / |T & (Y1 | Y2)|)``, 1 when the denominator set is empty."""

    def kernel(m, size):
        t, y1, y2 = m
        return _ratio(popcount(t & y1 & y2), popcount(t & (y1 | y2)), fn, 1.0)

    def reduced(stats, size):
        return _ratio(stats[0], stats[1], fn, 1.0)

    return SemiFuzzyQuantifier(
        name,
        3,
        kernel,
        CardinalitySignature(SignatureKind.SIMILARITY_PAIR, reduced),
        {"kind": "similarity", "fn": fn.to_json()},
    )


def _in_interval(num, den, r1, r2):
    if isinstance(den, np.ndarray):
        safe = np.where(den == 0, 1, den)
        r = num / safe
        return np.where((den > 0) & (r >= r1) & (r <= r2), 1.0, 0.0)
    if den == 0:
        return 0.0
    r = num / den
    return 1.0 if r1 <= r <= r2 else 0.0


def q_rate(r1: float, r2: float) -> SemiFuzzyQuantifier:
    """Crisp "between r1 and r2 of the Y1 are Y2"; false when Y1 is empty."""
    if not 0.0 <= r1 <= r2 <= 1.0:
        raise QuantifierError(f"rate bounds must satisfy 0 <= r1 <= r2 <= 1, got {r1}, {r2}")

    def kernel(m, size):
        y1, y2 = m
        return _in_interval(popcount(y1 & y2), popcount(y1), r1, r2)

    def reduced(stats, size):
        return _in_interval(stats[0], stats[1], r1, r2)

    return SemiFuzzyQuantifier(
        f"rate[{r1:g},{r2:g}]",
        2,
        kernel,
        CardinalitySignature(SignatureKind.PROPORTIONAL_PAIR, reduced),
        {"kind": "rate", "r1": r1, "r2": r2},
    )


def from_signature(
    name: str, arity: int, kind: SignatureKind, reduced: Callable[..., Any]
) -> SemiFuzzyQuantifier:
    """Build a quantifier from a reduced map over its signature statistics.

    ``reduced(stats, size)`` must accept both ints and integer arrays.
    """
    sig = CardinalitySignature(kind, reduced)

    def kernel(m, size):
        return reduced(sig.statistics(m, size), size)

    return SemiFuzzyQuantifier(name, arity, kernel, sig)


def from_function(name: str, arity: int, func: Callable[..., float]) -> SemiFuzzyQuantifier:
    """Wrap an arbitrary Python predicate over :class:`CrispSet` arguments.

    Such quantifiers have no signature and are evaluated one tuple at a time.
    """
    from .fuzzy import BaseSet

    def kernel(m, size):
        if isinstance(m[0], np.ndarray):
            shape = np.broadcast(*m).shape
            flat = [np.broadcast_to(x, shape).ravel() for x in m]
            base = BaseSet.range(size)
            out = np.array(
                [func(*(CrispSet(base, int(x[i])) for x in flat)) for i in range(flat[0].size)],
                dtype=float,
            )
            return out.reshape(shape)
        base = BaseSet.range(size)
        return func(*(CrispSet(base, x) for x in m))

    return SemiFuzzyQuantifier(name, arity, kernel)


def pointwise_mix(lam: float, qa: SemiFuzzyQuantifier, qb: SemiFuzzyQuantifier) -> SemiFuzzyQuantifier:
    """``lam * qa + (1 - lam) * qb`` evaluated pointwise."""
    if qa.arity != qb.arity:
        raise QuantifierError("mixed quantifiers must share arity")

    def kernel(m, size):
        return lam * qa.kernel(m, size) + (1 - lam) * qb.kernel(m, size)

    return SemiFuzzyQuantifier(f"mix({qa.name},{qb.name})", qa.arity, kernel)


_FN_FAMILIES = {
    "about_abs": q_about_abs,
    "prop_unary": q_prop_unary,
    "prop_binary": q_prop_binary,
    "prop_ternary": q_prop_ternary,
    "similarity": q_similarity,
}


def quantifier_from_json(obj: Mapping[str, Any], fuzzy_numbers: Mapping[str, FuzzyNumber] | None = None):
    """Build a quantifier from a descriptor such as
    ``{"kind": "prop_binary", "fn": {...}}`` or ``{"kind": "rate", "r1": .., "r2": ..}``.

    ``fn`` may also be the name of an entry in ``fuzzy_numbers``.
    """
    kind = obj.get("kind")
    try:
        if kind == "all":
            return q_all()
        if kind == "at_least_pct":
            return q_at_least_pct(float(obj["p"]))
        if kind == "rate":
            return q_rate(float(obj["r1"]), float(obj["r2"]))
        if kind in _FN_FAMILIES:
            fn = obj["fn"]
            if isinstance(fn, str):
                if fuzzy_numbers is None or fn not in fuzzy_numbers:
                    raise QuantifierError(f"unknown fuzzy number {fn!r}")
                fn = fuzzy_numbers[fn]
            else:
                fn = fuzzy_number_from_json(fn)
            return _FN_FAMILIES[kind](fn)
    except KeyError as exc:
        raise QuantifierError(f"quantifier descriptor {obj!r} is missing {exc}") from exc
    except FuzzyError as exc:
        raise QuantifierError(str(exc)) from exc
    raise QuantifierError(f"unknown quantifier kind {kind!r}")
