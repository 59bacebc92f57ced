"""Quantifier fuzzification mechanisms.

Three mechanisms turn a semi-fuzzy quantifier into a fuzzy quantifier:

* ``md``: integrate Q over a common alpha level for every argument.
* ``i``: integrate over independent alpha levels, one per argument.
* ``a``: expectation of Q when every element joins every argument
  independently with probability equal to its membership degree.

Both level integrals are computed exactly as finite sums over the intervals
between membership values. ``a`` has three strategies: full enumeration of
the representatives (``exact``), a dynamic program over the count
statistics of a quantifier's cardinality signature (``dp``), and a seeded
Monte Carlo estimate (``mc``).
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Mapping, Sequence

import numpy as np

from .fuzzy import FuzzySet, level_breakpoints
from .quantifiers import (
    MAX_VECTOR_BITS,
    QuantifierError,
    SemiFuzzyQuantifier,
    SignatureKind,
)

EXACT_MAX_BITS = 22
I_MAX_ARITY = 3
DP_TRIM_THRESHOLD = 1e-15
_SMALL_BITS = 6
_CHUNK = 1 << 18


class UnsupportedOperation(RuntimeError):
    """The requested evaluation is not available for this input."""


class CapExceeded(UnsupportedOperation):
    """The exact computation would be too large."""


# --------------------------------------------------------------------------
# Method descriptors
# --------------------------------------------------------------------------


class Strategy(Enum):
    EXACT = "exact"
    DP = "dp"
    MC = "mc"


@dataclass(frozen=True)
class Method:
    qfm: str
    strategy: Strategy | None = None
    samples: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if self.qfm not in ("md", "i", "a"):
            raise ValueError(f"unknown QFM {self.qfm!r}")
        if self.qfm == "a" and self.strategy is None:
            object.__setattr__(self, "strategy", Strategy.DP)
        if self.qfm != "a" and self.strategy is not None:
            raise ValueError(f"QFM {self.qfm!r} takes no strategy")
        if self.samples < 1:
            raise ValueError("Monte Carlo needs at least one sample")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @classmethod
    def md(cls):
        return cls("md")

    @classmethod
    def i(cls):
        return cls("i")

    @classmethod
    def a(cls, strategy: str | Strategy = Strategy.DP, samples: int = 100_000, seed: int = 0):
        return cls("a", Strategy(strategy), samples, seed)

    @property
    def deterministic(self) -> bool:
        return self.strategy is not Strategy.MC

    def descriptor(self) -> dict[str, Any]:
        if self.qfm != "a":
            return {"qfm": self.qfm}
        d: dict[str, Any] = {"qfm": "a", "strategy": self.strategy.value}
        if self.strategy is Strategy.MC:
            d["samples"] = self.samples
            d["seed"] = self.seed
        return d

    @classmethod
    def from_descriptor(cls, d: Mapping[str, Any]) -> "Method":
        try:
            qfm = d["qfm"]
        except (KeyError, TypeError):
            raise ValueError(f"method descriptor needs a 'qfm' entry: {d!r}") from None
        if qfm != "a":
            return cls(qfm)
        return cls.a(d.get("strategy", "dp"), int(d.get("samples", 100_000)), int(d.get("seed", 0)))

    @classmethod
    def parse(cls, text: str) -> "Method":
        """Parse ``md``, ``i``, ``a/exact``, ``a/dp``, ``a/mc[:samples[:seed]]``
        or a JSON descriptor."""
        text = text.strip()
        if text.startswith("{"):
            return cls.from_descriptor(json.loads(text))
        head, _, rest = text.partition("/")
        if head in ("md", "i") and not rest:
            return cls(head)
        if head == "a":
            name, *params = (rest or "dp").split(":")
            if name == "mc":
                samples = int(params[0]) if params else 100_000
                seed = int(params[1]) if len(params) > 1 else 0
                return cls.a(Strategy.MC, samples, seed)
            if not params:
                return cls.a(name)
        raise ValueError(f"cannot parse method {text!r}")


# --------------------------------------------------------------------------
# Shared helpers
# --------------------------------------------------------------------------


def _prepare(q: SemiFuzzyQuantifier, sets: Sequence[FuzzySet]) -> int:
    if len(sets) != q.arity:
        raise QuantifierError(f"{q.name} takes {q.arity} arguments, got {len(sets)}")
    if len({X.base for X in sets}) > 1:
        raise QuantifierError(f"{q.name}: arguments are defined over different base sets")
    return len(sets[0].base)


def _cuts_descending(X: FuzzySet, levels: Sequence[float]) -> list[int]:
    """Alpha-cut masks of X at each level, for levels in ascending order."""
    order = sorted(range(len(X.mu)), key=lambda e: -X.mu[e])
    cuts = []
    mask = 0
    pos = 0
    for v in reversed(levels):
        while pos < len(order) and X.mu[order[pos]] >= v:
            mask |= 1 << order[pos]
            pos += 1
        cuts.append(mask)
    cuts.reverse()
    return cuts


# --------------------------------------------------------------------------
# Level-integral mechanisms
# --------------------------------------------------------------------------


def apply_md(q: SemiFuzzyQuantifier, *sets: FuzzySet) -> float:
    size = _prepare(q, sets)
    levels = level_breakpoints(*sets)
    cuts = [_cuts_descending(X, levels) for X in sets]
    terms = []
    prev = 0.0
    for k, v in enumerate(levels):
        terms.append((v - prev) * q.eval_masks([c[k] for c in cuts], size))
        prev = v
    return math.fsum(terms)


def apply_i(q: SemiFuzzyQuantifier, *sets: FuzzySet) -> float:
    size = _prepare(q, sets)
    if q.arity > I_MAX_ARITY:
        raise UnsupportedOperation(f"the independent-levels QFM supports arity <= {I_MAX_ARITY}")
    per_arg = []
    for X in sets:
        levels = level_breakpoints(X)
        widths = [v - u for u, v in zip([0.0, *levels], levels)]
        per_arg.append(list(zip(widths, _cuts_descending(X, levels))))
    terms = []
    for combo in itertools.product(*per_arg):
        weight = 1.0
        for w, _ in combo:
            weight *= w
        terms.append(weight * q.eval_masks([m for _, m in combo], size))
    return math.fsum(terms)


# --------------------------------------------------------------------------
# Probabilistic mechanism
# --------------------------------------------------------------------------


def representative_prob(X: FuzzySet, Y) -> float:
    """Probability that independent draws with the memberships of X give Y."""
    if Y.base != X.base:
        raise QuantifierError("representative_prob: different base sets")
    p = 1.0
    for i, m in enumerate(X.mu):
        p *= m if Y.mask >> i & 1 else 1.0 - m
    return p


def _representatives(X: FuzzySet):
    """All crisp sets with nonzero representative probability, as uint64
    masks with their weights.

    Elements with membership 0 or 1 are fixed; only the others are
    enumerated.
    """
    mu = np.asarray(X.mu, dtype=float)
    certain = 0
    for i, m in enumerate(X.mu):
        if m == 1.0:
            certain |= 1 << i
    free = np.flatnonzero((mu > 0.0) & (mu < 1.0))
    u = len(free)
    bits = (np.arange(1 << u)[:, None] >> np.arange(u)) & 1
    weights = np.prod(np.where(bits == 1, mu[free], 1.0 - mu[free]), axis=1)
    place = np.left_shift(np.uint64(1), free.astype(np.uint64))
    masks = np.uint64(certain) + (bits.astype(np.uint64) * place).sum(axis=1, dtype=np.uint64)
    return masks, weights


def _representatives_small(X: FuzzySet) -> list[tuple[int, float]]:
    """Plain-Python version of :func:`_representatives` for few uncertain elements."""
    reps = [(sum(1 << i for i, m in enumerate(X.mu) if m == 1.0), 1.0)]
    for i, m in enumerate(X.mu):
        if 0.0 < m < 1.0:
            reps = [(mask, w * (1.0 - m)) for mask, w in reps] + [(mask | 1 << i, w * m) for mask, w in reps]
    return reps


def uncertain_bits(*sets: FuzzySet) -> int:
    return sum(1 for X in sets for m in X.mu if 0.0 < m < 1.0)


def apply_a_exact(q: SemiFuzzyQuantifier, *sets: FuzzySet, max_bits: int = EXACT_MAX_BITS) -> float:
    """Sum of ``prod m_Xi(Yi) * Q(Y1..Yn)`` over every tuple of representatives."""
    size = _prepare(q, sets)
    bits = uncertain_bits(*sets)
    if bits > max_bits:
        raise CapExceeded(
            f"exact evaluation would enumerate 2^{bits} representative tuples "
            f"(cap 2^{max_bits}); use the dp or mc strategy"
        )
    vector = size <= MAX_VECTOR_BITS
    if bits <= _SMALL_BITS or not vector:
        # numpy set-up costs more than it saves on a handful of tuples
        reps = [_representatives_small(X) for X in sets]
        terms = []
        for combo in itertools.product(*reps):
            weight = 1.0
            for _, w in combo:
                weight *= w
            if weight:
                terms.append(weight * q.eval_masks([m for m, _ in combo], size))
        return math.fsum(terms)

    reps = [_representatives(X) for X in sets]
    shape = tuple(len(w) for _, w in reps)
    total = int(np.prod(shape))
    partial = []
    for start in range(0, total, _CHUNK):
        flat = np.arange(start, min(total, start + _CHUNK))
        idx = np.unravel_index(flat, shape)
        weight = np.ones(len(flat))
        masks = []
        for (m, w), ix in zip(reps, idx):
            weight = weight * w[ix]
            masks.append(m[ix])
        partial.append(float(np.dot(weight, q.eval_mask_arrays(masks, size))))
    return math.fsum(partial)


def _element_probabilities(kind: SignatureKind, mus: Sequence[np.ndarray]):
    """Per-element probabilities of incrementing (both, only second) stats,
    and of leaving them unchanged."""
    if kind is SignatureKind.PROPORTIONAL_PAIR:
        m1, m2 = mus
        return m1 * m2, m1 * (1.0 - m2), 1.0 - m1
    if kind is SignatureKind.RESTRICTED_PROPORTIONAL_PAIR:
        t, m1, m2 = mus
        return t * m1 * m2, t * m1 * (1.0 - m2), 1.0 - t * m1
    t, m1, m2 = mus
    exactly_one = m1 * (1.0 - m2) + m2 * (1.0 - m1)
    return t * m1 * m2, t * exactly_one, (1.0 - t) + t * (1.0 - m1) * (1.0 - m2)


def count_distribution(probabilities: Sequence[float], trim: bool = False) -> np.ndarray:
    """Distribution of the number of successes of independent Bernoulli trials."""
    pmf = np.zeros(len(probabilities) + 1)
    pmf[0] = 1.0
    for k, p in enumerate(probabilities):
        head = pmf[: k + 2].copy()
        pmf[: k + 2] = head * (1.0 - p)
        pmf[1 : k + 2] += head[: k + 1] * p
        if trim:
            pmf[pmf < DP_TRIM_THRESHOLD] = 0.0
    return pmf


def pair_distribution(pa, pb, pc, trim: bool = False) -> np.ndarray:
    """Joint distribution of (first, second) counts where each element adds
    (1, 1) with probability pa, (0, 1) with pb and nothing with pc."""
    n = len(pa)
    P = np.zeros((n + 1, n + 1))
    P[0, 0] = 1.0
    for k in range(n):
        view = P[: k + 2, : k + 2]
        old = view.copy()
        view *= pc[k]
        view[1:, 1:] += pa[k] * old[:-1, :-1]
        view[:, 1:] += pb[k] * old[:, :-1]
        if trim:
            view[view < DP_TRIM_THRESHOLD] = 0.0
    return P


def apply_a_dp(q: SemiFuzzyQuantifier, *sets: FuzzySet, trim: bool = False) -> float:
    """F^A through the distribution of the quantifier's signature statistics."""
    size = _prepare(q, sets)
    sig = q.signature
    if sig is None:
        raise UnsupportedOperation(f"{q.name} has no cardinality signature; use exact or mc")
    mus = [np.asarray(X.mu, dtype=float) for X in sets]
    if sig.kind is SignatureKind.ABSOLUTE_INTERSECTION:
        p = np.prod(mus, axis=0) if mus[0].size else np.zeros(0)
        pmf = count_distribution(p, trim)
        values = np.asarray(sig.reduced((np.arange(size + 1),), size), dtype=float)
        return float(np.dot(pmf, np.broadcast_to(values, pmf.shape)))
    pa, pb, pc = _element_probabilities(sig.kind, mus)
    P = pair_distribution(pa, pb, pc, trim)
    first, second = np.indices(P.shape)
    values = np.asarray(sig.reduced((first, second), size), dtype=float)
    return float(np.sum(P * np.broadcast_to(values, P.shape)))


def _mix64(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(0xBF58476D1CE4E5B9)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def counter_uniforms(seed: int, sample: np.ndarray, arg: int, n_args: int, n_elements: int) -> np.ndarray:
    """Uniform draws in [0, 1) keyed by (seed, sample, argument, element).

    Returns an array of shape ``(len(sample), n_elements)``. The value for a
    given key never depends on which other keys are requested alongside it.
    """
    key = _mix64(np.array([seed], dtype=np.uint64))[0]
    counter = (sample.astype(np.uint64)[:, None] * np.uint64(n_args) + np.uint64(arg)) * np.uint64(
        n_elements
    ) + np.arange(n_elements, dtype=np.uint64)[None, :]
    z = _mix64(counter * np.uint64(0x9E3779B97F4A7C15) + key)
    return (z >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


def _draw_statistics(kind: SignatureKind, draws: Sequence[np.ndarray]):
    if kind is SignatureKind.ABSOLUTE_INTERSECTION:
        return (np.logical_and.reduce(draws).sum(axis=1),)
    if kind is SignatureKind.PROPORTIONAL_PAIR:
        y1, y2 = draws
        return (y1 & y2).sum(axis=1), y1.sum(axis=1)
    t, y1, y2 = draws
    if kind is SignatureKind.RESTRICTED_PROPORTIONAL_PAIR:
        return (t & y1 & y2).sum(axis=1), (t & y1).sum(axis=1)
    return (t & y1 & y2).sum(axis=1), (t & (y1 | y2)).sum(axis=1)


def apply_a_mc(q: SemiFuzzyQuantifier, *sets: FuzzySet, samples: int = 100_000, seed: int = 0) -> float:
    """Monte Carlo estimate of F^A, reproducible for a given seed."""
    size = _prepare(q, sets)
    if samples < 1:
        raise ValueError("samples must be at least 1")
    n = len(sets)
    mus = [np.asarray(X.mu, dtype=float) for X in sets]
    chunk = max(1, (1 << 20) // max(1, n * size))
    place = np.left_shift(np.uint64(1), np.arange(size, dtype=np.uint64)) if size <= MAX_VECTOR_BITS else None
    values = np.empty(samples)
    for start in range(0, samples, chunk):
        idx = np.arange(start, min(samples, start + chunk))
        draws = [counter_uniforms(seed, idx, a, n, size) < mus[a][None, :] for a in range(n)]
        if place is not None:
            masks = [(d.astype(np.uint64) * place).sum(axis=1, dtype=np.uint64) for d in draws]
            out = q.eval_mask_arrays(masks, size)
        elif q.signature is not None:
            stats = _draw_statistics(q.signature.kind, draws)
            out = np.broadcast_to(np.asarray(q.signature.reduced(stats, size), dtype=float), idx.shape)
        else:
            out = np.array(
                [
                    q.eval_masks(
                        [int.from_bytes(np.packbits(d[r], bitorder="little").tobytes(), "little") for d in draws],
                        size,
                    )
                    for r in range(len(idx))
                ]
            )
        values[idx] = out
    return math.fsum(values) / samples


# --------------------------------------------------------------------------
# Dispatch
# --------------------------------------------------------------------------


def apply(q: SemiFuzzyQuantifier, method: Method, *sets: FuzzySet, exact_max_bits: int = EXACT_MAX_BITS) -> float:
    if method.qfm == "md":
        return apply_md(q, *sets)
    if method.qfm == "i":
        return apply_i(q, *sets)
    if method.strategy is Strategy.EXACT:
        return apply_a_exact(q, *sets, max_bits=exact_max_bits)
    if method.strategy is Strategy.MC:
        return apply_a_mc(q, *sets, samples=method.samples, seed=method.seed)
    if q.signature is None:
        # no silent switch to Monte Carlo: stay exact or fail
        return apply_a_exact(q, *sets, max_bits=exact_max_bits)
    return apply_a_dp(q, *sets)


@dataclass(frozen=True)
class FuzzifiedQuantifier:
    source: SemiFuzzyQuantifier
    method: Method

    @property
    def arity(self) -> int:
        return self.source.arity

    @property
    def name(self) -> str:
        return self.source.name

    def __call__(self, *sets: FuzzySet) -> float:
        return apply(self.source, self.method, *sets)


def fuzzify(q: SemiFuzzyQuantifier, method: Method) -> FuzzifiedQuantifier:
    return FuzzifiedQuantifier(q, method)
