"""Shared fixtures and slow reference implementations for the tests."""

import itertools

import numpy as np

from fuzzyquant.fuzzy import (
    BaseSet,
    CrispSet,
    FuzzySet,
    LinguisticVariable,
    ProportionalPartition,
    SShape,
    Trapezoid,
)
from fuzzyquant.qfm import representative_prob
from fuzzyquant.quantifiers import (
    evaluate,
    q_about_abs,
    q_all,
    q_at_least_pct,
    q_prop_binary,
    q_prop_ternary,
    q_prop_unary,
    q_rate,
    q_similarity,
)
from fuzzyquant.summarize import EvaluationMatrix

MOST = SShape(0.7, 0.9)


def builtin_quantifiers():
    return [
        q_all(),
        q_at_least_pct(0.6),
        q_about_abs(Trapezoid(2, 4, 6, 8)),
        q_prop_unary(SShape(0.3, 0.7)),
        q_prop_binary(MOST),
        q_prop_ternary(SShape(0.5, 0.8)),
        q_similarity(Trapezoid(0.5, 0.8, 1, 1)),
        q_rate(0.25, 0.75),
        q_rate(0.0, 1.0),
    ]


def monotone_quantifiers():
    """Built-ins that are nondecreasing in their last argument."""
    return [
        q_all(),
        q_at_least_pct(0.6),
        q_prop_unary(SShape(0.3, 0.7)),
        q_prop_binary(MOST),
        q_prop_binary(SShape(0.5, 0.8)),
        q_prop_ternary(SShape(0.5, 0.8)),
    ]


def crisp_fuzzy(base, mask):
    return FuzzySet(base, tuple(float(mask >> i & 1) for i in range(len(base))))


def random_fuzzy(rng, n, base=None, p_crisp=0.2):
    """Memberships with some exact 0s and 1s mixed in."""
    mu = rng.random(n)
    pick = rng.random(n)
    mu[pick < p_crisp / 2] = 0.0
    mu[(pick >= p_crisp / 2) & (pick < p_crisp)] = 1.0
    return FuzzySet(base or BaseSet.range(n), tuple(mu.tolist()))


def brute_force_fa(q, sets):
    """Textbook F^A: every tuple of crisp sets, weighted by representative probabilities."""
    base = sets[0].base
    subsets = [CrispSet(base, m) for m in range(1 << len(base))]
    total = 0.0
    for combo in itertools.product(subsets, repeat=len(sets)):
        w = 1.0
        for X, Y in zip(sets, combo):
            w *= representative_prob(X, Y)
        if w:
            total += w * evaluate(q, *combo)
    return total


def quadrature_md(q, sets, grid=20000):
    """Midpoint-rule approximation of the common-level integral."""
    from fuzzyquant.fuzzy import alpha_cut

    alphas = (np.arange(grid) + 0.5) / grid
    return float(np.mean([evaluate(q, *(alpha_cut(X, a) for X in sets)) for a in alphas]))


def ruspini_partition():
    return ProportionalPartition(
        "quant5",
        (
            ("nearly none", Trapezoid(0.0, 0.0, 0.1, 0.2)),
            ("a few", Trapezoid(0.1, 0.2, 0.3, 0.4)),
            ("several", Trapezoid(0.3, 0.4, 0.5, 0.6)),
            ("many", Trapezoid(0.5, 0.6, 0.8, 0.9)),
            ("nearly all", Trapezoid(0.8, 0.9, 1.0, 1.0)),
        ),
    )


def temperature_variable():
    return LinguisticVariable(
        "temperature",
        (
            ("very low", Trapezoid(0, 0, 5, 8)),
            ("low", Trapezoid(5, 8, 12, 15)),
            ("warm", Trapezoid(12, 15, 22, 25)),
            ("hot", Trapezoid(22, 25, 30, 33)),
            ("very hot", Trapezoid(30, 33, 40, 40)),
        ),
        0.0,
        40.0,
    )


APRIL_ROWS = ("very low", "low", "warm", "hot", "very hot")
APRIL_COLS = ("nearly none", "a few", "several", "many", "nearly all")
APRIL_CELLS = [
    [1, 0, 0, 0, 0],
    [0, 0.72, 0.28, 0, 0],
    [0, 0, 0.28, 0.72, 0],
    [1, 0, 0, 0, 0],
    [1, 0, 0, 0, 0],
]


def april_matrix():
    return EvaluationMatrix(APRIL_ROWS, APRIL_COLS, np.array(APRIL_CELLS, dtype=float))
