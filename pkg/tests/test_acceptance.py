"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -v`` or
``python tests/test_acceptance.py``.
"""

import itertools
import math
import random
import sys
import time

import numpy as np
import pytest

from fuzzyquant.dsl import Expression, Term, parse_expression, print_expression
from fuzzyquant.fuzzy import BaseSet, FuzzySet, LeftSShape, SShape, Trapezoid, eval_fuzzy_number, ruspini_check
from fuzzyquant.qfm import (
    Method,
    apply,
    apply_a_dp,
    apply_a_exact,
    apply_a_mc,
    apply_i,
    apply_md,
    fuzzify,
)
from fuzzyquant.quantifiers import q_all, q_prop_binary, q_rate
from fuzzyquant.summarize import SummaryStatement, build_matrix, greedy_extract, rate_grid, rate_search
from fuzzyquant.temporal import FuzzySignal, TemporalWindow, TimeAxis, sliding_evaluate

from support import (
    APRIL_CELLS,
    MOST,
    april_matrix,
    builtin_quantifiers,
    crisp_fuzzy,
    monotone_quantifiers,
    random_fuzzy,
    ruspini_partition,
    temperature_variable,
)
from test_cli import GOLDEN, GOLDEN_CASES, run
from test_qfm import at_least
from test_summarize import brute_force_rate

DETERMINISTIC = [Method.md(), Method.i(), Method.a("exact"), Method.a("dp")]


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})")
        assert ok, detail

    return emit


def same_base(rng, size, arity):
    first = random_fuzzy(rng, size)
    return [first] + [FuzzySet(first.base, random_fuzzy(rng, size).mu) for _ in range(arity - 1)]


def test_criterion_01_crisp_coincidence(report):
    start = time.perf_counter()
    checked = mismatches = 0
    for q in builtin_quantifiers():
        for size in range(0 if q.arity > 1 else 1, 6):
            base = BaseSet.range(size)
            sets = [crisp_fuzzy(base, m) for m in range(1 << size)]
            for masks in itertools.product(range(1 << size), repeat=q.arity):
                args = [sets[m] for m in masks]
                expected = q.eval_masks(masks, size)
                for mech in (apply_md, apply_i, apply_a_exact):
                    checked += 1
                    mismatches += mech(q, *args) != expected
    elapsed = time.perf_counter() - start
    report(
        1,
        "crisp coincidence, |E| <= 5, MD/I/A",
        mismatches == 0 and elapsed < 10,
        f"{checked} evaluations, {mismatches} mismatches, {elapsed:.1f}s",
    )


def test_criterion_02_fa_oracle_equivalence(report):
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    signed = [q for q in builtin_quantifiers() if q.signature is not None]
    worst_dp = 0.0
    mc_ok = 0
    bound = 4 * math.sqrt(0.25 / 200_000)
    for k in range(200):
        q = signed[k % len(signed)]
        size = int(rng.integers(1, min(12, 24 // q.arity) + 1))
        sets = same_base(rng, size, q.arity)
        exact = apply_a_exact(q, *sets, max_bits=24)
        worst_dp = max(worst_dp, abs(apply_a_dp(q, *sets) - exact))
        mc_ok += abs(apply_a_mc(q, *sets, samples=200_000, seed=k) - exact) <= bound
    elapsed = time.perf_counter() - start
    report(
        2,
        "F^A strategies agree",
        worst_dp <= 1e-12 and mc_ok >= 195 and elapsed < 120,
        f"max |dp-exact| {worst_dp:.2e}, mc within {bound:.4f} in {mc_ok}/200, {elapsed:.1f}s",
    )


def test_criterion_03_hand_integration(report):
    half = FuzzySet.of([0.5])
    cases = {
        "MD (1,.5) |Y|>=2": (apply_md(at_least(2), FuzzySet.of([1.0, 0.5])), 0.5),
        "I all-case": (apply_i(q_all(), half, half), 0.75),
        "MD all-case": (apply_md(q_all(), half, half), 1.0),
        "A (.5,.5) |Y|>=1": (apply_a_exact(at_least(1), FuzzySet.of([0.5, 0.5])), 0.75),
    }
    errors = {k: abs(got - want) for k, (got, want) in cases.items()}
    report(3, "hand-integration oracles", max(errors.values()) <= 1e-12, ", ".join(f"{k}: {cases[k][0]}" for k in cases))


def test_criterion_04_ruspini_row_sums(report):
    lv, pp = temperature_variable(), ruspini_partition()
    assert ruspini_check(pp)[0]
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(50):
        values = rng.uniform(0, 40, size=int(rng.integers(1, 13))).tolist()
        for method in DETERMINISTIC:
            worst = max(worst, float(np.max(np.abs(build_matrix(values, lv, pp, method).row_sums() - 1.0))))
    low = APRIL_CELLS[1]
    report(
        4,
        "Ruspini row sums",
        worst <= 1e-6 and low[1] + low[2] == 1.0,
        f"max |row sum - 1| {worst:.2e} over 50 datasets x 4 methods; April 'low' row {low[1]}+{low[2]}",
    )


def test_criterion_05_april_fixture(report):
    default = greedy_extract(april_matrix())
    expected = [SummaryStatement(("many",), "warm", 0.72), SummaryStatement(("a few",), "low", 0.72)]
    full = greedy_extract(april_matrix(), suppress_bottom=False)
    extra = [s for s in full if s not in expected]
    nn = {SummaryStatement(("nearly none",), lab, 1.0) for lab in ("very low", "hot", "very hot")}
    ok = default == expected and set(extra) == nn and len(full) == 5
    report(5, "April summary", ok, "; ".join(f"{s.quantifier} {s.label} {s.degree}" for s in default))


def test_criterion_06_rate_search_parity(report):
    rng = np.random.default_rng(6)
    exact_matches = independent_matches = 0
    for _ in range(100):
        n = int(rng.integers(1, 11))
        X1, X2 = same_base(rng, n, 2)
        delta = float(rng.choice([0.1, 0.2, 0.25, 0.3, 0.5]))
        step = float(rng.choice([0.025, 0.05, 0.1]))
        res = rate_search(X1, X2, delta, step)
        # full-grid scan over the library's own degrees: must agree bit for bit
        grid = [(h, min(1.0, round(h + delta, 12))) for h in rate_grid(delta, step)]
        degrees = [fuzzify(q_rate(h, r2), Method.a("dp"))(X1, X2) for h, r2 in grid]
        k = degrees.index(max(degrees))
        exact_matches += (res.r1, res.r2, res.degree) == (*grid[k], degrees[k])
        # independent count-distribution oracle
        h, r2, degree = brute_force_rate(X1, X2, delta, step)
        independent_matches += (res.r1, res.r2) == (h, r2) and abs(res.degree - degree) <= 1e-12
    crisp = rate_search(FuzzySet.of([1.0] * 10), FuzzySet.of([1.0] * 7 + [0.0] * 3), 0.2, 0.025)
    fixture = (crisp.r1, crisp.r2, crisp.degree) == (0.5, 0.7, 1.0)
    report(
        6,
        "rate-search parity",
        exact_matches == 100 and independent_matches == 100 and fixture,
        f"grid scan {exact_matches}/100, independent oracle {independent_matches}/100, "
        f"crisp 0.7 fixture -> [{crisp.r1}, {crisp.r2}] degree {crisp.degree}",
    )


def test_criterion_07_temporal_properties(report):
    rng = np.random.default_rng(7)
    most_dp = fuzzify(q_prop_binary(MOST), Method.a("dp"))
    shift_ok = 0
    for k in range(50):
        n = int(rng.integers(16, 30))
        sig = FuzzySignal(TimeAxis(0, n), rng.random(n))
        a = int(rng.integers(-5, 1))
        w = TemporalWindow(Trapezoid(a, a + rng.uniform(0, 2), a + 2.5, a + 3 + rng.uniform(0, 1)))
        d = int(rng.integers(-3, 4))
        method = DETERMINISTIC[k % len(DETERMINISTIC)]
        fq = fuzzify(q_prop_binary(MOST), method)
        interior = [t for t in range(6 + abs(d), n - 6 - abs(d))]
        shifted = sliding_evaluate(fq, w, [(sig, d)], interior)
        plain = sliding_evaluate(fq, w, [sig], [t - d for t in interior])
        shift_ok += [p.degree for p in shifted] == [p.degree for p in plain]

    window = TemporalWindow(Trapezoid(-8, -5, 0, 0))
    axis = TimeAxis(0, 20)
    constant_ok = True
    for method in DETERMINISTIC:
        fq = fuzzify(q_prop_binary(MOST), method)
        ones = sliding_evaluate(fq, window, [FuzzySignal(axis, np.ones(20))], range(8, 20))
        zeros = sliding_evaluate(fq, window, [FuzzySignal(axis, np.zeros(20))], range(8, 20))
        constant_ok &= all(p.degree == 1.0 for p in ones) and all(p.degree == 0.0 for p in zeros)

    exclusion_worst = 0.0
    for k in range(30):
        n = int(rng.integers(4, 13))
        sig = FuzzySignal(TimeAxis(0, n), np.where(rng.random(n) < 0.2, 1.0, rng.random(n)))
        w = TemporalWindow(Trapezoid(-3, -2, 0, 1))
        fq = fuzzify(q_prop_binary(MOST), DETERMINISTIC[k % len(DETERMINISTIC)])
        for a, b in zip(sliding_evaluate(fq, w, [sig]), sliding_evaluate(fq, w, [sig], clip_zero=False)):
            exclusion_worst = max(exclusion_worst, abs(a.degree - b.degree))
    report(
        7,
        "temporal properties",
        shift_ok == 50 and constant_ok and exclusion_worst <= 1e-12,
        f"shift equivariance {shift_ok}/50 exact, constant signals {'ok' if constant_ok else 'wrong'}, "
        f"zero-membership exclusion max diff {exclusion_worst:.1e}",
    )


def test_criterion_08_monotonicity(report):
    rng = np.random.default_rng(8)
    quants = monotone_quantifiers()
    worst = 0.0
    violations = 0
    for k in range(500):
        q = quants[k % len(quants)]
        size = int(rng.integers(1, 7))
        sets = same_base(rng, size, q.arity)
        last = list(sets[-1].mu)
        e = int(rng.integers(size))
        last[e] += (1.0 - last[e]) * float(rng.random())
        raised = sets[:-1] + [FuzzySet(sets[-1].base, tuple(last))]
        for method in DETERMINISTIC:
            drop = apply(q, method, *sets) - apply(q, method, *raised)
            worst = max(worst, drop)
            violations += drop > 1e-12
    report(
        8,
        "monotonicity under membership raises",
        violations == 0,
        f"500 raises x 4 methods, {violations} decreases beyond rounding, largest decrease {worst:.1e}",
    )


def test_criterion_09_fuzzy_number_values(report):
    table = [
        (Trapezoid(2, 4, 6, 8), 5, 1.0),
        (Trapezoid(2, 4, 6, 8), 3, 0.5),
        (Trapezoid(2, 4, 6, 8), 7, 0.5),
        (Trapezoid(2, 4, 6, 8), 9, 0.0),
        (SShape(0.5, 0.8), 0.65, 0.5),
        (SShape(0.5, 0.8), 0.725, 0.875),
        (LeftSShape(1, 4), 2.5, 0.5),
        (LeftSShape(1, 4), 4.0, 0.0),
        (LeftSShape(1, 4), 0.0, 1.0),
    ]
    worst = max(abs(eval_fuzzy_number(fn, x) - want) for fn, x, want in table)
    report(9, "fuzzy-number values", worst <= 1e-12, f"{len(table)} table entries, max error {worst:.1e}")


def _random_expression(r: random.Random) -> Expression:
    def ident():
        name = r.choice("abcdefghxyz_") + "".join(r.choice("abcxyz_019") for _ in range(r.randint(0, 6)))
        if name in ("is", "shift"):
            name += "_"
        return name + (f".{ident()}" if r.random() < 0.15 else "")

    terms = tuple(
        Term(ident(), ident() if r.random() < 0.6 else None, r.randint(-30, 30) if r.random() < 0.4 else None)
        for _ in range(r.randint(1, 4))
    )
    return Expression(ident(), ident(), terms)


def test_criterion_10_cli_determinism_and_round_trip(report, tmp_path):
    golden_ok = 0
    for name, argv in sorted(GOLDEN_CASES.items()):
        _, first = run(argv, tmp_path, name + ".1")
        _, second = run(argv, tmp_path, name + ".2")
        golden_ok += first == second == (GOLDEN / name).read_text()
    r = random.Random(10)
    round_trips = 0
    for _ in range(1000):
        expr = _random_expression(r)
        text = print_expression(expr)
        round_trips += parse_expression(text) == expr and print_expression(parse_expression(text)) == text
    report(
        10,
        "CLI determinism and DSL round trip",
        golden_ok == len(GOLDEN_CASES) and round_trips == 1000,
        f"golden runs {golden_ok}/{len(GOLDEN_CASES)} identical, AST round trips {round_trips}/1000",
    )


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
