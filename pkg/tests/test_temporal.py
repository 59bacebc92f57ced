import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuzzyquant.fuzzy import LeftSShape, SShape, Trapezoid
from fuzzyquant.qfm import Method, fuzzify
from fuzzyquant.quantifiers import evaluate, q_prop_binary
from fuzzyquant.fuzzy import BaseSet, CrispSet
from fuzzyquant.temporal import (
    FuzzySignal,
    NumericDomainError,
    RawSeries,
    SlidePoint,
    TemporalWindow,
    TimeAxis,
    displace_signal,
    displace_window,
    fuzzify_series,
    pct_change,
    signal_from_degrees,
    sliding_evaluate,
    threshold_observable,
)

from support import MOST

LAST_FIVE = TemporalWindow(Trapezoid(-8, -5, 0, 0))
METHODS = [Method.md(), Method.i(), Method.a("exact"), Method.a("dp")]


def raw(values, start=0):
    return RawSeries(TimeAxis(start, len(values)), np.array(values, dtype=float))


def test_pct_change_examples():
    out = pct_change(raw([100, 104]))
    assert out.missing.tolist() == [True, False]
    assert out.values[1] == pytest.approx(4.0)
    assert pct_change(raw([100, 50])).values[1] == -50.0
    const = pct_change(raw([7, 7, 7, 7]))
    assert const.values[1:].tolist() == [0.0, 0.0, 0.0]


def test_pct_change_zero_denominator_names_instant():
    with pytest.raises(NumericDomainError, match="1996"):
        pct_change(raw([5, 0, 3], start=1995))


def test_pct_change_skips_gaps():
    out = pct_change(raw([1.0, np.nan, 2.0, 4.0]))
    assert out.missing.tolist() == [True, True, True, False]
    assert out.values[3] == 100.0


def test_fuzzify_series_examples():
    fn = LeftSShape(1, 4)
    sig = fuzzify_series(raw([4.0, 0.0, 2.5, np.nan]), fn)
    assert sig.mu.tolist()[:3] == pytest.approx([0.0, 1.0, 0.5])
    assert sig.mu[3] == 0.0 and sig.missing.tolist() == [False, False, False, True]


def test_displace_window_examples():
    X = displace_window(LAST_FIVE, 1995)
    mu = dict(zip(X.base.elements, X.mu))
    assert mu[1990] == 1.0
    assert 1996 not in mu
    assert mu[1988] == pytest.approx(1 / 3, abs=1e-12)
    assert 1987 not in mu  # zero membership at the left edge
    assert LAST_FIVE.membership(1996 - 1995) == 0.0


def test_displace_window_clips_to_axis_and_may_be_empty():
    axis = TimeAxis(1990, 10)
    X = displace_window(LAST_FIVE, 1992, axis)
    assert X.base.elements == (1990, 1991, 1992)
    assert len(displace_window(LAST_FIVE, 1950, axis)) == 0


@given(st.integers(-50, 50), st.integers(-10, 10), st.integers(0, 6))
def test_displace_window_is_a_translation(t0, a, width):
    w = TemporalWindow(Trapezoid(a, a + width / 2, a + width / 2, a + width))
    X = displace_window(w, t0)
    Y = displace_window(w, 0)
    assert X.mu == Y.mu
    assert [t - t0 for t in X.base.elements] == list(Y.base.elements)


def test_window_bounds_for_non_trapezoids():
    with pytest.raises(ValueError):
        TemporalWindow(SShape(-3, 0))
    w = TemporalWindow(LeftSShape(-3, 0), lo=-6, hi=0)
    assert [off for off, _ in w.offsets()] == list(range(-6, 0))


def test_displace_signal_examples():
    sig = signal_from_degrees(TimeAxis(0, 2), [0.2, 0.9])
    same = displace_signal(sig, 0)
    assert same.mu.tolist() == [0.2, 0.9] and not same.missing.any()
    moved = displace_signal(sig, 1)
    assert moved.at(1) == 0.2 and moved.is_missing(0) and moved.at(0) == 0.0
    far = displace_signal(sig, 5)
    assert far.missing.all()


@given(st.lists(st.floats(0, 1), min_size=8, max_size=20), st.integers(-3, 3))
def test_displace_there_and_back(mu, d):
    sig = signal_from_degrees(TimeAxis(0, len(mu)), mu)
    back = displace_signal(displace_signal(sig, d), -d)
    inner = slice(abs(d), len(mu) - abs(d))
    assert back.mu[inner].tolist() == sig.mu[inner].tolist()
    assert not back.missing[inner].any()


# -- sliding evaluation ------------------------------------------------------


@pytest.mark.parametrize("method", METHODS, ids=str)
def test_constant_signals(method):
    axis = TimeAxis(0, 20)
    most = fuzzify(q_prop_binary(MOST), method)
    ones = FuzzySignal(axis, np.ones(20))
    zeros = FuzzySignal(axis, np.zeros(20))
    interior = range(8, 20)
    for p in sliding_evaluate(most, LAST_FIVE, [ones], interior):
        assert p.degree == 1.0 and not p.degraded
    for p in sliding_evaluate(most, LAST_FIVE, [zeros], interior):
        assert p.degree == 0.0


def test_crisp_window_four_of_five():
    axis = TimeAxis(0, 5)
    w = TemporalWindow(Trapezoid(-4, -4, 0, 0))
    sig = FuzzySignal(axis, np.array([1, 1, 0, 1, 1], dtype=float))
    for method in METHODS:
        (p,) = sliding_evaluate(fuzzify(q_prop_binary(MOST), method), w, [sig], [4])
        assert p.degree == pytest.approx(0.5, abs=1e-12)


def test_crisp_sliding_equals_semi_fuzzy_evaluation():
    rng = np.random.default_rng(0)
    axis = TimeAxis(0, 15)
    w = TemporalWindow(Trapezoid(-3, -3, 1, 1))
    q = q_prop_binary(MOST)
    sig = FuzzySignal(axis, (rng.random(15) < 0.6).astype(float))
    for p in sliding_evaluate(fuzzify(q, Method.a("exact")), w, [sig]):
        ts = [t for t in range(p.t - 3, p.t + 2) if t in axis]
        base = BaseSet(tuple(ts))
        window = CrispSet(base, (1 << len(ts)) - 1)
        scope = CrispSet.from_elements(base, [t for t in ts if sig.at(t) == 1.0])
        assert p.degree == evaluate(q, window, scope)


def test_empty_window_convention():
    axis = TimeAxis(0, 5)
    w = TemporalWindow(Trapezoid(-20, -20, -10, -10))
    sig = FuzzySignal(axis, np.full(5, 0.3))
    (p,) = sliding_evaluate(fuzzify(q_prop_binary(MOST), Method.md()), w, [sig], [2])
    assert p == SlidePoint(2, 1.0, True)


def test_boundary_and_missing_are_flagged():
    axis = TimeAxis(0, 12)
    mu = np.full(12, 0.5)
    missing = np.zeros(12, dtype=bool)
    missing[0] = True
    sig = FuzzySignal(axis, mu, missing)
    most = fuzzify(q_prop_binary(MOST), Method.a("dp"))
    points = sliding_evaluate(most, LAST_FIVE, [sig])
    flags = [p.degraded for p in points]
    # window reaches back 7 instants with positive membership
    assert flags == [True] * 8 + [False] * 4


def test_arity_mismatch():
    axis = TimeAxis(0, 5)
    sig = FuzzySignal(axis, np.zeros(5))
    with pytest.raises(ValueError):
        sliding_evaluate(fuzzify(q_prop_binary(MOST), Method.md()), LAST_FIVE, [sig, sig])


@st.composite
def slide_case(draw):
    n = draw(st.integers(12, 24))
    mu = draw(st.lists(st.sampled_from([0.0, 0.25, 0.5, 1.0]) | st.floats(0, 1), min_size=n, max_size=n))
    a = draw(st.integers(-4, 0))
    width = draw(st.integers(0, 3))
    return np.array(mu), Trapezoid(a, a + width / 2, a + width / 2 + 0.5, a + width + 0.5)


@settings(max_examples=50, deadline=None)
@given(slide_case(), st.integers(-3, 3), st.sampled_from(METHODS))
def test_shift_equivariance(case, d, method):
    mu, shape = case
    axis = TimeAxis(0, len(mu))
    w = TemporalWindow(shape)
    sig = FuzzySignal(axis, mu)
    most = fuzzify(q_prop_binary(MOST), method)
    margin = 5 + abs(d)
    interior = [t for t in axis.instants if margin <= t and t + d < len(mu) - margin]
    shifted = sliding_evaluate(most, w, [(sig, d)], interior)
    plain = sliding_evaluate(most, w, [sig], [t - d for t in interior])
    assert [p.degree for p in shifted] == [p.degree for p in plain]


@settings(max_examples=30, deadline=None)
@given(slide_case(), st.sampled_from(METHODS))
def test_zero_membership_exclusion_is_exact(case, method):
    mu, shape = case
    mu = mu[:12]
    axis = TimeAxis(0, len(mu))
    sig = FuzzySignal(axis, mu)
    most = fuzzify(q_prop_binary(MOST), method)
    w = TemporalWindow(shape)
    clipped = sliding_evaluate(most, w, [sig])
    full = sliding_evaluate(most, w, [sig], clip_zero=False)
    for a, b in zip(clipped, full):
        if a.degraded and not any(0 <= a.t + off < len(mu) for off, _ in w.offsets()):
            continue  # empty window: the unclipped base set is not empty
        assert a.degree == pytest.approx(b.degree, abs=1e-12)


def test_axis_enlargement_keeps_full_windows():
    rng = np.random.default_rng(1)
    mu = rng.random(30)
    most = fuzzify(q_prop_binary(MOST), Method.a("dp"))
    small = sliding_evaluate(most, LAST_FIVE, [FuzzySignal(TimeAxis(0, 20), mu[:20])])
    large = sliding_evaluate(most, LAST_FIVE, [FuzzySignal(TimeAxis(0, 30), mu)], range(20))
    for a, b in zip(small, large):
        if not a.degraded:
            assert a.degree == b.degree


def test_workers_do_not_change_results():
    rng = np.random.default_rng(2)
    sig = FuzzySignal(TimeAxis(0, 40), rng.random(40))
    for method in (Method.a("dp"), Method.a("mc", samples=2000, seed=3)):
        most = fuzzify(q_prop_binary(MOST), method)
        assert sliding_evaluate(most, LAST_FIVE, [sig], workers=4) == sliding_evaluate(most, LAST_FIVE, [sig])


def test_threshold_examples():
    obs = threshold_observable([(0, 0.81), (1, 0.8), (2, 0.0)], 0.8)
    assert obs.flags == (True, False, False)
    assert obs.axis_instants == (0, 1, 2)
    assert not any(threshold_observable([(t, 0.0) for t in range(5)], 0.0).flags)
    with pytest.raises(ValueError):
        threshold_observable([], 1.5)
