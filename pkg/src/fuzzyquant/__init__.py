"""Fuzzy quantification over finite data and time series."""

from .fuzzy import (
    BaseSet,
    CrispSet,
    FuzzyNumber,
    FuzzySet,
    LeftSShape,
    LinguisticVariable,
    ProportionalPartition,
    SShape,
    Trapezoid,
    alpha_cut,
    eval_fuzzy_number,
    fuzzify_values,
    level_breakpoints,
    ruspini_check,
)
from .qfm import (
    FuzzifiedQuantifier,
    Method,
    apply_a_dp,
    apply_a_exact,
    apply_a_mc,
    apply_i,
    apply_md,
    fuzzify,
    representative_prob,
)
from .quantifiers import (
    SemiFuzzyQuantifier,
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

__version__ = "0.1.0"
