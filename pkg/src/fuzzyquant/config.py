"""JSON configuration and name binding for DSL expressions.

A configuration is a single JSON document::

    {
      "fuzzy_numbers": {"slight_increase": {"kind": "s_left", "alpha": 1, "gamma": 4}},
      "variables":     {"temperature": {"domain": [0, 40], "labels": [{"name": "low", "fn": {...}}]}},
      "partitions":    {"quant5": [{"name": "nearly none", "fn": {...}}, ...]},
      "quantifiers":   {"most": {"kind": "prop_binary", "fn": {"kind": "s", "alpha": 0.7, "gamma": 0.9}}},
      "windows":       {"last_five_years": {"kind": "trapezoid", "a": -8, "b": -5, "c": 0, "d": 0}},
      "methods":       {"default": {"qfm": "a", "strategy": "dp"}},
      "series":        {"oil_change": {"source": "oil", "transform": "pct_change"}},
      "expressions":   {"oil_pattern": "most(last_five_years, oil_change is slight_increase)"}
    }

Labels in expressions name an entry of ``fuzzy_numbers`` or a
``variable.label`` pair.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .dsl import Expression, Term, parse_expression
from .fuzzy import (
    FuzzyError,
    FuzzyNumber,
    LinguisticVariable,
    ProportionalPartition,
    fuzzy_number_from_json,
    partition_from_json,
)
from .ingest import DataError, Dataset
from .qfm import FuzzifiedQuantifier, Method, fuzzify
from .quantifiers import QuantifierError, SemiFuzzyQuantifier, quantifier_from_json
from .temporal import FuzzySignal, RawSeries, TemporalWindow, fuzzify_series, pct_change, signal_from_degrees

SECTIONS = (
    "fuzzy_numbers",
    "variables",
    "partitions",
    "quantifiers",
    "windows",
    "methods",
    "series",
    "expressions",
    "defaults",
)


class ConfigError(ValueError):
    """Invalid configuration or an unresolved name."""


def _no_duplicates(pairs):
    seen = {}
    for k, v in pairs:
        if k in seen:
            raise ConfigError(f"duplicate name {k!r}")
        seen[k] = v
    return seen


@dataclass
class Config:
    fuzzy_numbers: dict[str, FuzzyNumber] = field(default_factory=dict)
    variables: dict[str, LinguisticVariable] = field(default_factory=dict)
    partitions: dict[str, ProportionalPartition] = field(default_factory=dict)
    quantifiers: dict[str, SemiFuzzyQuantifier] = field(default_factory=dict)
    windows: dict[str, TemporalWindow] = field(default_factory=dict)
    methods: dict[str, Method] = field(default_factory=dict)
    series: dict[str, dict[str, Any]] = field(default_factory=dict)
    expressions: dict[str, str] = field(default_factory=dict)
    defaults: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def load(cls, path: str | Path) -> "Config":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_json_text(text)

    @classmethod
    def from_json_text(cls, text: str) -> "Config":
        try:
            doc = json.loads(text, object_pairs_hook=_no_duplicates)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(doc)

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "Config":
        unknown = set(doc) - set(SECTIONS)
        if unknown:
            raise ConfigError(f"unknown config sections: {sorted(unknown)}")
        cfg = cls()
        try:
            for name, obj in doc.get("fuzzy_numbers", {}).items():
                cfg.fuzzy_numbers[name] = fuzzy_number_from_json(obj)
            for name, obj in doc.get("variables", {}).items():
                lo, hi = obj["domain"]
                labels = tuple((item["name"], cfg._fn(item["fn"])) for item in obj["labels"])
                cfg.variables[name] = LinguisticVariable(name, labels, float(lo), float(hi))
            for name, items in doc.get("partitions", {}).items():
                items = [{"name": it["name"], "fn": cfg._fn(it["fn"]).to_json()} for it in items]
                cfg.partitions[name] = partition_from_json(name, items)
            for name, obj in doc.get("quantifiers", {}).items():
                cfg.quantifiers[name] = quantifier_from_json(obj, cfg.fuzzy_numbers)
            for name, obj in doc.get("windows", {}).items():
                if "fn" in obj:
                    cfg.windows[name] = TemporalWindow(cfg._fn(obj["fn"]), obj.get("lo"), obj.get("hi"))
                else:
                    cfg.windows[name] = TemporalWindow(fuzzy_number_from_json(obj))
            for name, obj in doc.get("methods", {}).items():
                cfg.methods[name] = Method.from_descriptor(obj)
            for name, obj in doc.get("series", {}).items():
                if "source" not in obj:
                    raise ConfigError(f"series {name!r} needs a 'source' column")
                if obj.get("transform", "none") not in ("none", "pct_change"):
                    raise ConfigError(f"series {name!r}: unknown transform {obj['transform']!r}")
                cfg.series[name] = dict(obj)
            cfg.expressions = dict(doc.get("expressions", {}))
            cfg.defaults = dict(doc.get("defaults", {}))
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed config entry: {exc!r}") from exc
        except (FuzzyError, QuantifierError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc
        return cfg

    def _fn(self, ref) -> FuzzyNumber:
        if isinstance(ref, str):
            if ref not in self.fuzzy_numbers:
                raise ConfigError(f"unknown fuzzy number {ref!r}")
            return self.fuzzy_numbers[ref]
        return fuzzy_number_from_json(ref)

    # -- lookups ----------------------------------------------------------

    def _get(self, section: str, name: str):
        table = getattr(self, section)
        if name not in table:
            raise ConfigError(f"unbound {section[:-1].replace('_', ' ')} {name!r}")
        return table[name]

    def quantifier(self, name: str) -> SemiFuzzyQuantifier:
        return self._get("quantifiers", name)

    def window(self, name: str) -> TemporalWindow:
        return self._get("windows", name)

    def variable(self, name: str) -> LinguisticVariable:
        return self._get("variables", name)

    def partition(self, name: str) -> ProportionalPartition:
        return self._get("partitions", name)

    def label(self, name: str) -> FuzzyNumber:
        if name in self.fuzzy_numbers:
            return self.fuzzy_numbers[name]
        var, _, lab = name.partition(".")
        if lab and var in self.variables:
            try:
                return self.variables[var].label(lab)
            except KeyError:
                pass
        raise ConfigError(f"unbound label {name!r}")

    def method(self, text: str | None) -> Method:
        if text is None:
            text = self.defaults.get("method", "a/dp")
            if isinstance(text, dict):
                return Method.from_descriptor(text)
        if text in self.methods:
            return self.methods[text]
        try:
            return Method.parse(text)
        except (ValueError, json.JSONDecodeError) as exc:
            raise ConfigError(str(exc)) from exc

    def expression(self, text: str) -> Expression:
        return parse_expression(self.expressions.get(text, text))

    # -- binding ----------------------------------------------------------

    def raw_series(self, name: str, data: Dataset) -> RawSeries:
        if name in self.series:
            spec = self.series[name]
            source = spec["source"]
            if source not in data.series:
                raise DataError(f"series {name!r}: column {source!r} not in data")
            raw = data.series[source]
            if spec.get("transform") == "pct_change":
                raw = pct_change(raw)
            return raw
        if name in data.series:
            return data.series[name]
        raise ConfigError(f"unbound series {name!r}")

    def signal(self, term: Term, data: Dataset) -> FuzzySignal:
        raw = self.raw_series(term.series, data)
        if term.label is not None:
            return fuzzify_series(raw, self.label(term.label))
        present = raw.values[~raw.missing]
        if present.size and (present.min() < 0 or present.max() > 1):
            raise DataError(f"series {term.series!r} has no label and is not a membership series in [0, 1]")
        return signal_from_degrees(raw.axis, raw.values, raw.missing)


@dataclass
class BoundPattern:
    expression: Expression
    quantifier: FuzzifiedQuantifier
    window: TemporalWindow
    signals: list[tuple[FuzzySignal, int]]


def bind(expr: Expression, cfg: Config, data: Dataset, method: Method) -> BoundPattern:
    q = cfg.quantifier(expr.quantifier)
    if q.arity != 1 + len(expr.terms):
        raise ConfigError(
            f"quantifier {expr.quantifier!r} has arity {q.arity} but the expression supplies "
            f"{1 + len(expr.terms)} arguments"
        )
    window = cfg.window(expr.window)
    signals = [(cfg.signal(t, data), t.shift or 0) for t in expr.terms]
    return BoundPattern(expr, fuzzify(q, method), window, signals)
