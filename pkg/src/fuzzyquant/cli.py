"""Batch command line: ``fuzzyquant {eval,slide,summarize,rate-search}``.

Exit codes: 0 success, 2 usage/configuration error, 3 data error,
4 computation cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from typing import Any, Sequence

from .config import Config, ConfigError, bind
from .dsl import DSLSyntaxError, parse_term
from .fuzzy import BaseSet, FuzzySet
from .ingest import DataError, Dataset, load_csv
from .qfm import CapExceeded, UnsupportedOperation
from .quantifiers import QuantifierError
from .summarize import (
    DEFAULT_MARGIN,
    DEFAULT_STEP,
    DEFAULT_TAU,
    DEFAULT_TAU_MERGE,
    NoneAdequate,
    best_single,
    build_matrix,
    greedy_extract,
    rate_search,
)
from .temporal import NumericDomainError, displace_signal, sliding_evaluate, threshold_observable

log = logging.getLogger("fuzzyquant")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_CAP = 0, 2, 3, 4


def fmt(x: float) -> float:
    """Round to 12 significant digits for output."""
    return float(f"{x:.12g}")


def _num(x: float) -> str:
    return f"{x:.12g}"


def _dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _dump_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _load(args) -> tuple[Config, Dataset]:
    cfg = Config.load(args.config) if args.config else Config()
    time_column = args.time_column or cfg.defaults.get("time_column")
    try:
        data = load_csv(args.data, time_column)
    except OSError as exc:
        raise DataError(f"cannot read {args.data}: {exc}") from exc
    return cfg, data


def _instants(args, data: Dataset) -> list[int]:
    start = data.instant_of(args.start) if args.start is not None else data.axis.start
    end = data.instant_of(args.end) if args.end is not None else data.axis.end
    return [t for t in range(start, end + 1) if t in data.axis]


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------


def cmd_eval(args) -> str:
    cfg, data = _load(args)
    method = cfg.method(args.method)
    pattern = bind(cfg.expression(args.expr), cfg, data, method)
    if args.at is not None:
        t = data.instant_of(args.at)
        if t not in data.axis:
            raise DataError(f"instant {args.at!r} is outside the data")
        point = sliding_evaluate(pattern.quantifier, pattern.window, pattern.signals, [t])[0]
        degree, at, degraded = point.degree, data.label_of(t), point.degraded
    else:
        # whole-set mode: the temporal reference is the entire axis
        instants = tuple(data.axis.instants)
        base = BaseSet(instants)
        args_sets = [FuzzySet(base, (1.0,) * len(instants))]
        degraded = False
        for sig, d in pattern.signals:
            moved = displace_signal(sig, d) if d else sig
            degraded = degraded or bool(moved.missing.any())
            args_sets.append(FuzzySet(base, tuple(float(m) for m in moved.mu)))
        degree, at = pattern.quantifier(*args_sets), None
    if args.format == "csv":
        return _dump_csv(
            ["degree", "at", "boundary", "method"],
            [[_num(degree), at or "", str(degraded).lower(), json.dumps(method.descriptor())]],
        )
    return _dump_json(
        {
            "expression": str(pattern.expression),
            "degree": fmt(degree),
            "at": at,
            "boundary": degraded,
            "method": method.descriptor(),
        }
    )


def cmd_slide(args) -> str:
    cfg, data = _load(args)
    method = cfg.method(args.method)
    pattern = bind(cfg.expression(args.expr), cfg, data, method)
    if args.theta is not None and not 0.0 <= args.theta <= 1.0:
        raise ValueError("--theta must lie in [0, 1]")
    points = sliding_evaluate(
        pattern.quantifier, pattern.window, pattern.signals, _instants(args, data), workers=args.workers
    )
    flags = threshold_observable(points, args.theta).flags if args.theta is not None else None
    if args.format == "csv":
        header = ["t", "degree", "boundary"] + (["flag"] if flags is not None else [])
        rows = []
        for k, p in enumerate(points):
            row = [data.label_of(p.t), _num(p.degree), str(p.degraded).lower()]
            if flags is not None:
                row.append(str(flags[k]).lower())
            rows.append(row)
        return _dump_csv(header, rows)
    out = []
    for k, p in enumerate(points):
        item = {"t": data.label_of(p.t), "degree": fmt(p.degree), "boundary": p.degraded}
        if flags is not None:
            item["flag"] = flags[k]
        out.append(item)
    doc = {"expression": str(pattern.expression), "method": method.descriptor(), "points": out}
    if args.theta is not None:
        doc["theta"] = args.theta
    return _dump_json(doc)


def _statement_json(s) -> dict:
    d = s.to_json()
    d["degree"] = fmt(d["degree"])
    return d


def cmd_summarize(args) -> str:
    cfg, data = _load(args)
    method = cfg.method(args.method)
    raw = cfg.raw_series(args.column, data)
    values = raw.values[~raw.missing]
    if values.size == 0:
        raise DataError(f"column {args.column!r} has no values")
    lv = cfg.variable(args.variable)
    pp = cfg.partition(args.partition)
    m = build_matrix(values.tolist(), lv, pp, method, workers=args.workers, data_id=args.column)
    matrix = {"rows": list(m.rows), "cols": list(m.cols), "cells": [[fmt(x) for x in r] for r in m.cells]}
    if args.best_only:
        result = best_single(m, args.tau, args.margin)
        statements = list(result.top) if isinstance(result, NoneAdequate) else [result]
        body = {"best": _statement_json(result) if not isinstance(result, NoneAdequate) else None}
        if isinstance(result, NoneAdequate):
            body["none_adequate"] = {"top": [_statement_json(s) for s in result.top]}
    else:
        statements = greedy_extract(
            m, args.tau, suppress_bottom=not args.no_suppress_bottom, merge=args.merge, tau_merge=args.tau_merge
        )
        body = {"summary": [_statement_json(s) for s in statements]}
    if args.format == "csv":
        mat = _dump_csv(["label", *m.cols], [[r, *(_num(x) for x in row)] for r, row in zip(m.rows, m.cells)])
        kind = "candidate" if args.best_only and isinstance(result, NoneAdequate) else "statement"
        stm = _dump_csv(
            ["kind", "quantifier", "label", "degree", "merged"],
            [[kind, s.quantifier, s.label, _num(s.degree), str(s.merged).lower()] for s in statements],
        )
        return mat + "\n" + stm
    return _dump_json({"method": method.descriptor(), "matrix": matrix, **body})


def cmd_rate_search(args) -> str:
    cfg, data = _load(args)
    method = cfg.method(args.method)
    if not 0.0 < args.delta_max <= 1.0:
        raise ValueError("--delta-max must lie in (0, 1]")
    if not 0.0 < args.step <= args.delta_max:
        raise ValueError("--step must lie in (0, delta-max]")
    base = BaseSet(tuple(data.axis.instants))
    sets = []
    for text in (args.x1, args.x2):
        term = parse_term(text)
        sig = cfg.signal(term, data)
        if term.shift:
            sig = displace_signal(sig, term.shift)
        sets.append(FuzzySet(base, tuple(float(m) for m in sig.mu)))
    res = rate_search(sets[0], sets[1], args.delta_max, args.step, method)
    if args.format == "csv":
        return _dump_csv(
            ["r1", "r2", "degree", "step", "all_zero"],
            [[_num(res.r1), _num(res.r2), _num(res.degree), _num(res.step), str(res.all_zero).lower()]],
        )
    doc = res.to_json()
    doc["degree"] = fmt(doc["degree"])
    doc["method"] = method.descriptor()
    return _dump_json(doc)


# --------------------------------------------------------------------------
# Entry point
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fuzzyquant", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="JSON configuration file")
    shared.add_argument("--data", required=True, help="CSV file with a header row")
    shared.add_argument("--time-column", help="time column (default: first column)")
    shared.add_argument("--method", help="md, i, a/exact, a/dp, a/mc:SAMPLES:SEED, a JSON descriptor or a config name")
    shared.add_argument("--out", default="-", help="output path, '-' for stdout")
    shared.add_argument("--format", choices=("json", "csv"), default="json")
    shared.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("eval", parents=[shared], help="evaluate one quantified statement")
    p.add_argument("--expr", required=True, help="expression text or the name of a configured expression")
    p.add_argument("--at", help="evaluate the window at this instant (default: whole data set)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("slide", parents=[shared], help="slide a quantified pattern along the time axis")
    p.add_argument("--expr", required=True)
    p.add_argument("--theta", type=float, help="flag instants whose degree exceeds this threshold")
    p.add_argument("--start", help="first instant (time label or integer)")
    p.add_argument("--end", help="last instant, inclusive")
    p.set_defaults(func=cmd_slide)

    p = sub.add_parser("summarize", parents=[shared], help="summarise a column with quantified sentences")
    p.add_argument("--column", required=True)
    p.add_argument("--variable", required=True, help="linguistic variable name")
    p.add_argument("--partition", required=True, help="proportional partition name")
    p.add_argument("--tau", type=float, default=DEFAULT_TAU)
    p.add_argument("--margin", type=float, default=DEFAULT_MARGIN)
    p.add_argument("--merge", action="store_true", help="merge runs of neighbouring quantifiers")
    p.add_argument("--tau-merge", type=float, default=DEFAULT_TAU_MERGE)
    p.add_argument("--no-suppress-bottom", action="store_true")
    p.add_argument("--best-only", action="store_true")
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("rate-search", parents=[shared], help="best 'between r1 and r2' quantifier")
    p.add_argument("--x1", required=True, help="restriction binding, e.g. 'temp is hot'")
    p.add_argument("--x2", required=True, help="scope binding, e.g. 'humidity is high'")
    p.add_argument("--delta-max", type=float, required=True)
    p.add_argument("--step", type=float, default=DEFAULT_STEP)
    p.set_defaults(func=cmd_rate_search)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        text = args.func(args)
    except CapExceeded as exc:
        log.error("%s", exc)
        return EXIT_CAP
    except UnsupportedOperation as exc:
        log.error("%s", exc)
        return EXIT_CAP
    except (DataError, NumericDomainError) as exc:
        log.error("%s", exc)
        return EXIT_DATA
    except (DSLSyntaxError, ConfigError, QuantifierError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
