"""A small function-call language for quantified temporal patterns.

    expr := QUANT '(' WINDOW ( ',' term )+ ')'
    term := SERIES ( 'is' LABEL )? ( 'shift' INT )?

``most(last_five_years, oil_change is slight_increase)`` reads "in most of
the last five years, the oil change was a slight increase". Identifiers are
resolved against a configuration later, by :mod:`fuzzyquant.config`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

KEYWORDS = ("is", "shift")

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<int>[+-]?\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_.]*)
  | (?P<punct>[(),])
    """,
    re.VERBOSE,
)


class DSLSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int, token: str, expected: tuple[str, ...] = ()):
        self.line = line
        self.column = column
        self.token = token
        self.expected = expected
        where = f"line {line}, column {column}"
        exp = f"; expected {' or '.join(expected)}" if expected else ""
        super().__init__(f"{message} at {where} (found {token!r}){exp}")


@dataclass(frozen=True)
class Term:
    series: str
    label: str | None = None
    shift: int | None = None

    def __str__(self):
        out = self.series
        if self.label is not None:
            out += f" is {self.label}"
        if self.shift is not None:
            out += f" shift {self.shift}"
        return out


@dataclass(frozen=True)
class Expression:
    quantifier: str
    window: str
    terms: tuple[Term, ...]

    def __str__(self):
        return f"{self.quantifier}({', '.join([self.window, *map(str, self.terms)])})"


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        column = pos - line_start + 1
        if m is None:
            raise DSLSyntaxError("unexpected character", line, column, text[pos])
        kind = m.lastgroup
        chunk = m.group()
        if kind == "ws":
            for i, ch in enumerate(chunk):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
        else:
            if kind == "punct" or (kind == "ident" and chunk in KEYWORDS):
                kind = chunk
            toks.append(_Tok(kind, chunk, line, column))
        pos = m.end()
    toks.append(_Tok("eof", "", line, len(text) - line_start + 1))
    return toks


_DESCRIBE = {"eof": "end of input", "ident": "identifier", "int": "integer"}


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def expect(self, *kinds: str) -> _Tok:
        tok = self.peek()
        if tok.kind not in kinds:
            names = tuple(_DESCRIBE.get(k, repr(k)) for k in kinds)
            raise DSLSyntaxError("syntax error", tok.line, tok.column, tok.text or "<end>", names)
        self.i += 1
        return tok

    def expression(self) -> Expression:
        quant = self.expect("ident").text
        self.expect("(")
        window = self.expect("ident").text
        terms = []
        self.expect(",")
        terms.append(self.term())
        while self.peek().kind == ",":
            self.i += 1
            terms.append(self.term())
        self.expect(")")
        self.expect("eof")
        return Expression(quant, window, tuple(terms))

    def term(self) -> Term:
        series = self.expect("ident").text
        label = shift = None
        if self.peek().kind == "is":
            self.i += 1
            label = self.expect("ident").text
        if self.peek().kind == "shift":
            self.i += 1
            shift = int(self.expect("int").text)
        return Term(series, label, shift)


def parse_expression(text: str) -> Expression:
    return _Parser(text).expression()


def parse_term(text: str) -> Term:
    """Parse a single ``SERIES [is LABEL] [shift INT]`` binding."""
    p = _Parser(text)
    term = p.term()
    p.expect("eof")
    return term


def print_expression(expr: Expression) -> str:
    return str(expr)
