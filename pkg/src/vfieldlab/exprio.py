"""Polynomial text grammar, canonical formatting and JSON report documents.

Grammar (whitespace is ignored)::

    expr    := term (("+" | "-") term)*
    term    := unary ("*" unary)*
    unary   := ("+" | "-") unary | power
    power   := primary ("^" INT)?
    primary := INT ("/" INT)? | VAR | "(" expr ")"

``p/q`` is only a rational literal; there is no general division.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from . import __version__
from .polyalg import VAR_NAMES, Poly, VectorField2


class ParseError(ValueError):
    """Base class for grammar errors; ``pos`` is a 0-based character offset."""

    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        self.component: Optional[str] = None
        super().__init__(message)

    def __str__(self) -> str:
        msg = f"{self.args[0]} at position {self.pos}"
        if self.component:
            msg = f"component {self.component}: {msg}"
        return msg


class ExprSyntaxError(ParseError):
    pass


class UnknownVariable(ParseError):
    def __init__(self, name: str, pos: int, text: str = ""):
        self.name = name
        super().__init__(f"unknown variable {name!r}", pos, text)


class NegativeExponent(ParseError):
    pass


_Token = Tuple[str, Any, int]  # kind, value, position


def _tokenize(text: str) -> List[_Token]:
    tokens: List[_Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("int", int(text[i:j]), i))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
        elif ch in "+-*^()/":
            tokens.append((ch, ch, i))
            i += 1
        else:
            raise ExprSyntaxError(f"unexpected character {ch!r}", i, text)
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    def __init__(self, text: str, nvars: int):
        self.text = text
        self.nvars = nvars
        self.names = VAR_NAMES[nvars]
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def take(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.take()
        if tok[0] != kind:
            raise ExprSyntaxError(f"expected {kind!r}, found {self._describe(tok)}", tok[2], self.text)
        return tok

    @staticmethod
    def _describe(tok: _Token) -> str:
        return "end of input" if tok[0] == "end" else repr(str(tok[1]))

    def parse(self) -> Poly:
        if self.peek()[0] == "end":
            raise ExprSyntaxError("empty expression", 0, self.text)
        p = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ExprSyntaxError(f"unexpected {self._describe(tok)}", tok[2], self.text)
        return p

    def expr(self) -> Poly:
        p = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> Poly:
        p = self.unary()
        while self.peek()[0] == "*":
            self.take()
            p = p * self.unary()
        return p

    def unary(self) -> Poly:
        kind = self.peek()[0]
        if kind == "-":
            self.take()
            return -self.unary()
        if kind == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Poly:
        base = self.primary()
        if self.peek()[0] == "^":
            self.take()
            tok = self.peek()
            if tok[0] == "-":
                raise NegativeExponent("negative exponent", tok[2], self.text)
            exp = self.expect("int")[1]
            base = base ** exp
        return base

    def primary(self) -> Poly:
        tok = self.take()
        kind = tok[0]
        if kind == "int":
            value = Fraction(tok[1])
            if self.peek()[0] == "/":
                self.take()
                den = self.expect("int")
                if den[1] == 0:
                    raise ExprSyntaxError("zero denominator", den[2], self.text)
                value = Fraction(tok[1], den[1])
            return Poly.const(value, self.nvars)
        if kind == "name":
            if tok[1] not in self.names:
                raise UnknownVariable(tok[1], tok[2], self.text)
            return Poly.var(tok[1], self.nvars)
        if kind == "(":
            p = self.expr()
            self.expect(")")
            return p
        raise ExprSyntaxError(f"unexpected {self._describe(tok)}", tok[2], self.text)


def parse_poly(text: str, nvars: int = 2) -> Poly:
    """Parse polynomial text over ``x, y`` (or ``x, y, z, w`` with ``nvars=4``)."""
    return _Parser(text, nvars).parse()


def parse_field(src_P: str, src_Q: str) -> VectorField2:
    comps = []
    for tag, src in (("P", src_P), ("Q", src_Q)):
        try:
            comps.append(parse_poly(src, 2))
        except ParseError as err:
            err.component = tag
            raise
    return VectorField2(*comps)


def _format_monomial(exp, names) -> str:
    parts = []
    for v, k in zip(names, exp):
        if k == 1:
            parts.append(v)
        elif k > 1:
            parts.append(f"{v}^{k}")
    return "*".join(parts)


def format_poly(p: Poly) -> str:
    """Canonical text: leading terms first, explicit ``*``, literals as ``p/q``."""
    if p.is_zero():
        return "0"
    names = VAR_NAMES[p.nvars]
    out = []
    for k, (exp, c) in enumerate(p.sorted_terms()):
        mono = _format_monomial(exp, names)
        mag = abs(c)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if k == 0:
            out.append(f"-{body}" if c < 0 else body)
        else:
            out.append(f" - {body}" if c < 0 else f" + {body}")
    return "".join(out)


def format_field(X: VectorField2) -> Tuple[str, str]:
    return (format_poly(X.P), format_poly(X.Q))


# -- JSON ---------------------------------------------------------------------

def rat_text(c: Fraction) -> str:
    return str(Fraction(c))


def float_text(v: float) -> str:
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(float(v), ".17g")


def field_json(X: VectorField2) -> Dict[str, str]:
    P, Q = format_field(X)
    return {"P": P, "Q": Q}


def report(command: str, inputs: Dict[str, Any], result: Dict[str, Any]) -> Dict[str, Any]:
    return {"command": command, "inputs": inputs, "result": result, "version": __version__}


# Scalars inside reports are text (rationals "p/q", floats with 17 digits),
# booleans, integers or null; containers nest freely.
_VALUE = {
    "anyOf": [
        {"type": "string"},
        {"type": "integer"},
        {"type": "boolean"},
        {"type": "null"},
        {"type": "array", "items": {"$ref": "#/definitions/value"}},
        {"type": "object", "additionalProperties": {"$ref": "#/definitions/value"}},
    ]
}

REPORT_SCHEMA: Dict[str, Any] = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "vfieldlab report",
    "type": "object",
    "required": ["command", "inputs", "result", "version"],
    "additionalProperties": False,
    "definitions": {"value": _VALUE},
    "properties": {
        "command": {"type": "string"},
        "inputs": {"type": "object", "additionalProperties": {"$ref": "#/definitions/value"}},
        "result": {"type": "object", "additionalProperties": {"$ref": "#/definitions/value"}},
        "version": {"type": "string"},
    },
}
