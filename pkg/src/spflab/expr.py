"""Surface syntax for functor expressions.

Grammar (whitespace insensitive)::

    expr := term ('(*)' term)*
    term := atom | func '(' args ')'
    atom := 'S^' k | 'G^' k | 'T^' k | 'I' | 'frob' '(' r ')'
    func := dual | twist | compose | param_sub | param_sup

``S^k`` is the symmetric power, ``G^k`` the divided power, ``T^k`` the
tensor power, ``I`` the identity functor and ``frob(r)`` the r-th Frobenius
twist of the identity.  ``(*)`` is the tensor product of functors; function
calls bind tighter.  Printing is canonical and round-trips: parsing the
printed form of any tree yields an equal tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


class ExprError(ValueError):
    """Syntax error with a 1-based line/column position."""

    def __init__(self, message, line, col):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Sym:
    k: int

    def degree(self, p):
        return self.k

    def __str__(self):
        return f"S^{self.k}"


@dataclass(frozen=True)
class Div:
    k: int

    def degree(self, p):
        return self.k

    def __str__(self):
        return f"G^{self.k}"


@dataclass(frozen=True)
class TensorPow:
    k: int

    def degree(self, p):
        return self.k

    def __str__(self):
        return f"T^{self.k}"


@dataclass(frozen=True)
class Ident:
    def degree(self, p):
        return 1

    def __str__(self):
        return "I"


@dataclass(frozen=True)
class Frob:
    r: int

    def degree(self, p):
        return p**self.r

    def __str__(self):
        return f"frob({self.r})"


@dataclass(frozen=True)
class Dual:
    arg: object

    def degree(self, p):
        return self.arg.degree(p)

    def __str__(self):
        return f"dual({self.arg})"


@dataclass(frozen=True)
class Twist:
    arg: object
    r: int

    def degree(self, p):
        return self.arg.degree(p) * p**self.r

    def __str__(self):
        return f"twist({self.arg}, {self.r})"


@dataclass(frozen=True)
class Compose:
    outer: object
    inner: object

    def degree(self, p):
        return self.outer.degree(p) * self.inner.degree(p)

    def __str__(self):
        return f"compose({self.outer}, {self.inner})"


@dataclass(frozen=True)
class Tensor:
    factors: tuple

    def degree(self, p):
        return sum(f.degree(p) for f in self.factors)

    def __str__(self):
        return " (*) ".join(str(f) for f in self.factors)


@dataclass(frozen=True)
class ParamSub:
    arg: object
    v: int

    def degree(self, p):
        return self.arg.degree(p)

    def __str__(self):
        return f"param_sub({self.arg}, {self.v})"


@dataclass(frozen=True)
class ParamSup:
    arg: object
    v: int

    def degree(self, p):
        return self.arg.degree(p)

    def __str__(self):
        return f"param_sup({self.arg}, {self.v})"


_TOKEN = re.compile(
    r"""
    (?P<WS>\s+)
  | (?P<POWER>[SGT]\^\d+)
  | (?P<TENSOR>\(\*\))
  | (?P<NAME>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<INT>\d+)
  | (?P<LPAREN>\()
  | (?P<RPAREN>\))
  | (?P<COMMA>,)
    """,
    re.VERBOSE,
)

_FUNCS = {
    "dual": (Dual, ("expr",)),
    "twist": (Twist, ("expr", "int")),
    "compose": (Compose, ("expr", "expr")),
    "param_sub": (ParamSub, ("expr", "int")),
    "param_sup": (ParamSup, ("expr", "int")),
}

_ATOM_POWER = {"S": Sym, "G": Div, "T": TensorPow}


def _tokenize(text):
    tokens = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExprError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind != "WS":
            tokens.append((kind, value, line, col))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    tokens.append(("EOF", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind, what):
        tok = self.advance()
        if tok[0] != kind:
            shown = tok[1] or "end of input"
            raise ExprError(f"expected {what}, found {shown!r}", tok[2], tok[3])
        return tok

    def parse_expr(self):
        factors = [self.parse_term()]
        while self.peek()[0] == "TENSOR":
            self.advance()
            factors.append(self.parse_term())
        if len(factors) == 1:
            return factors[0]
        flat = []
        for f in factors:
            flat.extend(f.factors if isinstance(f, Tensor) else [f])
        return Tensor(tuple(flat))

    def parse_term(self):
        kind, value, line, col = self.peek()
        if kind == "POWER":
            self.advance()
            letter, k = value.split("^")
            return _ATOM_POWER[letter](int(k))
        if kind == "NAME":
            self.advance()
            if value == "I":
                return Ident()
            if value == "frob":
                self.expect("LPAREN", "'('")
                r = int(self.expect("INT", "an integer")[1])
                self.expect("RPAREN", "')'")
                return Frob(r)
            if value in _FUNCS:
                ctor, sig = _FUNCS[value]
                self.expect("LPAREN", "'('")
                args = []
                for i, slot in enumerate(sig):
                    if i:
                        self.expect("COMMA", "','")
                    if slot == "expr":
                        args.append(self.parse_expr())
                    else:
                        args.append(int(self.expect("INT", "an integer")[1]))
                self.expect("RPAREN", "')'")
                return ctor(*args)
            raise ExprError(f"unknown name {value!r}", line, col)
        shown = value or "end of input"
        raise ExprError(f"expected a functor expression, found {shown!r}", line, col)


def parse(text):
    """Parse a functor expression; raises ExprError with position on bad input."""
    parser = _Parser(_tokenize(text))
    tree = parser.parse_expr()
    tok = parser.peek()
    if tok[0] != "EOF":
        raise ExprError(f"unexpected trailing input {tok[1]!r}", tok[2], tok[3])
    return tree
