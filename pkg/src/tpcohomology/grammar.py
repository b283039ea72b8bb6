"""Text form of polynomials, localized elements, multivectors and forms.

Grammar (whitespace is ignored)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("-" | "+") unary | power
    power  := atom ("^" INTEGER)?
    atom   := INTEGER | NAME | BASIS | "(" expr ")"
    BASIS  := "e" INTEGER ("^e" INTEGER)*        multivector d_i ^ d_j ^ ...
            | "dx" INTEGER ("^dx" INTEGER)*      form dx_i ^ dx_j ^ ...

Variables are named by the ring (``x1``, ``x2``, ... by default) and basis
indices are 1-based.  Division is only allowed by units of the ring, that is a
nonzero constant times a product of declared denominators.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Mapping

from .errors import NotInvertible, ParseError
from .ring import LocElem, Poly, RingSpec
from .tensors import KForm, MultiVec, _SkewTensor

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<vec>e\d+(?:\^e\d+)*)(?![A-Za-z0-9_])"
    r"|(?P<form>dx\d+(?:\^dx\d+)*)(?![A-Za-z0-9_])"
    r"|(?P<num>\d+)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str, ring: RingSpec, params: Mapping | None, allow_basis: bool):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.ring = ring
        self.names = {name: i for i, name in enumerate(ring.names)}
        self.params = {k: Fraction(v) for k, v in (params or {}).items()}
        self.allow_basis = allow_basis
        self.text = text

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect(self, value):
        kind, v = self.take()
        if v != value:
            raise ParseError(f"expected {value!r} in {self.text!r}, found {v!r}")

    def parse(self):
        if not self.tokens:
            raise ParseError("empty expression")
        value = self.expr()
        if self.pos != len(self.tokens):
            raise ParseError(f"trailing input in {self.text!r} at token {self.peek()[1]!r}")
        return value

    def expr(self):
        value = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            value = _add(value, rhs) if op == "+" else _add(value, _neg(rhs))
        return value

    def term(self):
        value = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.unary()
            value = _mul(value, rhs) if op == "*" else self.divide(value, rhs)
        return value

    def unary(self):
        v = self.peek()[1]
        if v == "-":
            self.take()
            return _neg(self.unary())
        if v == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            kind, v = self.take()
            if kind != "num":
                raise ParseError(f"exponent must be a non-negative integer in {self.text!r}")
            k = int(v)
            if isinstance(base, _SkewTensor):
                raise ParseError("powers of basis tensors are not defined")
            base = base**k
        return base

    def atom(self):
        kind, v = self.take()
        if kind == "num":
            return Fraction(int(v))
        if kind == "name":
            if v in self.names:
                return self.ring.var(self.names[v])
            if v in self.params:
                return self.params[v]
            raise ParseError(f"unknown name {v!r}")
        if kind in ("vec", "form"):
            if not self.allow_basis:
                raise ParseError(f"basis token {v!r} not allowed in a scalar expression")
            cls = MultiVec if kind == "vec" else KForm
            prefix = "e" if kind == "vec" else "dx"
            idx = [int(p[len(prefix):]) - 1 for p in v.split("^")]
            if any(not 0 <= i < self.ring.nvars for i in idx):
                raise ParseError(f"basis index out of range in {v!r}")
            return cls.basis(self.ring, idx)
        if v == "(":
            value = self.expr()
            self.expect(")")
            return value
        raise ParseError(f"unexpected token {v!r} in {self.text!r}")

    def divide(self, a, b):
        if isinstance(b, _SkewTensor):
            raise ParseError("cannot divide by a tensor")
        if isinstance(b, Fraction):
            if not b:
                raise ParseError("division by zero")
            return _mul(a, 1 / b)
        try:
            inv = b.inverse()
        except NotInvertible as exc:
            raise ParseError(f"division by a non-unit: {b}") from exc
        return _mul(a, inv)


def _neg(a):
    return -a


def _add(a, b):
    if isinstance(a, _SkewTensor) or isinstance(b, _SkewTensor):
        if isinstance(a, Fraction) and a == 0:
            return b
        if isinstance(b, Fraction) and b == 0:
            return a
        if not (isinstance(a, _SkewTensor) and isinstance(b, _SkewTensor)):
            raise ParseError("cannot add a scalar to a tensor of positive degree")
        if type(a) is not type(b) or a.degree != b.degree:
            raise ParseError("cannot add tensors of different kinds or degrees")
    return a + b


def _mul(a, b):
    if isinstance(a, _SkewTensor) and isinstance(b, _SkewTensor):
        raise ParseError("use e1^e2 style tokens for wedge products")
    return a * b


def _to_scalar(value, ring: RingSpec) -> LocElem:
    if isinstance(value, _SkewTensor):
        raise ParseError("expected a scalar expression")
    if isinstance(value, Fraction):
        return ring(value)
    return value


def parse_scalar(text: str, ring: RingSpec, params: Mapping | None = None) -> LocElem:
    return _to_scalar(_Parser(text, ring, params, allow_basis=False).parse(), ring)


def parse_poly(text: str, ring: RingSpec, params: Mapping | None = None) -> Poly:
    value = parse_scalar(text, ring, params)
    if not value.is_polynomial():
        raise ParseError(f"{text!r} is not a polynomial")
    return value.num


def _parse_tensor(cls, text, ring, degree, params):
    value = _Parser(text, ring, params, allow_basis=True).parse()
    if isinstance(value, _SkewTensor):
        if not isinstance(value, cls):
            raise ParseError(f"expected a {cls.__name__}")
        if degree is not None and value.degree != degree and value:
            raise ParseError(f"expected degree {degree}, found {value.degree}")
        if degree is not None and not value:
            return cls.zero(ring, degree)
        return value
    scalar = _to_scalar(value, ring)
    if degree not in (None, 0):
        if scalar:
            raise ParseError(f"expected degree {degree}, found a scalar")
        return cls.zero(ring, degree)
    return cls.scalar(scalar)


def parse_multivec(text: str, ring: RingSpec, degree: int | None = None, params=None) -> MultiVec:
    return _parse_tensor(MultiVec, text, ring, degree, params)


def parse_form(text: str, ring: RingSpec, degree: int | None = None, params=None) -> KForm:
    return _parse_tensor(KForm, text, ring, degree, params)


# -- printing ---------------------------------------------------------------------


def _monomial_text(exps, names) -> str:
    parts = []
    for name, k in zip(names, exps):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def format_poly(p: Poly, names=None) -> str:
    names = names or tuple(f"x{i + 1}" for i in range(p.nvars))
    if not p.terms:
        return "0"
    out = []
    for n, (exps, c) in enumerate(p.sorted_terms()):
        neg = c < 0
        a = -c if neg else c
        mono = _monomial_text(exps, names)
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        if n == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


def _is_atomic(text: str) -> bool:
    return re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*|\d+", text) is not None


def format_scalar(f: LocElem) -> str:
    ring = f.ring
    num = format_poly(f.num, ring.names)
    if not any(f.den):
        return num
    if len(f.num.terms) > 1:
        num = f"({num})"
    factors = []
    for i, k in enumerate(f.den):
        if not k:
            continue
        d = format_poly(ring.denominators[i], ring.names)
        if not _is_atomic(d):
            d = f"({d})"
        factors.append(d if k == 1 else f"{d}^{k}")
    den = factors[0] if len(factors) == 1 else "(" + "*".join(factors) + ")"
    return f"{num}/{den}"


def format_tensor(t: _SkewTensor) -> str:
    if t.degree == 0:
        return format_scalar(t.as_scalar())
    if not t.comps:
        return "0"
    prefix = t.token
    out = []
    for n, idx in enumerate(sorted(t.comps)):
        c = t.comps[idx]
        basis = "^".join(f"{prefix}{i + 1}" for i in idx)
        if c == 1:
            body, neg = basis, False
        elif c == -1:
            body, neg = basis, True
        elif c.is_polynomial() and len(c.num.terms) == 1:
            s = format_scalar(c)
            neg = s.startswith("-")
            body = f"{s[1:] if neg else s}*{basis}"
        else:
            body, neg = f"({format_scalar(c)})*{basis}", False
        if n == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)
