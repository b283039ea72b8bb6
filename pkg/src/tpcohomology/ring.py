"""Exact polynomials over the rationals and their localization at declared denominators.

Coefficients are stored as ``int`` when integral and as ``Fraction`` otherwise,
so most arithmetic on catalog data stays on the fast integer path.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

from .errors import (
    NotInvertible,
    NotPolynomialInVariable,
    RingMismatch,
    UndeclaredDenominator,
)

Exponents = tuple


def _norm(c):
    """Collapse integral fractions to ``int``."""
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def as_rational(c) -> Fraction | int:
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return _norm(c)
    if isinstance(c, Rational):
        return _norm(Fraction(c.numerator, c.denominator))
    if isinstance(c, str):
        return _norm(Fraction(c))
    raise TypeError(f"not an exact rational: {c!r}")


def _div(a, b):
    if type(a) is int and type(b) is int and a % b == 0:
        return a // b
    return _norm(Fraction(a) / b)


def grevlex_key(exps: Exponents):
    """Sort key: larger key means larger monomial in graded reverse lexicographic order."""
    return (sum(exps), tuple(-e for e in reversed(exps)))


class Poly:
    """Multivariate polynomial with rational coefficients in canonical sparse form."""

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Exponents, object] | None = None):
        self.nvars = nvars
        clean = {}
        if terms:
            for exps, c in terms.items():
                exps = tuple(exps)
                if len(exps) != nvars:
                    raise ValueError(f"exponent vector {exps} does not have length {nvars}")
                if any(e < 0 for e in exps):
                    raise ValueError(f"negative exponent in {exps}")
                c = as_rational(c)
                if c:
                    clean[exps] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: dict) -> "Poly":
        # Trusted constructor: keys are valid tuples and no coefficient is zero.
        p = object.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def constant(cls, nvars: int, c=1) -> "Poly":
        c = as_rational(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "Poly":
        if not 0 <= i < nvars:
            raise IndexError(f"variable index {i} out of range for {nvars} variables")
        exps = [0] * nvars
        exps[i] = 1
        return cls._raw(nvars, {tuple(exps): 1})

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1) -> "Poly":
        return cls(len(exps), {tuple(exps): c})

    # -- predicates and accessors -------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self):
        return self.terms.get((0,) * self.nvars, 0)

    @property
    def degree(self) -> int:
        """Total degree; the zero polynomial has degree -1."""
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=-1)

    def min_degree(self) -> int:
        return min((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def homogeneous_parts(self) -> dict[int, "Poly"]:
        parts: dict[int, dict] = {}
        for e, c in self.terms.items():
            parts.setdefault(sum(e), {})[e] = c
        return {d: Poly._raw(self.nvars, t) for d, t in parts.items()}

    def sorted_terms(self) -> list:
        """Terms ordered from the largest monomial down (graded reverse lex, x1 > x2 > ...)."""
        return sorted(self.terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def leading_term(self):
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=grevlex_key)
        return e, self.terms[e]

    # -- arithmetic ---------------------------------------------------------------

    def _coerce(self, other) -> "Poly | None":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise RingMismatch(f"{self.nvars} vs {other.nvars} variables")
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.constant(self.nvars, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s = _norm(s + c)
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Poly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def scale(self, c) -> "Poly":
        c = as_rational(c)
        if not c:
            return Poly._raw(self.nvars, {})
        if c == 1:
            return self
        return Poly._raw(self.nvars, {e: _norm(v * c) for e, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if len(self.terms) < len(other.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        out: dict = {}
        get = out.get
        for eb, cb in b.items():
            for ea, ca in a.items():
                e = tuple([x + y for x, y in zip(ea, eb)])
                out[e] = get(e, 0) + ca * cb
        return Poly._raw(self.nvars, {e: _norm(c) for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers need a non-negative integer exponent")
        result = Poly.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        from .grammar import format_poly

        return f"Poly({format_poly(self)!r})"

    # -- calculus -----------------------------------------------------------------

    def diff(self, i: int) -> "Poly":
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = list(e)
                ne[i] = k - 1
                out[tuple(ne)] = c * k
        return Poly._raw(self.nvars, out)

    def antiderivative(self, i: int) -> "Poly":
        """Antiderivative in x_i vanishing on x_i = 0."""
        out = {}
        for e, c in self.terms.items():
            ne = list(e)
            ne[i] += 1
            out[tuple(ne)] = _norm(Fraction(c) / ne[i])
        return Poly._raw(self.nvars, out)

    # -- division -----------------------------------------------------------------

    def divide_exact(self, divisor: "Poly") -> "Poly | None":
        """Return the quotient when ``divisor`` divides ``self`` exactly, else ``None``."""
        if not divisor.terms:
            raise ZeroDivisionError("division by the zero polynomial")
        if not self.terms:
            return self
        n = self.nvars
        if len(divisor.terms) == 1:
            (de, dc), = divisor.terms.items()
            out = {}
            for e, c in self.terms.items():
                ne = tuple([a - b for a, b in zip(e, de)])
                if min(ne) < 0:
                    return None
                out[ne] = _div(c, dc)
            return Poly._raw(n, out)
        if self.degree < divisor.degree:
            return None
        dle = max(divisor.terms)
        dlc = divisor.terms[dle]
        rest = [(e, c) for e, c in divisor.terms.items() if e != dle]
        rem = dict(self.terms)
        quot = {}
        while rem:
            le = max(rem)
            qe = tuple([a - b for a, b in zip(le, dle)])
            if min(qe) < 0:
                return None
            lc = rem.pop(le)
            qc = _div(lc, dlc)
            quot[qe] = qc
            for e, c in rest:
                te = tuple([a + b for a, b in zip(qe, e)])
                v = _norm(rem.get(te, 0) - qc * c)
                if v:
                    rem[te] = v
                else:
                    rem.pop(te, None)
        return Poly._raw(n, quot)

    # -- evaluation ---------------------------------------------------------------

    def evaluate(self, point: Sequence):
        """Evaluate at a point; exact for rational input, floating for float input."""
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.nvars}")
        total = 0
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v = v * x**k
            total = total + v
        return total

    def substitute(self, images: Sequence["Poly"]) -> "Poly":
        """Compose with polynomial images of each variable (all in one target ring)."""
        if len(images) != self.nvars:
            raise ValueError("one image per variable is required")
        target = images[0].nvars if images else 0
        total = Poly.constant(target, 0)
        cache: dict = {}
        for e, c in self.terms.items():
            term = Poly.constant(target, c)
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in cache:
                        cache[key] = images[i] ** k
                    term = term * cache[key]
            total = total + term
        return total


@dataclass(frozen=True)
class RingSpec:
    """Polynomial ring in ``nvars`` variables localized at the given denominators.

    The denominators are expected to be irreducible and pairwise coprime; under that
    assumption the reduced form of a ``LocElem`` is canonical.
    """

    nvars: int
    denominators: tuple = ()
    names: tuple = ()
    _powers: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        dens = tuple(self.denominators)
        object.__setattr__(self, "denominators", dens)
        if not self.names:
            object.__setattr__(self, "names", tuple(f"x{i + 1}" for i in range(self.nvars)))
        else:
            object.__setattr__(self, "names", tuple(self.names))
        if len(self.names) != self.nvars:
            raise ValueError("one name per variable is required")
        for d in dens:
            if not isinstance(d, Poly) or d.nvars != self.nvars:
                raise ValueError(f"denominator {d!r} is not a polynomial in {self.nvars} variables")
            if d.is_constant():
                raise ValueError("denominators must be non-constant")
        if len(set(dens)) != len(dens):
            raise ValueError("denominators must be pairwise distinct")

    @property
    def ndens(self) -> int:
        return len(self.denominators)

    def den_power(self, i: int, k: int) -> Poly:
        key = (i, k)
        p = self._powers.get(key)
        if p is None:
            p = self.denominators[i] ** k
            self._powers[key] = p
        return p

    def den_product(self, exps: Sequence[int]) -> Poly:
        out = Poly.constant(self.nvars, 1)
        for i, k in enumerate(exps):
            if k:
                out = out * self.den_power(i, k)
        return out

    def zero_den(self) -> tuple:
        return (0,) * len(self.denominators)

    # -- element constructors -----------------------------------------------------

    def __call__(self, value) -> "LocElem":
        if isinstance(value, LocElem):
            if value.ring != self:
                raise RingMismatch("element belongs to a different ring")
            return value
        if isinstance(value, Poly):
            if value.nvars != self.nvars:
                raise RingMismatch("polynomial has the wrong number of variables")
            return LocElem._raw(self, value, self.zero_den())
        return LocElem._raw(self, Poly.constant(self.nvars, as_rational(value)), self.zero_den())

    def var(self, i: int) -> "LocElem":
        return self(Poly.variable(self.nvars, i))

    @property
    def zero(self) -> "LocElem":
        return self(0)

    @property
    def one(self) -> "LocElem":
        return self(1)

    def denominator(self, i: int, k: int = 1) -> "LocElem":
        """The element 1/d_i^k."""
        den = [0] * len(self.denominators)
        den[i] = k
        return LocElem._raw(self, Poly.constant(self.nvars, 1), tuple(den))

    def extend(self, *extra: Poly) -> "RingSpec":
        """Same variables with additional denominators appended."""
        return RingSpec(self.nvars, self.denominators + tuple(extra), self.names)

    def parse(self, text: str) -> "LocElem":
        from .grammar import parse_scalar

        return parse_scalar(text, self)


class LocElem:
    """Element ``numerator / prod d_i^e_i`` of a localized polynomial ring, kept reduced."""

    __slots__ = ("ring", "num", "den", "_hash")

    def __init__(self, ring: RingSpec, numerator: Poly, den: Sequence[int] | None = None):
        if den is None:
            den = ring.zero_den()
        den = tuple(den)
        if len(den) != ring.ndens or any(k < 0 for k in den):
            raise ValueError("denominator exponents must be one non-negative entry per denominator")
        if numerator.nvars != ring.nvars:
            raise RingMismatch("numerator has the wrong number of variables")
        num, den = _reduce(ring, numerator, den)
        self.ring = ring
        self.num = num
        self.den = den
        self._hash = None

    @classmethod
    def _raw(cls, ring: RingSpec, num: Poly, den: tuple) -> "LocElem":
        e = object.__new__(cls)
        e.ring = ring
        e.num = num
        e.den = den
        e._hash = None
        return e

    @classmethod
    def _reduced(cls, ring: RingSpec, num: Poly, den: tuple) -> "LocElem":
        num, den = _reduce(ring, num, den)
        return cls._raw(ring, num, den)

    # -- predicates ---------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num.terms

    def __bool__(self) -> bool:
        return bool(self.num.terms)

    def is_polynomial(self) -> bool:
        return not any(self.den)

    def is_constant(self) -> bool:
        return not any(self.den) and self.num.is_constant()

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("element is not constant")
        return self.num.constant_value()

    @property
    def denom_exponents(self) -> dict:
        return {i: k for i, k in enumerate(self.den) if k}

    def weight(self) -> int | None:
        """Degree of the numerator minus that of the denominator, if both are homogeneous."""
        if not self.num.terms:
            return None
        if not self.num.is_homogeneous():
            return None
        w = self.num.degree
        for i, k in enumerate(self.den):
            if k:
                d = self.ring.denominators[i]
                if not d.is_homogeneous():
                    return None
                w -= k * d.degree
        return w

    # -- arithmetic ---------------------------------------------------------------

    def _coerce(self, other) -> "LocElem | None":
        if isinstance(other, LocElem):
            if other.ring is not self.ring and other.ring != self.ring:
                raise RingMismatch("elements of different rings")
            return other
        if isinstance(other, (int, Fraction, Poly)):
            return self.ring(other)
        return None

    def _lift(self, target: tuple) -> Poly:
        """Numerator over the larger denominator ``prod d_i^target_i``."""
        num = self.num
        for i, (t, k) in enumerate(zip(target, self.den)):
            if t > k:
                num = num * self.ring.den_power(i, t - k)
        return num

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not other.num.terms:
            return self
        if not self.num.terms:
            return other
        if self.den == other.den:
            num = self.num + other.num
            if not any(self.den):
                return LocElem._raw(self.ring, num, self.den)
            return LocElem._reduced(self.ring, num, self.den)
        target = tuple(max(a, b) for a, b in zip(self.den, other.den))
        return LocElem._reduced(self.ring, self._lift(target) + other._lift(target), target)

    __radd__ = __add__

    def __neg__(self):
        return LocElem._raw(self.ring, -self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def scale(self, c) -> "LocElem":
        c = as_rational(c)
        if not c:
            return self.ring.zero
        return LocElem._raw(self.ring, self.num.scale(c), self.den)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not self.num.terms or not other.num.terms:
            return self.ring.zero
        num = self.num * other.num
        if not any(self.den) and not any(other.den):
            return LocElem._raw(self.ring, num, self.den)
        den = tuple(a + b for a, b in zip(self.den, other.den))
        # Only the denominators contributed by one factor can cancel against the other.
        return LocElem._reduced(self.ring, num, den)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise ValueError("integer exponents only")
        if k < 0:
            return self.inverse() ** (-k)
        return LocElem._reduced(self.ring, self.num**k, tuple(k * e for e in self.den))

    def unit_factorization(self):
        """Write a unit as ``c * prod d_i^k_i`` with integer ``k_i``; ``None`` if not a unit."""
        if not self.num.terms:
            return None
        num = self.num
        ks = [-e for e in self.den]
        progress = True
        while progress and not num.is_constant():
            progress = False
            for i, d in enumerate(self.ring.denominators):
                q = num.divide_exact(d)
                if q is not None:
                    num = q
                    ks[i] += 1
                    progress = True
        if not num.is_constant():
            return None
        return num.constant_value(), ks

    def is_unit(self) -> bool:
        return self.unit_factorization() is not None

    def inverse(self) -> "LocElem":
        fac = self.unit_factorization()
        if fac is None:
            raise NotInvertible(f"{self} is not a unit of the localized ring")
        c, ks = fac
        num = Poly.constant(self.ring.nvars, Fraction(1) / c)
        for i, k in enumerate(ks):
            if k < 0:
                num = num * self.ring.den_power(i, -k)
        den = tuple(max(k, 0) for k in ks)
        return LocElem._raw(self.ring, num, den)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division by zero")
            return self.scale(Fraction(1) / other)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring(other)
        elif isinstance(other, Poly):
            if other.nvars != self.ring.nvars:
                return False
            other = self.ring(other)
        if not isinstance(other, LocElem):
            return NotImplemented
        if other.ring is not self.ring and other.ring != self.ring:
            return False
        if self.den == other.den:
            return self.num == other.num
        target = tuple(max(a, b) for a, b in zip(self.den, other.den))
        return self._lift(target) == other._lift(target)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __repr__(self):
        from .grammar import format_scalar

        return f"LocElem({format_scalar(self)!r})"

    def __str__(self):
        from .grammar import format_scalar

        return format_scalar(self)

    # -- calculus -----------------------------------------------------------------

    def diff(self, i: int) -> "LocElem":
        return differentiate(self, i)

    def evaluate(self, point: Sequence):
        den = 1
        for k, d in zip(self.den, self.ring.denominators):
            if k:
                den = den * d.evaluate(point) ** k
        return self.num.evaluate(point) / den if den != 1 else self.num.evaluate(point)

    def lift_to(self, target: Sequence[int]) -> Poly:
        """Numerator over ``prod d_i^target_i``; ``target`` must dominate ``self.den``."""
        if any(t < k for t, k in zip(target, self.den)):
            raise ValueError("target denominator does not dominate the element's denominator")
        return self._lift(tuple(target))


def _reduce(ring: RingSpec, num: Poly, den: tuple):
    if not num.terms:
        return num, (0,) * len(den)
    if not any(den):
        return num, den
    den = list(den)
    for i, k in enumerate(den):
        while k:
            q = num.divide_exact(ring.denominators[i])
            if q is None:
                break
            num = q
            k -= 1
        den[i] = k
    return num, tuple(den)


def reduce(ring: RingSpec, numerator: Poly, factors: Iterable[tuple[Poly, int]] | Mapping = ()) -> LocElem:
    """Canonical ``LocElem`` for ``numerator / prod(f ** k)``.

    Each factor must be one of the ring's declared denominators, possibly times a
    nonzero constant.
    """
    if isinstance(factors, Mapping):
        factors = factors.items()
    den = [0] * ring.ndens
    scale = Fraction(1)
    for f, k in factors:
        if k < 0:
            raise ValueError("factor exponents must be non-negative")
        if k == 0:
            continue
        if f.is_constant():
            if f.is_zero():
                raise ZeroDivisionError("division by the zero polynomial")
            scale /= Fraction(f.constant_value()) ** k
            continue
        for i, d in enumerate(ring.denominators):
            if f == d:
                den[i] += k
                break
            q = f.divide_exact(d)
            if q is not None and q.is_constant():
                den[i] += k
                scale /= Fraction(q.constant_value()) ** k
                break
        else:
            raise UndeclaredDenominator(f"{f!r} is not among the declared denominators")
    return LocElem(ring, numerator.scale(scale), tuple(den))


def differentiate(f: LocElem, i: int) -> LocElem:
    """Partial derivative of ``f`` in x_i, by the quotient rule on the declared denominators."""
    ring = f.ring
    if not 0 <= i < ring.nvars:
        raise IndexError(f"coordinate index {i} out of range")
    if not f.num.terms:
        return f
    if not any(f.den):
        return LocElem._raw(ring, f.num.diff(i), f.den)
    # d(P / prod d_j^e_j) = (P' prod_{active} d_j - P sum_j e_j d_j' prod_{k != j} d_k)
    #                       / prod d_j^(e_j + 1)
    active = [j for j, e in enumerate(f.den) if e]
    dd = {j: ring.denominators[j].diff(i) for j in active}
    if not any(dd.values()):
        return LocElem._reduced(ring, f.num.diff(i), f.den)
    full = Poly.constant(ring.nvars, 1)
    for j in active:
        full = full * ring.denominators[j]
    num = f.num.diff(i) * full
    for j in active:
        if dd[j]:
            others = Poly.constant(ring.nvars, 1)
            for k in active:
                if k != j:
                    others = others * ring.denominators[k]
            num = num - f.num * dd[j] * others.scale(f.den[j])
    den = tuple(e + 1 if e else 0 for e in f.den)
    return LocElem._reduced(ring, num, den)


def integrate_from_zero(f: LocElem, i: int) -> LocElem:
    """Antiderivative in x_i normalized to vanish on x_i = 0."""
    ring = f.ring
    for j, e in enumerate(f.den):
        if e and ring.denominators[j].degree_in(i) > 0:
            raise NotPolynomialInVariable(
                f"x{i + 1} occurs in the denominator {ring.denominators[j]!r}"
            )
    return LocElem._reduced(ring, f.num.antiderivative(i), f.den)


def substitute(f: LocElem, images: Sequence[LocElem]) -> LocElem:
    """Compose ``f`` with images of the variables; all denominators must map to units."""
    if len(images) != f.ring.nvars:
        raise ValueError("one image per variable is required")
    target = images[0].ring
    total = target.zero
    powers: dict = {}
    for e, c in f.num.terms.items():
        term = target(c)
        for i, k in enumerate(e):
            if k:
                if (i, k) not in powers:
                    powers[(i, k)] = images[i] ** k
                term = term * powers[(i, k)]
        total = total + term
    for j, k in enumerate(f.den):
        if k:
            d = substitute(LocElem._raw(f.ring, f.ring.denominators[j], f.ring.zero_den()), images)
            total = total / d**k
    return total


def evaluation(f: LocElem, point: Sequence):
    """Value of ``f`` at ``point``; raises ``ZeroDivisionError`` outside the localization's domain."""
    return f.evaluate(point)
