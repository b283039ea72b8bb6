"""Skew multivector fields and differential forms with localized-polynomial coefficients."""
from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from typing import Mapping, Sequence

from .errors import RingMismatch
from .ring import LocElem, Poly, RingSpec


def sort_sign(indices: Sequence[int]):
    """Sorted tuple and permutation sign, or ``(None, 0)`` when an index repeats."""
    idx = list(indices)
    sign = 1
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(idx, idx[1:]):
        if a == b:
            return None, 0
    return tuple(idx), sign


def merge_sign(left: tuple, right: tuple):
    """Concatenate two sorted index tuples; sign of the shuffle, or ``(None, 0)`` on overlap."""
    sign = 1
    inv = 0
    for a in left:
        for b in right:
            if a == b:
                return None, 0
            if a > b:
                inv += 1
    if inv & 1:
        sign = -1
    return tuple(sorted(left + right)), sign


class _SkewTensor:
    """Common storage for graded skew tensors; ``comps`` maps increasing index tuples to coefficients."""

    __slots__ = ("ring", "degree", "comps")
    token = "?"

    def __init__(self, ring: RingSpec, degree: int, comps: Mapping | None = None):
        self.ring = ring
        self.degree = degree
        clean: dict = {}
        for idx, c in (comps or {}).items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise ValueError(f"index tuple {idx} does not match degree {degree}")
            if any(not 0 <= i < ring.nvars for i in idx):
                raise IndexError(f"index out of range in {idx}")
            key, sign = sort_sign(idx)
            if key is None:
                continue
            c = ring(c) if not isinstance(c, LocElem) else c
            if c.ring is not ring and c.ring != ring:
                raise RingMismatch("coefficient from a different ring")
            prev = clean.get(key)
            val = c if sign > 0 else -c
            val = val if prev is None else prev + val
            if val:
                clean[key] = val
            else:
                clean.pop(key, None)
        self.comps = clean

    @classmethod
    def _raw(cls, ring, degree, comps):
        t = object.__new__(cls)
        t.ring = ring
        t.degree = degree
        t.comps = comps
        return t

    @classmethod
    def zero(cls, ring: RingSpec, degree: int):
        return cls._raw(ring, degree, {})

    @classmethod
    def basis(cls, ring: RingSpec, indices: Sequence[int], coeff=1):
        return cls(ring, len(indices), {tuple(indices): coeff})

    @classmethod
    def scalar(cls, f: LocElem):
        return cls._raw(f.ring, 0, {(): f} if f else {})

    def is_zero(self) -> bool:
        return not self.comps

    def __bool__(self):
        return bool(self.comps)

    def __getitem__(self, idx) -> LocElem:
        if isinstance(idx, int):
            idx = (idx,)
        key, sign = sort_sign(idx)
        if key is None:
            return self.ring.zero
        c = self.comps.get(key)
        if c is None:
            return self.ring.zero
        return c if sign > 0 else -c

    def as_scalar(self) -> LocElem:
        if self.degree != 0:
            raise ValueError("only degree-0 tensors are scalars")
        return self.comps.get((), self.ring.zero)

    def _check(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.ring is not self.ring and other.ring != self.ring:
            raise RingMismatch("tensors over different rings")
        if other.degree != self.degree:
            raise ValueError(f"degree mismatch: {self.degree} vs {other.degree}")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._check(other)
        out = dict(self.comps)
        for k, c in other.comps.items():
            prev = out.get(k)
            if prev is None:
                out[k] = c
            else:
                s = prev + c
                if s:
                    out[k] = s
                else:
                    del out[k]
        return type(self)._raw(self.ring, self.degree, out)

    def __radd__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        return NotImplemented

    def __neg__(self):
        return type(self)._raw(self.ring, self.degree, {k: -c for k, c in self.comps.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, f):
        """Multiply by a function (a ``LocElem`` or a rational constant)."""
        if isinstance(f, _SkewTensor):
            return NotImplemented
        if isinstance(f, (int, Fraction)):
            if not f:
                return type(self).zero(self.ring, self.degree)
            return type(self)._raw(self.ring, self.degree, {k: c.scale(f) for k, c in self.comps.items()})
        if isinstance(f, Poly):
            f = self.ring(f)
        if not isinstance(f, LocElem):
            return NotImplemented
        out = {}
        for k, c in self.comps.items():
            v = c * f
            if v:
                out[k] = v
        return type(self)._raw(self.ring, self.degree, out)

    __rmul__ = __mul__

    def __truediv__(self, f):
        if isinstance(f, (int, Fraction)):
            return self * (Fraction(1) / f)
        return self * self.ring(f).inverse()

    def wedge(self, other):
        if type(other) is not type(self):
            raise TypeError("wedge needs two tensors of the same kind")
        if other.ring is not self.ring and other.ring != self.ring:
            raise RingMismatch("tensors over different rings")
        out: dict = {}
        for a, ca in self.comps.items():
            for b, cb in other.comps.items():
                key, sign = merge_sign(a, b)
                if key is None:
                    continue
                v = ca * cb
                if sign < 0:
                    v = -v
                prev = out.get(key)
                out[key] = v if prev is None else prev + v
        return type(self)._raw(self.ring, self.degree + other.degree, {k: v for k, v in out.items() if v})

    __xor__ = wedge

    def map_coefficients(self, fn):
        out = {}
        for k, c in self.comps.items():
            v = fn(c)
            if v:
                out[k] = v
        return type(self)._raw(self.ring, self.degree, out)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.comps
        if type(other) is not type(self):
            return NotImplemented
        if self.degree != other.degree:
            return not self.comps and not other.comps
        if self.comps.keys() != other.comps.keys():
            return False
        return all(self.comps[k] == other.comps[k] for k in self.comps)

    __hash__ = None

    def __repr__(self):
        from .grammar import format_tensor

        return f"{type(self).__name__}({format_tensor(self)!r})"

    def __str__(self):
        from .grammar import format_tensor

        return format_tensor(self)


class MultiVec(_SkewTensor):
    """Multivector field: ``comps[(i1,...,ik)]`` is the coefficient of d_{i1} ^ ... ^ d_{ik}."""

    __slots__ = ()
    token = "e"

    def apply(self, f: LocElem) -> LocElem:
        """Directional derivative of ``f`` along a vector field."""
        if self.degree != 1:
            raise ValueError("only vector fields act on functions")
        total = f.ring.zero
        for (i,), c in self.comps.items():
            total = total + c * f.diff(i)
        return total

    def contract(self, alpha: "KForm") -> "MultiVec":
        """Interior product i_alpha of a 1-form into the first slot."""
        if alpha.degree != 1:
            raise ValueError("contraction needs a 1-form")
        out: dict = {}
        for idx, c in self.comps.items():
            for m, i in enumerate(idx):
                a = alpha.comps.get((i,))
                if a is None:
                    continue
                key = idx[:m] + idx[m + 1:]
                v = c * a
                if m & 1:
                    v = -v
                prev = out.get(key)
                out[key] = v if prev is None else prev + v
        return MultiVec._raw(self.ring, self.degree - 1, {k: v for k, v in out.items() if v})

    def evaluate(self, forms: Sequence["KForm"]) -> LocElem:
        """Value on 1-forms: sum over components of coefficient times det[alpha_a(d_{i_b})]."""
        if len(forms) != self.degree:
            raise ValueError(f"need {self.degree} 1-forms, got {len(forms)}")
        return _pair(self.comps, forms, self.ring)


class KForm(_SkewTensor):
    """Differential form: ``comps[(i1,...,iq)]`` is the coefficient of dx_{i1} ^ ... ^ dx_{iq}."""

    __slots__ = ()
    token = "dx"

    def interior(self, X: MultiVec) -> "KForm":
        """Interior product i_X for a vector field X."""
        if X.degree != 1:
            raise ValueError("interior product needs a vector field")
        out: dict = {}
        for idx, c in self.comps.items():
            for m, i in enumerate(idx):
                a = X.comps.get((i,))
                if a is None:
                    continue
                key = idx[:m] + idx[m + 1:]
                v = c * a
                if m & 1:
                    v = -v
                prev = out.get(key)
                out[key] = v if prev is None else prev + v
        return KForm._raw(self.ring, self.degree - 1, {k: v for k, v in out.items() if v})

    def evaluate(self, vectors: Sequence[MultiVec]) -> LocElem:
        if len(vectors) != self.degree:
            raise ValueError(f"need {self.degree} vector fields, got {len(vectors)}")
        return _pair(self.comps, vectors, self.ring)


def _pair(comps: Mapping, duals: Sequence[_SkewTensor], ring: RingSpec) -> LocElem:
    k = len(duals)
    if k == 0:
        return comps.get((), ring.zero)
    total = ring.zero
    perms = [(p, _perm_sign(p)) for p in permutations(range(k))]
    for idx, c in comps.items():
        det = ring.zero
        for p, sign in perms:
            term = None
            for a in range(k):
                v = duals[a].comps.get((idx[p[a]],))
                if v is None:
                    term = None
                    break
                term = v if term is None else term * v
            if term is not None:
                det = det + term if sign > 0 else det - term
        if det:
            total = total + c * det
    return total


def _perm_sign(p) -> int:
    sign = 1
    p = list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def coordinate_vector(ring: RingSpec, i: int) -> MultiVec:
    return MultiVec._raw(ring, 1, {(i,): ring.one})


def coordinate_form(ring: RingSpec, i: int) -> KForm:
    return KForm._raw(ring, 1, {(i,): ring.one})


def differential(f: LocElem) -> KForm:
    out = {}
    for i in range(f.ring.nvars):
        v = f.diff(i)
        if v:
            out[(i,)] = v
    return KForm._raw(f.ring, 1, out)


def vector_field(ring: RingSpec, coeffs: Sequence) -> MultiVec:
    return MultiVec(ring, 1, {(i,): c for i, c in enumerate(coeffs)})


def one_form(ring: RingSpec, coeffs: Sequence) -> KForm:
    return KForm(ring, 1, {(i,): c for i, c in enumerate(coeffs)})


def wedge_all(items: Sequence[_SkewTensor]):
    out = items[0]
    for t in items[1:]:
        out = out.wedge(t)
    return out
