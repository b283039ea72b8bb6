"""Schouten bracket, Lichnerowicz coboundary and the musical maps of a Poisson tensor.

Sign conventions, fixed once for the whole package:

* The bracket is computed in the super-function picture, where d_i is an odd
  variable xi_i::

      [P, Q] = sum_i (P d/dxi_i) * d_i Q  -  (-1)^((p-1)(q-1)) (Q d/dxi_i) * d_i P

  with right derivatives in xi.  On vector fields this is the commutator and
  ``[X, f] = X(f)``.
* ``sigma(Q) = [Lambda, Q]``, hence ``sigma(f) = -H_f`` and
  ``sigma(f)(dg) = -{f, g}``.
* ``H_f = sharp(df)`` with ``sharp(alpha)(beta) = Lambda(alpha, beta)``.
* A multivector is evaluated on 1-forms by ``Q(alpha_1..alpha_k) =
  sum_I Q^I det[alpha_a(d_{i_b})]`` (no factorial normalisation).
"""
from __future__ import annotations

from itertools import combinations
from typing import Sequence

from .errors import ArityMismatch, JacobiViolation, RingMismatch
from .ring import LocElem, RingSpec
from .tensors import KForm, MultiVec, differential, merge_sign


def _same_ring(a: RingSpec, b: RingSpec):
    if a is not b and a != b:
        raise RingMismatch("operands live over different rings")


def _accumulate(out: dict, key, value):
    prev = out.get(key)
    out[key] = value if prev is None else prev + value


def _odd_term(P: MultiVec, Q: MultiVec, out: dict, factor: int):
    """Add ``factor * sum_i (P d/dxi_i) ^ d_i Q`` into ``out``."""
    p = P.degree
    derivs: dict = {}
    for idx, a in P.comps.items():
        for m, i in enumerate(idx):
            dq = derivs.get(i)
            if dq is None:
                dq = []
                for J, b in Q.comps.items():
                    db = b.diff(i)
                    if db:
                        dq.append((J, db))
                derivs[i] = dq
            if not dq:
                continue
            sign = factor if (p - 1 - m) % 2 == 0 else -factor
            rest = idx[:m] + idx[m + 1:]
            for J, db in dq:
                key, s = merge_sign(rest, J)
                if key is None:
                    continue
                v = a * db
                _accumulate(out, key, v if s * sign > 0 else -v)


def schouten_bracket(P: MultiVec, Q: MultiVec) -> MultiVec:
    """Schouten bracket of two multivector fields; the result has degree p + q - 1."""
    _same_ring(P.ring, Q.ring)
    p, q = P.degree, Q.degree
    out: dict = {}
    _odd_term(P, Q, out, 1)
    _odd_term(Q, P, out, -1 if ((p - 1) * (q - 1)) % 2 == 0 else 1)
    return MultiVec._raw(P.ring, p + q - 1, {k: v for k, v in out.items() if v})


def exterior_derivative(omega: KForm) -> KForm:
    out: dict = {}
    for idx, c in omega.comps.items():
        for i in range(omega.ring.nvars):
            if i in idx:
                continue
            v = c.diff(i)
            if not v:
                continue
            key, s = merge_sign((i,), idx)
            _accumulate(out, key, v if s > 0 else -v)
    return KForm._raw(omega.ring, omega.degree + 1, {k: v for k, v in out.items() if v})


def lie_derivative_form(X: MultiVec, omega: KForm) -> KForm:
    """Cartan's formula L_X = i_X d + d i_X."""
    a = exterior_derivative(omega).interior(X)
    if omega.degree == 0:
        return a
    return a + exterior_derivative(omega.interior(X))


class PoissonStructure:
    """A bivector with vanishing Schouten square over a localized ring."""

    def __init__(self, ring: RingSpec, bivector: MultiVec, check: bool = True):
        if bivector.degree != 2:
            raise ValueError("a Poisson tensor is a bivector")
        _same_ring(ring, bivector.ring)
        self.ring = ring
        self.bivector = bivector
        self._sharp_dx = None
        if check and schouten_bracket(bivector, bivector):
            raise JacobiViolation("[Lambda, Lambda] does not vanish")

    @property
    def nvars(self) -> int:
        return self.ring.nvars

    def coordinate_sharps(self) -> list:
        """The vector fields dx_i^# for every coordinate."""
        if self._sharp_dx is None:
            n = self.ring.nvars
            cols = [dict() for _ in range(n)]
            for (i, j), c in self.bivector.comps.items():
                cols[i][(j,)] = c
                cols[j][(i,)] = -c
            self._sharp_dx = [MultiVec._raw(self.ring, 1, col) for col in cols]
        return self._sharp_dx

    def bracket(self, f: LocElem, g: LocElem) -> LocElem:
        """Poisson bracket {f, g} = Lambda(df, dg)."""
        return self.bivector.evaluate([differential(f), differential(g)])

    def generic_rank(self) -> int:
        """Largest 2r with Lambda^r nonzero."""
        power = self.bivector
        r = 1
        if not power:
            return 0
        while True:
            nxt = power.wedge(self.bivector)
            if not nxt:
                return 2 * r
            power = nxt
            r += 1

    def __repr__(self):
        return f"PoissonStructure({self.bivector})"


def sharp(ps: PoissonStructure, alpha: KForm) -> MultiVec:
    """The vector field alpha^# characterised by alpha^#(beta) = Lambda(alpha, beta)."""
    if alpha.degree != 1:
        raise ValueError("sharp takes a 1-form")
    _same_ring(ps.ring, alpha.ring)
    out: dict = {}
    for (i, j), c in ps.bivector.comps.items():
        ai = alpha.comps.get((i,))
        aj = alpha.comps.get((j,))
        if ai is not None:
            _accumulate(out, (j,), c * ai)
        if aj is not None:
            _accumulate(out, (i,), -(c * aj))
    return MultiVec._raw(ps.ring, 1, {k: v for k, v in out.items() if v})


def tilde_sharp(ps: PoissonStructure, lam: KForm) -> MultiVec:
    """Multivector with (#~lam)(alpha_1..alpha_q) = (-1)^q lam(alpha_1^#, ..., alpha_q^#)."""
    _same_ring(ps.ring, lam.ring)
    q = lam.degree
    if q == 0:
        return MultiVec._raw(ps.ring, 0, dict(lam.comps))
    if q == 1:
        # -lam(alpha^#) = -Lambda(alpha, lam) = lam^#(alpha)
        return sharp(ps, lam)
    vecs = ps.coordinate_sharps()
    out = {}
    sign = -1 if q % 2 else 1
    for idx in combinations(range(ps.ring.nvars), q):
        if any(not vecs[i] for i in idx):
            continue
        v = lam.evaluate([vecs[i] for i in idx])
        if v:
            out[idx] = v if sign > 0 else -v
    return MultiVec._raw(ps.ring, q, out)


def hamiltonian_field(ps: PoissonStructure, f: LocElem) -> MultiVec:
    """H_f = sharp(df), so that H_f(g) = {f, g}."""
    return sharp(ps, differential(f))


def sigma(ps: PoissonStructure, Q: MultiVec) -> MultiVec:
    """Lichnerowicz coboundary [Lambda, Q]."""
    _same_ring(ps.ring, Q.ring)
    return schouten_bracket(ps.bivector, Q)


def one_form_bracket(ps: PoissonStructure, alpha: KForm, beta: KForm) -> KForm:
    """{alpha, beta} = L_{alpha#} beta - L_{beta#} alpha - d(Lambda(alpha, beta))."""
    if alpha.degree != 1 or beta.degree != 1:
        raise ValueError("the bracket is defined on 1-forms")
    a = lie_derivative_form(sharp(ps, alpha), beta)
    b = lie_derivative_form(sharp(ps, beta), alpha)
    pairing = ps.bivector.evaluate([alpha, beta])
    return a - b - differential(pairing)


def sigma_via_form_formula(ps: PoissonStructure, Q: MultiVec, alphas: Sequence[KForm]) -> LocElem:
    """Evaluate sigma(Q) on 1-forms through brackets of forms, without the Schouten bracket."""
    k = Q.degree
    if len(alphas) != k + 1:
        raise ArityMismatch(f"a degree-{k} field needs {k + 1} forms, got {len(alphas)}")
    total = ps.ring.zero
    for i, a in enumerate(alphas):
        rest = list(alphas[:i]) + list(alphas[i + 1:])
        value = Q.evaluate(rest) if k else Q.as_scalar()
        term = sharp(ps, a).apply(value)
        total = total + term if i % 2 == 0 else total - term
    for i in range(k + 1):
        for j in range(i + 1, k + 1):
            rest = [alphas[m] for m in range(k + 1) if m != i and m != j]
            term = Q.evaluate([one_form_bracket(ps, alphas[i], alphas[j])] + rest)
            total = total + term if (i + j) % 2 == 0 else total - term
    return total
