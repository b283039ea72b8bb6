"""Transversal splittings of a regular Poisson structure and the induced bigrading.

Given transversal vector fields X_1..X_s, the transversal coframe is read off
the top-degree field X_1 ^ ... ^ X_s ^ Lambda^r: the 1-form beta_a sends v to
the coefficient of the same wedge with X_a replaced by v, divided by that of
the original.  Every beta_a kills the leaves (Lambda^r absorbs any tangent
vector) and beta_a(X_b) is the Kronecker delta, so the projector onto the
transversal bundle is ``v -> sum_a beta_a(v) X_a``.  No tangential frame is
needed for this; one is attached when Hamiltonian fields of coordinates
happen to provide one.

Types: a multivector is of type (p, q) when it has p transversal and q
tangential factors; a form is of type (p, q) when it has p factors from the
transversal coframe and q tangential ones.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from typing import Sequence

from .errors import NotHomogeneous, NotInvertible, NotTransversal, RankDefect
from .ring import LocElem
from .schouten import (
    PoissonStructure,
    exterior_derivative,
    hamiltonian_field,
    sharp,
    sigma,
    tilde_sharp,
)
from .tensors import KForm, MultiVec, _SkewTensor, coordinate_vector, wedge_all


def _top_coefficient(t: MultiVec) -> LocElem:
    return t.comps.get(tuple(range(t.ring.nvars)), t.ring.zero)


def _perm_sign(p) -> int:
    sign = 1
    p = list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def determinant(matrix: Sequence[Sequence[LocElem]]) -> LocElem:
    n = len(matrix)
    ring = matrix[0][0].ring
    total = ring.zero
    for p in permutations(range(n)):
        term = ring.one
        for i in range(n):
            term = term * matrix[i][p[i]]
            if not term:
                break
        if term:
            total = total + term if _perm_sign(p) > 0 else total - term
    return total


def inverse_matrix(matrix: Sequence[Sequence[LocElem]]) -> list:
    """Inverse over the localized ring via the adjugate; the determinant must be a unit."""
    n = len(matrix)
    det = determinant(matrix)
    inv_det = det.inverse()
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[matrix[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
            cof = determinant(minor) if minor else det.ring.one
            if (i + j) % 2:
                cof = -cof
            out[j][i] = cof * inv_det
    return out


@dataclass
class BigradedTensor:
    """Components of a tensor by type (p, q); the components sum to the original."""

    components: dict
    kind: type
    degree: int

    def total(self):
        out = None
        for t in self.components.values():
            out = t if out is None else out + t
        return out

    def types(self) -> list:
        return sorted(k for k, v in self.components.items() if v)

    def __getitem__(self, key):
        return self.components[key]

    def get(self, key):
        t = self.components.get(key)
        if t is None:
            return None
        return t


@dataclass
class Splitting:
    ps: PoissonStructure
    transversal: list
    transversal_coframe: list
    rank: int
    tangential: list | None = None
    tangential_coframe: list | None = None
    name: str = ""
    _proj_cache: dict = field(default_factory=dict, repr=False)

    @property
    def ring(self):
        return self.ps.ring

    @property
    def ntransversal(self) -> int:
        return len(self.transversal)

    # -- the derivation counting transversal factors ------------------------------

    def _count_vec(self, Q: MultiVec) -> MultiVec:
        out = MultiVec.zero(Q.ring, Q.degree)
        for X, beta in zip(self.transversal, self.transversal_coframe):
            c = Q.contract(beta)
            if c:
                out = out + X.wedge(c)
        return out

    def _count_form(self, w: KForm) -> KForm:
        out = KForm.zero(w.ring, w.degree)
        for X, beta in zip(self.transversal, self.transversal_coframe):
            c = w.interior(X)
            if c:
                out = out + beta.wedge(c)
        return out

    def bigrade(self, T: _SkewTensor) -> BigradedTensor:
        count = self._count_vec if isinstance(T, MultiVec) else self._count_form
        k = T.degree
        top = min(k, self.ntransversal)
        if k == 0 or top == 0:
            return BigradedTensor({(0, k): T}, type(T), k)
        # Powers N^j T; the p-component is a Lagrange combination of them.
        powers = [T]
        for _ in range(top):
            powers.append(count(powers[-1]))
        comps = {}
        for p in range(top + 1):
            # prod_{j != p} (N - j) / (p - j), expanded in powers of N
            poly = [Fraction(1)]
            denom = Fraction(1)
            for j in range(top + 1):
                if j == p:
                    continue
                poly = [Fraction(0)] + poly
                for m in range(len(poly) - 1):
                    poly[m] -= j * poly[m + 1]
                denom *= p - j
            acc = type(T).zero(T.ring, k)
            for m, c in enumerate(poly):
                if c:
                    acc = acc + powers[m] * (c / denom)
            comps[(p, k - p)] = acc
        return BigradedTensor(comps, type(T), k)

    def component(self, T: _SkewTensor, typ: tuple) -> _SkewTensor:
        bg = self.bigrade(T)
        c = bg.components.get(tuple(typ))
        return c if c is not None else type(T).zero(T.ring, T.degree)

    def tangential_part(self, T: _SkewTensor) -> _SkewTensor:
        return self.component(T, (0, T.degree))

    def homogeneous_type(self, T: _SkewTensor):
        """The type of a homogeneous tensor, ``None`` for zero; raises NotHomogeneous otherwise."""
        types = self.bigrade(T).types()
        if not types:
            return None
        if len(types) > 1:
            raise NotHomogeneous(f"tensor has components of types {types}")
        return types[0]

    def transversal_projection(self, v: MultiVec) -> MultiVec:
        out = MultiVec.zero(v.ring, 1)
        for X, beta in zip(self.transversal, self.transversal_coframe):
            c = beta.evaluate([v])
            if c:
                out = out + X * c
        return out


def _split_result(s: Splitting, source_type, image: _SkewTensor, shifts):
    if source_type is None:
        return tuple(type(image).zero(image.ring, image.degree) for _ in shifts)
    bg = s.bigrade(image)
    p, q = source_type
    wanted = {(p + a, q + b) for a, b in shifts}
    stray = [t for t in bg.types() if t not in wanted]
    if stray:
        raise ArithmeticError(f"unexpected components of types {stray}; is the splitting involutive?")
    out = []
    for a, b in shifts:
        c = bg.components.get((p + a, q + b))
        out.append(c if c is not None else type(image).zero(image.ring, image.degree))
    return tuple(out)


def sigma_components(s: Splitting, Q: MultiVec):
    """(sigma' Q, sigma'' Q) of type shifts (-1, 2) and (0, 1)."""
    typ = s.homogeneous_type(Q)
    return _split_result(s, typ, sigma(s.ps, Q), [(-1, 2), (0, 1)])


def sigma_dd(s: Splitting, Q: MultiVec) -> MultiVec:
    return sigma_components(s, Q)[1]


def d_components(s: Splitting, w: KForm):
    """(d' w, d'' w, d_{2,-1} w) of type shifts (1, 0), (0, 1), (2, -1)."""
    typ = s.homogeneous_type(w)
    return _split_result(s, typ, exterior_derivative(w), [(1, 0), (0, 1), (2, -1)])


def d_dd(s: Splitting, w: KForm) -> KForm:
    return d_components(s, w)[1]


def make_splitting(
    ps: PoissonStructure,
    transversal: Sequence[MultiVec],
    name: str = "",
    coframe: Sequence[KForm] | None = None,
) -> Splitting:
    ring = ps.ring
    n = ring.nvars
    rank = ps.generic_rank()
    transversal = list(transversal)
    if rank + len(transversal) != n:
        raise RankDefect(
            f"generic rank {rank} plus {len(transversal)} transversal fields does not equal dimension {n}"
        )
    r = rank // 2
    lam_power = None
    for _ in range(r):
        lam_power = ps.bivector if lam_power is None else lam_power.wedge(ps.bivector)

    def top(vectors):
        parts = list(vectors)
        if lam_power is not None:
            parts.append(lam_power)
        if not parts:
            return ring.one
        return _top_coefficient(wedge_all(parts))

    c = top(transversal)
    if not c:
        raise NotTransversal("transversal fields are tangent to the leaves somewhere generic")
    try:
        c_inv = c.inverse()
    except NotInvertible as exc:
        raise NotTransversal(f"the transversality determinant {c} is not a unit of the ring") from exc

    computed = []
    for a in range(len(transversal)):
        comps = {}
        for j in range(n):
            vecs = list(transversal)
            vecs[a] = coordinate_vector(ring, j)
            v = top(vecs)
            if v:
                comps[(j,)] = v * c_inv
        computed.append(KForm._raw(ring, 1, comps))
    if coframe is not None:
        coframe = list(coframe)
        if len(coframe) != len(computed) or any(a != b for a, b in zip(coframe, computed)):
            raise NotTransversal("declared transversal coframe is not dual to the frame modulo the leaves")
        computed = coframe

    s = Splitting(ps, transversal, computed, rank, name=name)
    _attach_tangential_frame(s)
    return s


def _attach_tangential_frame(s: Splitting):
    """Use Hamiltonian fields of coordinates as a tangential frame when their determinant is a unit."""
    ring = s.ring
    n = ring.nvars
    hams = [hamiltonian_field(s.ps, ring.var(i)) for i in range(n)]
    for choice in combinations(range(n), s.rank):
        frame = [hams[i] for i in choice] + list(s.transversal)
        matrix = [[f[(row,)] for f in frame] for row in range(n)]
        det = determinant(matrix)
        if not det or not det.is_unit():
            continue
        inv = inverse_matrix(matrix)
        coframe = [KForm(ring, 1, {(j,): inv[i][j] for j in range(n)}) for i in range(n)]
        s.tangential = [hams[i] for i in choice]
        s.tangential_coframe = coframe[: s.rank]
        return


@dataclass
class IntertwiningReport:
    samples: int = 0
    passed: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.passed == self.samples and not self.failures


def intertwining_holds(s: Splitting, w: KForm) -> tuple:
    """Both sides of sigma''(#~w) = -#~(d''w) for a tangential form ``w``."""
    lhs = sigma_dd(s, tilde_sharp(s.ps, w))
    rhs = -tilde_sharp(s.ps, d_dd(s, w))
    return lhs, rhs


def check_intertwining(
    s: Splitting,
    samples: int = 50,
    max_degree: int = 3,
    seed: int = 0,
    degrees: Sequence[int] = (0, 1, 2),
    max_den: int = 1,
) -> IntertwiningReport:
    from .sampling import random_form

    rng = random.Random(seed)
    report = IntertwiningReport()
    degrees = [q for q in degrees if q <= s.rank]
    for n in range(samples):
        q = degrees[n % len(degrees)]
        w = s.tangential_part(random_form(rng, s.ring, q, max_degree, max_den))
        lhs, rhs = intertwining_holds(s, w)
        report.samples += 1
        if lhs == rhs:
            report.passed += 1
        else:
            report.failures.append({"form": str(w), "lhs": str(lhs), "rhs": str(rhs)})
    return report
