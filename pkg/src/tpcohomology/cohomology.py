"""Degree-truncated tangential Poisson complexes and exactness tests.

A coefficient window ``W(D, E)`` consists of the elements ``n / prod d_i^E_i``
with ``deg n <= D + sum_i E_i deg d_i``.  Equivalently: the denominator divides
``prod d_i^E_i`` and, for homogeneous data, the weight (numerator degree minus
denominator degree) is at most ``D``.  The windows are nested in both
parameters and have the monomials over the fixed denominator as a basis.

When the Poisson tensor, the denominators and the splitting are homogeneous,
every operator used here shifts weight by a constant, so each computation is
carried out one weight at a time.  The results are identical to a single
large elimination; they are just much cheaper.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .errors import CodomainOverflow, NotACocycle
from .linalg import Eliminator, ExactMatrix, rref_rows
from .ring import LocElem, Poly, RingSpec, grevlex_key
from .schouten import PoissonStructure, exterior_derivative, sigma
from .splitting import Splitting, d_dd, sigma_dd
from .tensors import KForm, MultiVec, _SkewTensor


@dataclass(frozen=True)
class TruncationSpec:
    max_degree: int
    denom_exponents: tuple | int = 0
    type_filter: tuple | str = "all"

    def exponents(self, ring: RingSpec) -> tuple:
        e = self.denom_exponents
        if isinstance(e, int):
            return (e,) * ring.ndens
        e = tuple(e)
        if len(e) != ring.ndens:
            raise ValueError(f"need {ring.ndens} denominator exponents, got {len(e)}")
        return e

    @property
    def empty(self) -> bool:
        return self.max_degree < 0

    def enlarged(self, slack: int) -> "TruncationSpec":
        e = self.denom_exponents
        e = e + slack if isinstance(e, int) else tuple(k + slack for k in e)
        return TruncationSpec(self.max_degree + slack, e, self.type_filter)

    def with_type(self, type_filter) -> "TruncationSpec":
        return TruncationSpec(self.max_degree, self.denom_exponents, type_filter)

    def to_dict(self) -> dict:
        tf = self.type_filter if isinstance(self.type_filter, str) else list(self.type_filter)
        e = self.denom_exponents if isinstance(self.denom_exponents, int) else list(self.denom_exponents)
        return {"max_degree": self.max_degree, "denom_exponents": e, "type_filter": tf}


def _monomials(nvars: int, degree: int):
    """All exponent vectors of total degree exactly ``degree``."""
    if nvars == 1:
        yield (degree,)
        return
    for k in range(degree, -1, -1):
        for rest in _monomials(nvars - 1, degree - k):
            yield (k,) + rest


def window_bound(ring: RingSpec, trunc: TruncationSpec) -> int:
    E = trunc.exponents(ring)
    return trunc.max_degree + sum(k * d.degree for k, d in zip(E, ring.denominators))


def _den_weight(ring: RingSpec, E: Sequence[int]) -> int:
    return sum(k * d.degree for k, d in zip(E, ring.denominators))


def window_elements(ring: RingSpec, trunc: TruncationSpec, weight: int | None = None) -> list:
    """Basis of the coefficient window, optionally restricted to one weight."""
    if trunc.empty:
        return []
    E = trunc.exponents(ring)
    bound = window_bound(ring, trunc)
    shift = _den_weight(ring, E)
    degrees = range(bound + 1) if weight is None else [weight + shift]
    out = []
    for deg in degrees:
        if deg < 0 or deg > bound:
            continue
        for exps in _monomials(ring.nvars, deg):
            out.append(LocElem(ring, Poly._raw(ring.nvars, {exps: 1}), E))
    return out


def window_weights(ring: RingSpec, trunc: TruncationSpec) -> list:
    if trunc.empty:
        return []
    shift = _den_weight(ring, trunc.exponents(ring))
    return list(range(-shift, trunc.max_degree + 1))


def tensor_basis(kind, ring: RingSpec, degree: int, trunc: TruncationSpec, weight: int | None = None) -> list:
    coeffs = window_elements(ring, trunc, weight)
    out = []
    for idx in combinations(range(ring.nvars), degree):
        for c in coeffs:
            out.append(kind._raw(ring, degree, {idx: c}))
    return out


# -- grading -------------------------------------------------------------------------


def _weight_of(c: LocElem):
    return c.weight()


def _uniform_weight(tensors: Sequence[_SkewTensor]):
    """Common weight of all coefficients, or ``None`` when there is none."""
    ws = set()
    for t in tensors:
        for c in t.comps.values():
            w = _weight_of(c)
            if w is None:
                return None
            ws.add(w)
    if len(ws) > 1:
        return None
    return ws.pop() if ws else 0


def sigma_weight_shift(ps: PoissonStructure):
    """Weight shift of sigma, or ``None`` if the data is not homogeneous."""
    if not all(d.is_homogeneous() for d in ps.ring.denominators):
        return None
    w = _uniform_weight([ps.bivector])
    return None if w is None else w - 1


def splitting_is_graded(s: Splitting) -> bool:
    if sigma_weight_shift(s.ps) is None:
        return False
    for X, beta in zip(s.transversal, s.transversal_coframe):
        wx = _uniform_weight([X])
        wb = _uniform_weight([beta])
        if wx is None or wb is None or wx + wb != 0:
            return False
    return True


def split_by_weight(t: _SkewTensor) -> dict:
    """Weight components of a tensor with homogeneous denominators."""
    out: dict = {}
    ring = t.ring
    for idx, c in t.comps.items():
        shift = _den_weight(ring, c.den)
        for deg, part in c.num.homogeneous_parts().items():
            w = deg - shift
            comps = out.setdefault(w, {})
            comps[idx] = LocElem._raw(ring, part, c.den)
    return {w: type(t)._raw(ring, t.degree, comps) for w, comps in out.items()}


# -- coordinates ---------------------------------------------------------------------


def _max_den(ring: RingSpec, tensors) -> tuple:
    m = [0] * ring.ndens
    for t in tensors:
        for c in t.comps.values():
            for i, k in enumerate(c.den):
                if k > m[i]:
                    m[i] = k
    return tuple(m)


def _coords(t: _SkewTensor, M: tuple, tag=0) -> dict:
    out = {}
    for idx, c in t.comps.items():
        for e, v in c.lift_to(M).terms.items():
            out[(tag, idx, e)] = v
    return out


def _combine(basis: Sequence[_SkewTensor], combo: dict):
    out = None
    for j, c in combo.items():
        term = basis[j] * c
        out = term if out is None else out + term
    if out is None:
        return None
    return out


# -- the tangential complex -------------------------------------------------------------


def _normal_part(s: Splitting, t: _SkewTensor) -> _SkewTensor:
    return t - s.tangential_part(t)


def _kernel(basis: Sequence[_SkewTensor], maps: Sequence) -> list:
    """Combos of ``basis`` annihilated by every map in ``maps``."""
    if not basis:
        return []
    images = [[m(b) for b in basis] for m in maps]
    Ms = [_max_den(basis[0].ring, imgs) for imgs in images]
    e = Eliminator(track=True)
    for j in range(len(basis)):
        vec = {}
        for tag, (imgs, M) in enumerate(zip(images, Ms)):
            vec.update(_coords(imgs[j], M, tag))
        e.add(vec, j)
    return [r for r in e.relations if r]


def tangential_basis(s: Splitting, degree: int, trunc: TruncationSpec, weight=None) -> list:
    """A basis of the tangential degree-``degree`` fields with coefficients in the window."""
    if degree > s.rank:
        return []
    basis = tensor_basis(MultiVec, s.ring, degree, trunc, weight)
    if degree == 0:
        return basis
    combos = _kernel(basis, [lambda b: _normal_part(s, b)])
    return [_combine(basis, c) for c in combos]


def tangential_cocycles(s: Splitting, degree: int, trunc: TruncationSpec, weight=None) -> list:
    """Basis of sigma''-closed tangential fields within the window."""
    if degree > s.rank:
        return []
    basis = tensor_basis(MultiVec, s.ring, degree, trunc, weight)
    maps = [lambda b: sigma(s.ps, b)]
    if degree:
        maps.insert(0, lambda b: _normal_part(s, b))
    combos = _kernel(basis, maps)
    return [_combine(basis, c) for c in combos]


@dataclass
class TruncReport:
    operator: str
    degree: int
    truncation: TruncationSpec
    slack: int
    domain_dim: int
    codomain_dim: int
    kernel_dim: int
    rank: int
    image_dim: int
    intersection_dim: int
    quotient_dim: int
    representatives: list = field(default_factory=list)
    truncation_dependent: bool = True

    @property
    def rank_nullity_ok(self) -> bool:
        return self.kernel_dim + self.rank == self.domain_dim

    def to_dict(self) -> dict:
        return {
            "operator": self.operator,
            "degree": self.degree,
            "truncation": self.truncation.to_dict(),
            "slack": self.slack,
            "domain_dim": self.domain_dim,
            "codomain_dim": self.codomain_dim,
            "kernel_dim": self.kernel_dim,
            "rank": self.rank,
            "image_dim": self.image_dim,
            "intersection_dim": self.intersection_dim,
            "quotient_dim": self.quotient_dim,
            "representatives": [str(r) for r in self.representatives],
            "truncation_dependent": self.truncation_dependent,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _blocks(s: Splitting, trunc: TruncationSpec):
    if splitting_is_graded(s):
        return window_weights(s.ring, trunc), sigma_weight_shift(s.ps)
    return [None], 0


def truncated_dimensions(s: Splitting, q: int, trunc: TruncationSpec, slack: int = 2) -> TruncReport:
    """Dimension of truncated tangential cohomology: closed fields modulo the enlarged image."""
    ring = s.ring
    enlarged = trunc.enlarged(slack)
    weights, shift = _blocks(s, trunc)
    invariants = casimir_basis(s.ps, trunc) if q else []
    domain_dim = kernel_dim = rank = image_dim = inter = quotient = 0
    reps = []
    for w in weights:
        T = tangential_basis(s, q, trunc, w)
        Z = tangential_cocycles(s, q, trunc, w)
        domain_dim += len(T)
        kernel_dim += len(Z)
        if T:
            images = [sigma(s.ps, t) for t in T]
            M = _max_den(ring, images)
            e = Eliminator()
            for im in images:
                e.add(_coords(im, M))
            rank += e.rank
        if not Z:
            continue
        if q >= 1:
            pw = None if w is None else w - shift
            Tprev = tangential_basis(s, q - 1, enlarged, pw)
            B = [sigma(s.ps, t) for t in Tprev]
        else:
            B = []
        # Invariant multiples of earlier representatives are tried first, so that
        # classes like u * Lambda show up in that form when they are new.
        candidates = [
            t for t in (r * c for c in invariants for r in reps if not c.is_constant()) if t
        ]
        M = _max_den(ring, list(B) + list(Z) + candidates)
        span = Eliminator()
        for z in Z:
            span.add(_coords(z, M))
        e = Eliminator()
        for b in B:
            e.add(_coords(b, M))
        image_dim += e.rank
        found = 0
        for t in candidates:
            vec = _coords(t, M)
            if span.contains(vec) and e.add(vec):
                reps.append(t)
                found += 1
        for z in Z:
            if e.add(_coords(z, M)):
                reps.append(z)
                found += 1
        quotient += found
        inter += len(Z) - found
    n_out = len(list(combinations(range(ring.nvars), q + 1)))
    E1 = tuple(k + 1 for k in trunc.exponents(ring))
    cod_window = TruncationSpec(trunc.max_degree + (shift or 0), E1)
    codomain_dim = 0 if trunc.empty else n_out * len(window_elements(ring, cod_window))
    return TruncReport(
        "sigma_dd", q, trunc, slack, domain_dim, codomain_dim, kernel_dim, rank,
        image_dim, inter, quotient, reps,
    )


def typed_fields(s: Splitting, typ: tuple, trunc: TruncationSpec) -> list:
    """Basis of the type-``typ`` multivector fields with coefficients in the window."""
    p, q = typ
    if p < 0 or q < 0 or p > s.ntransversal or q > s.rank:
        return []
    basis = tensor_basis(MultiVec, s.ring, p + q, trunc)
    if p + q == 0:
        return basis
    combos = _kernel(basis, [lambda b: b - s.component(b, typ)])
    return [_combine(basis, c) for c in combos]


def typed_cohomology(
    s: Splitting,
    typ: tuple,
    trunc: TruncationSpec,
    slack: int = 2,
    sources: Sequence[tuple] | None = None,
) -> TruncReport:
    """Truncated cohomology of sigma'' on type ``typ`` fields.

    Closed fields are those whose sigma has no component of type (p, q+1).  They
    are divided by the type-(p, q) components of sigma applied to the ``sources``
    types (default: the single type (p, q-1)) in the window enlarged by ``slack``.
    """
    p, q = typ
    target = (p, q + 1)
    if sources is None:
        sources = [(p, q - 1)]
    basis = tensor_basis(MultiVec, s.ring, p + q, trunc) if p + q <= s.ring.nvars else []
    maps = [lambda b: s.component(sigma(s.ps, b), target)]
    if p + q:
        maps.insert(0, lambda b: b - s.component(b, typ))
    Z = [_combine(basis, c) for c in _kernel(basis, maps)] if basis else []
    T = typed_fields(s, typ, trunc)
    rank = 0
    if T:
        images = [s.component(sigma(s.ps, t), target) for t in T]
        M = _max_den(s.ring, images)
        e = Eliminator()
        for im in images:
            e.add(_coords(im, M))
        rank = e.rank
    B = []
    enlarged = trunc.enlarged(slack)
    for src in sources:
        for t in typed_fields(s, src, enlarged):
            B.append(s.component(sigma(s.ps, t), typ))
    M = _max_den(s.ring, list(B) + list(Z))
    e = Eliminator()
    for b in B:
        e.add(_coords(b, M))
    image_dim = e.rank
    reps = []
    inter = 0
    for z in Z:
        if e.add(_coords(z, M)):
            reps.append(z)
        else:
            inter += 1
    label = f"sigma_dd{tuple(typ)}"
    ring = s.ring
    n_out = len(list(combinations(range(ring.nvars), p + q + 1)))
    shift = sigma_weight_shift(s.ps) or 0
    E1 = tuple(k + 1 for k in trunc.exponents(ring))
    cod_window = TruncationSpec(trunc.max_degree + max(shift, 0) + 1, E1)
    codomain_dim = 0 if trunc.empty else n_out * len(window_elements(ring, cod_window))
    return TruncReport(
        label, p + q, trunc.with_type(tuple(typ)), slack, len(T), codomain_dim, len(Z), rank,
        image_dim, inter, len(reps), reps,
    )


@dataclass
class ExactnessVerdict:
    status: str  # "ExactWithWitness" or "NotExactInWindow"
    witness: MultiVec | None
    window: TruncationSpec
    operator: str = "sigma_dd"

    @property
    def exact(self) -> bool:
        return self.status == "ExactWithWitness"

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "witness": None if self.witness is None else str(self.witness),
            "window": self.window.to_dict(),
            "operator": self.operator,
        }


def cocycle_window(t: _SkewTensor) -> TruncationSpec:
    """Smallest window containing every coefficient of ``t``."""
    ring = t.ring
    D = 0
    E = [0] * ring.ndens
    for c in t.comps.values():
        D = max(D, c.num.degree - _den_weight(ring, c.den))
        E = [max(a, b) for a, b in zip(E, c.den)]
    return TruncationSpec(D, tuple(E))


def is_exact(
    s: Splitting,
    cocycle: MultiVec,
    slack: int = 2,
    window: TruncationSpec | None = None,
    full_complex: bool = False,
) -> ExactnessVerdict:
    """Search for a preimage of a closed field inside the window enlarged by ``slack``.

    With ``full_complex`` the operator is sigma and any field may serve as a
    preimage; otherwise the operator is sigma'' on tangential fields.
    """
    ring = s.ring
    q = cocycle.degree
    op = "sigma" if full_complex else "sigma_dd"
    if full_complex:
        if sigma(s.ps, cocycle):
            raise NotACocycle("sigma of the input does not vanish")
    else:
        if _normal_part(s, cocycle):
            raise NotACocycle("input is not tangential")
        if sigma(s.ps, cocycle):
            raise NotACocycle("sigma'' of the input does not vanish")
    base = window if window is not None else cocycle_window(cocycle)
    search = base.enlarged(slack)
    if not cocycle:
        return ExactnessVerdict("ExactWithWitness", MultiVec.zero(ring, max(q - 1, 0)), search, op)
    if q == 0:
        return ExactnessVerdict("NotExactInWindow", None, search, op)

    graded = sigma_weight_shift(s.ps) is not None and (full_complex or splitting_is_graded(s))
    # The windows are nested, so the smallest slack that works gives the simplest witness.
    for k in range(slack + 1):
        witness = _preimage(s, cocycle, base.enlarged(k), full_complex, graded)
        if witness is not None:
            image = sigma(s.ps, witness)
            if image != cocycle or (not full_complex and _normal_part(s, witness)):
                raise ArithmeticError("witness failed exact re-verification")
            return ExactnessVerdict("ExactWithWitness", witness, base.enlarged(k), op)
    return ExactnessVerdict("NotExactInWindow", None, search, op)


def _preimage(s: Splitting, cocycle: MultiVec, search: TruncationSpec, full_complex: bool, graded: bool):
    ring = s.ring
    q = cocycle.degree
    if graded:
        shift = sigma_weight_shift(s.ps)
        pieces = split_by_weight(cocycle)
    else:
        shift = 0
        pieces = {None: cocycle}
    witness = MultiVec.zero(ring, q - 1)
    for w, target in pieces.items():
        pw = None if w is None else w - shift
        basis = tensor_basis(MultiVec, ring, q - 1, search, pw)
        if not basis:
            return None
        normals = None if full_complex else [_normal_part(s, b) for b in basis]
        images = [sigma(s.ps, b) for b in basis]
        Ms = _max_den(ring, images + [target])
        Mn = _max_den(ring, normals) if normals else None
        e = Eliminator(track=True)
        for j, b in enumerate(basis):
            vec = _coords(images[j], Ms, 1)
            if normals:
                vec.update(_coords(normals[j], Mn, 0))
            e.add(vec, j)
        combo = e.express(_coords(target, Ms, 1))
        if combo is None:
            return None
        part = _combine(basis, combo)
        if part is not None:
            witness = witness + part
    return witness


# -- matrices and Casimirs -------------------------------------------------------------


_OPERATORS = {
    "sigma": (MultiVec, 1),
    "sigma_dd": (MultiVec, 1),
    "d": (KForm, 1),
    "d_dd": (KForm, 1),
}


def _apply(s: Splitting, operator: str, t: _SkewTensor) -> _SkewTensor:
    if operator == "sigma":
        return sigma(s.ps, t)
    if operator == "d":
        return exterior_derivative(t)
    fn = sigma_dd if operator == "sigma_dd" else d_dd
    out = None
    for part in s.bigrade(t).components.values():
        if part:
            v = fn(s, part)
            out = v if out is None else out + v
    if out is None:
        kind = MultiVec if operator == "sigma_dd" else KForm
        return kind.zero(s.ring, t.degree + 1)
    return out


def typed_basis(s: Splitting, kind, degree: int, trunc: TruncationSpec) -> list:
    basis = tensor_basis(kind, s.ring, degree, trunc)
    if trunc.type_filter == "all":
        return basis
    typ = tuple(trunc.type_filter)
    combos = _kernel(basis, [lambda b: b - s.component(b, typ)])
    return [_combine(basis, c) for c in combos]


def assemble_matrix(
    s: Splitting,
    operator: str,
    domain: TruncationSpec,
    codomain: TruncationSpec,
    degree: int | None = None,
) -> ExactMatrix:
    """Matrix of an operator from the domain window basis into codomain window coordinates."""
    if operator not in _OPERATORS:
        raise ValueError(f"unknown operator {operator!r}")
    kind, step = _OPERATORS[operator]
    if degree is None:
        if domain.type_filter == "all":
            raise ValueError("degree is required when the domain has no type filter")
        degree = sum(domain.type_filter)
    ring = s.ring
    if domain.empty:
        return ExactMatrix([], [], {})
    basis = typed_basis(s, kind, degree, domain)
    E = codomain.exponents(ring)
    bound = window_bound(ring, codomain)
    row_labels = []
    row_index = {}
    if not codomain.empty:
        for idx in combinations(range(ring.nvars), degree + step):
            for deg in range(bound + 1):
                for exps in _monomials(ring.nvars, deg):
                    row_index[(idx, exps)] = len(row_labels)
                    row_labels.append((idx, exps))
    entries = {}
    for j, b in enumerate(basis):
        image = _apply(s, operator, b)
        if codomain.type_filter != "all" and image:
            comp = s.component(image, tuple(codomain.type_filter))
            if comp != image:
                raise CodomainOverflow(f"image of {b} leaves type {codomain.type_filter}")
        for idx, c in image.comps.items():
            if any(k > m for k, m in zip(c.den, E)):
                raise CodomainOverflow(f"image of {b} needs denominator exponents {c.den}", None)
            for exps, v in c.lift_to(E).terms.items():
                key = (idx, exps)
                if key not in row_index:
                    raise CodomainOverflow(f"image of {b} has monomial {exps} outside the codomain", exps)
                entries[(row_index[key], j)] = v
    matrix = ExactMatrix(row_labels, [str(b) for b in basis], entries)
    matrix.domain_basis = basis
    return matrix


def casimir_basis(ps: PoissonStructure, trunc: TruncationSpec) -> list:
    """Basis of the functions in the window killed by sigma, in reduced echelon form."""
    ring = ps.ring
    shift = sigma_weight_shift(ps)
    weights = window_weights(ring, trunc) if shift is not None else [None]
    kernel = []
    for w in weights:
        basis = tensor_basis(MultiVec, ring, 0, trunc, w)
        combos = _kernel(basis, [lambda b: sigma(ps, b)])
        kernel.extend(_combine(basis, c).as_scalar() for c in combos)
    if not kernel:
        return []
    E = trunc.exponents(ring)
    rows = [{e: v for e, v in f.lift_to(E).terms.items()} for f in kernel]
    order = sorted({e for r in rows for e in r}, key=grevlex_key, reverse=True)
    reduced = rref_rows(rows, order)
    out = [LocElem(ring, Poly._raw(ring.nvars, dict(r)), E) for r in reduced]
    return sorted(out, key=lambda f: grevlex_key(f.lift_to(E).leading_term()[0]))
