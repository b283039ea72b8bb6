"""Lie algebras, their Lie-Poisson structures and the bundled example catalog.

Each catalog entry is a JSON file in ``tpcohomology/data``; the schema is
described in the README.  Brackets are linear expressions in ``X1..Xm`` keyed by
``"i,j"`` (1-based), and every other expression uses the text grammar of
:mod:`tpcohomology.grammar` over the entry's localized ring.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from itertools import combinations
from typing import Mapping, Sequence

from .errors import (
    CatalogLoadError,
    ConfigError,
    HypothesisFailure,
    JacobiViolation,
    ParseError,
    TPError,
)
from .grammar import format_scalar, parse_form, parse_multivec, parse_poly, parse_scalar
from .ring import LocElem, Poly, RingSpec, integrate_from_zero, substitute
from .sampling import random_poly
from .schouten import PoissonStructure, exterior_derivative, sigma
from .splitting import Splitting, check_intertwining, make_splitting
from .tensors import KForm, MultiVec

SCHEMA_VERSION = 1


# -- structure constants ---------------------------------------------------------------


@dataclass(frozen=True)
class LieSpec:
    """Structure constants ``[X_i, X_j] = sum_k c[(i, j)][k] X_k`` with 0-based indices, i < j."""

    dimension: int
    constants: Mapping
    name: str = ""

    def bracket(self, i: int, j: int) -> dict:
        if i == j:
            return {}
        if i < j:
            return dict(self.constants.get((i, j), {}))
        return {k: -v for k, v in self.constants.get((j, i), {}).items()}

    def bracket_vectors(self, u: Sequence, v: Sequence) -> list:
        out = [Fraction(0)] * self.dimension
        for i, a in enumerate(u):
            if not a:
                continue
            for j, b in enumerate(v):
                if not b:
                    continue
                for k, c in self.bracket(i, j).items():
                    out[k] += a * b * c
        return out

    def jacobi_defects(self) -> list:
        """Triples (i, j, k) where the cyclic Jacobi sum does not vanish."""
        bad = []
        m = self.dimension
        for i, j, k in combinations(range(m), 3):
            total = [Fraction(0)] * m
            for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                for p, x in self.bracket(b, c).items():
                    for q, y in self.bracket(a, p).items():
                        total[q] += x * y
            if any(total):
                bad.append((i + 1, j + 1, k + 1))
        return bad


def lie_spec(
    dimension: int,
    brackets: Mapping[str, str],
    name: str = "",
    params: Mapping | None = None,
    strict: bool = True,
) -> LieSpec:
    """Structure constants from bracket text such as ``{"1,2": "X2 - sigma*X3"}``."""
    names = tuple(f"X{i + 1}" for i in range(dimension))
    basis_ring = RingSpec(dimension, names=names)
    constants: dict = {}
    for key, text in brackets.items():
        try:
            i, j = (int(t) - 1 for t in key.split(","))
        except ValueError as exc:
            raise ParseError(f"bracket key {key!r} is not of the form 'i,j'") from exc
        if not (0 <= i < dimension and 0 <= j < dimension) or i == j:
            raise ParseError(f"bracket key {key!r} out of range")
        p = parse_poly(text, basis_ring, params)
        if p and (not p.is_homogeneous() or p.degree != 1):
            raise ParseError(f"bracket [{key}] = {text!r} is not linear in the basis")
        vec = {}
        for exps, c in p.terms.items():
            vec[exps.index(1)] = Fraction(c)
        sign = 1
        if i > j:
            i, j, sign = j, i, -1
        vec = {k: sign * v for k, v in vec.items()}
        if (i, j) in constants and constants[(i, j)] != vec:
            raise ParseError(f"conflicting brackets for X{i + 1}, X{j + 1}")
        constants[(i, j)] = vec
    spec = LieSpec(dimension, constants, name)
    if strict:
        bad = spec.jacobi_defects()
        if bad:
            raise JacobiViolation(f"Jacobi identity fails on basis triples {bad}")
    return spec


def lie_poisson(spec: LieSpec, ring: RingSpec | None = None, check: bool = True) -> PoissonStructure:
    """The linear Poisson tensor sum_{i<j} (sum_k c^k_ij x_k) d_i ^ d_j."""
    ring = ring or RingSpec(spec.dimension)
    if ring.nvars != spec.dimension:
        raise ValueError("ring and Lie algebra dimensions differ")
    comps = {}
    for (i, j), vec in spec.constants.items():
        coeff = Poly(ring.nvars, {tuple(int(a == k) for a in range(ring.nvars)): c for k, c in vec.items()})
        if coeff:
            comps[(i, j)] = ring(coeff)
    return PoissonStructure(ring, MultiVec(ring, 2, comps), check=check)


# -- catalog entries ---------------------------------------------------------------------


@dataclass
class Chart:
    name: str
    kind: str  # "rational", "numeric" or "implicit"
    components: dict = field(default_factory=dict)
    canonical: list = field(default_factory=list)
    domain: str = ""
    family: str = ""


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    claim: str = ""

    def to_dict(self) -> dict:
        return {"check": self.name, "passed": self.passed, "detail": self.detail, "claim": self.claim}


@dataclass
class VerifyReport:
    entry: str
    checks: list = field(default_factory=list)
    seed: int = 0

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def passed(self) -> int:
        return sum(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "entry": self.entry,
            "seed": self.seed,
            "ok": self.ok,
            "passed": self.passed,
            "total": len(self.checks),
            "checks": [c.to_dict() for c in self.checks],
        }


@dataclass
class CatalogEntry:
    name: str
    title: str
    spec: LieSpec
    ring: RingSpec
    ps: PoissonStructure
    params: dict
    casimirs: list
    transversal: list
    coframe: list | None
    charts: list
    raw: dict
    _splitting: Splitting | None = field(default=None, repr=False)

    @property
    def dimension(self) -> int:
        return self.spec.dimension

    @property
    def splitting(self) -> Splitting:
        if self._splitting is None:
            self._splitting = make_splitting(self.ps, self.transversal, self.name, self.coframe)
        return self._splitting

    def scalar(self, text: str) -> LocElem:
        return parse_scalar(text, self.ring, self.params)

    def multivec(self, text: str, degree: int | None = None) -> MultiVec:
        return parse_multivec(text, self.ring, degree, self.params)

    def form(self, text: str, degree: int | None = None) -> KForm:
        return parse_form(text, self.ring, degree, self.params)

    @property
    def expected(self) -> list:
        return list(self.raw.get("expected", []))

    @property
    def obstructions(self) -> list:
        return list(self.raw.get("obstructions", []))

    @property
    def jh_order(self) -> list | None:
        order = self.raw.get("jh_order")
        return None if order is None else [k - 1 for k in order]

    @property
    def generic_jump_set(self) -> tuple | None:
        js = self.raw.get("generic_jump_set")
        return None if js is None else tuple(js)

    def samples(self) -> list:
        return [[Fraction(c) for c in p] for p in self.raw.get("samples", [])]

    def claim(self, key: str) -> str:
        for fact in self.expected:
            if fact.get("id") == key:
                return fact.get("claim", "")
        return ""


def _data_files():
    return resources.files("tpcohomology").joinpath("data")


def available_entries() -> list:
    names = []
    for f in _data_files().iterdir():
        if f.name.endswith(".json"):
            names.append(f.name[:-5])
    return sorted(names)


def _resolve(name: str) -> dict:
    key = name.strip().lower()
    files = _data_files()
    for f in files.iterdir():
        if not f.name.endswith(".json"):
            continue
        data = json.loads(f.read_text())
        if key == data.get("name") or key in [a.lower() for a in data.get("aliases", [])]:
            return data
    raise CatalogLoadError(f"no catalog entry named {name!r}; known: {', '.join(available_entries())}")


def _check_constraints(constraints: Sequence[str], params: Mapping):
    for c in constraints:
        parts = c.split()
        if len(parts) != 3 or parts[1] not in ("<", ">"):
            raise CatalogLoadError(f"unsupported parameter constraint {c!r}")
        name, op, bound = parts[0], parts[1], Fraction(parts[2])
        value = params[name]
        if (op == "<" and not value < bound) or (op == ">" and not value > bound):
            raise ConfigError(f"parameter {name} = {value} violates {c}")


def entry_from_dict(data: Mapping, params: Mapping | None = None) -> CatalogEntry:
    """Build an entry from parsed JSON; ``params`` override the declared defaults."""
    if data.get("schema_version") != SCHEMA_VERSION:
        raise CatalogLoadError(f"unsupported schema version {data.get('schema_version')!r}")
    name = data["name"]
    try:
        values = {k: Fraction(v) for k, v in data.get("parameters", {}).items()}
        for k, v in (params or {}).items():
            if k not in values:
                raise ConfigError(f"entry {name} has no parameter {k!r}")
            values[k] = Fraction(v)
        _check_constraints(data.get("parameter_constraints", []), values)
        m = int(data["dimension"])
        spec = lie_spec(m, data["brackets"], name, values)
        base = RingSpec(m)
        dens = tuple(parse_poly(t, base, values) for t in data.get("denominators", []))
        ring = RingSpec(m, dens)
        ps = lie_poisson(spec, ring)
        casimirs = [parse_scalar(t, ring, values) for t in data.get("casimirs", [])]
        split = data.get("splitting", {})
        transversal = [parse_multivec(t, ring, 1, values) for t in split.get("transversal", [])]
        coframe = split.get("coframe")
        if coframe is not None:
            coframe = [parse_form(t, ring, 1, values) for t in coframe]
        charts = [
            Chart(c["name"], c["kind"], dict(c.get("components", {})), list(c.get("canonical", [])),
                  c.get("domain", ""), c.get("family", ""))
            for c in data.get("charts", [])
        ]
    except (KeyError, ValueError, ParseError) as exc:
        raise CatalogLoadError(f"entry {name}: {exc}") from exc
    return CatalogEntry(
        name, data.get("title", name), spec, ring, ps, values, casimirs, transversal, coframe, charts, dict(data)
    )


def load_entry(name: str, params: Mapping | None = None) -> CatalogEntry:
    return entry_from_dict(_resolve(name), params)


def load_all(params: Mapping[str, Mapping] | None = None) -> list:
    params = params or {}
    return [load_entry(n, params.get(n)) for n in available_entries()]


# -- checks ---------------------------------------------------------------------------------


def _chart_ring(variables: Sequence[str]) -> RingSpec:
    return RingSpec(len(variables), names=tuple(variables))


def _eliminate_square(p: Poly, relation: Poly, var: int) -> Poly:
    """Rewrite ``var^2`` through ``relation = var^2 + (terms without var)`` until var has degree < 2."""
    lead = [0] * p.nvars
    lead[var] = 2
    lead = tuple(lead)
    c = relation.terms.get(lead)
    if c is None or relation.degree_in(var) != 2 or any(
        e[var] and e != lead for e in relation.terms
    ):
        raise ValueError("relation must be var^2 plus terms free of var")
    replacement = Poly(p.nvars, {lead: 1}) - relation.scale(Fraction(1) / Fraction(c))
    while True:
        high = {e: v for e, v in p.terms.items() if e[var] >= 2}
        if not high:
            return p
        low = Poly(p.nvars, {e: v for e, v in p.terms.items() if e[var] < 2})
        reduced = Poly(p.nvars, {})
        for e, v in high.items():
            e2 = list(e)
            e2[var] -= 2
            reduced = reduced + Poly(p.nvars, {tuple(e2): v}) * replacement
        p = low + reduced


def check_parametrization(entry: CatalogEntry, identity: Mapping) -> CheckResult:
    """Pull ``lhs`` back along polynomial coordinates and compare with ``rhs`` modulo the relations."""
    chart = _chart_ring(identity["variables"])
    images = []
    for i in range(entry.dimension):
        text = identity["coordinates"][entry.ring.names[i]]
        images.append(parse_scalar(text, chart, entry.params))
    lhs = substitute(entry.scalar(identity["lhs"]), images)
    rhs = parse_scalar(identity["rhs"], chart, entry.params)
    diff = (lhs - rhs).num
    for rel in identity.get("relations", []):
        r = parse_poly(rel, chart, entry.params)
        var = next(k for k in range(chart.nvars) if r.degree_in(k) == 2 and any(
            e[k] == 2 and sum(e) == 2 for e in r.terms))
        diff = _eliminate_square(diff, r, var)
    ok = not diff
    return CheckResult(f"identity:{identity['name']}", ok, "holds" if ok else f"residual {diff}")


def check_pullback(entry: CatalogEntry, identity: Mapping) -> CheckResult:
    """Substitute chart variables, given as functions of the coordinates, into ``rhs``."""
    chart = _chart_ring(identity["variables"])
    images = [entry.scalar(identity["images"][v]) for v in identity["variables"]]
    rhs = substitute(parse_scalar(identity["rhs"], chart, entry.params), images)
    lhs = entry.scalar(identity["lhs"])
    ok = lhs == rhs
    return CheckResult(f"identity:{identity['name']}", ok, "holds" if ok else f"lhs - rhs = {lhs - rhs}")


def check_rational_chart(entry: CatalogEntry, chart: Chart) -> CheckResult:
    funcs = {k: entry.scalar(v) for k, v in chart.components.items()}
    bad = []
    for f, g, value in chart.canonical:
        got = entry.ps.bracket(funcs[f], funcs[g])
        if got != entry.ring(value):
            bad.append(f"{{{f},{g}}} = {format_scalar(got)}")
    ok = not bad
    detail = "canonical relations hold" if ok else "; ".join(bad)
    return CheckResult(f"chart:{chart.name}", ok, detail)


def _casimir_check(entry: CatalogEntry) -> CheckResult:
    bad = [format_scalar(c) for c in entry.casimirs if sigma(entry.ps, MultiVec.scalar(c))]
    return CheckResult(
        "casimirs", not bad,
        f"{len(entry.casimirs)} Casimirs annihilated" if not bad else f"not Casimirs: {bad}",
    )


def verify_entry(
    entry: CatalogEntry,
    seed: int = 0,
    intertwining_samples: int = 20,
    numeric: bool = True,
) -> VerifyReport:
    """Run every check the entry declares; failures are recorded, never raised."""
    report = VerifyReport(entry.name, seed=seed)
    add = report.checks.append

    bad = entry.spec.jacobi_defects()
    square = sigma(entry.ps, entry.ps.bivector)
    add(CheckResult("jacobi", not bad and not square,
                    "[Lambda, Lambda] = 0" if not square else f"[Lambda, Lambda] = {square}"))
    if entry.casimirs:
        add(_casimir_check(entry))

    try:
        s = entry.splitting
        add(CheckResult("splitting", True, f"rank {s.rank}, {s.ntransversal} transversal field(s)"))
    except TPError as exc:
        add(CheckResult("splitting", False, f"{type(exc).__name__}: {exc}"))
        s = None
    if s is not None:
        rep = check_intertwining(s, samples=intertwining_samples, seed=seed, max_degree=2)
        add(CheckResult("intertwining", rep.ok, f"{rep.passed}/{rep.samples} samples"))

    for chart in entry.charts:
        if chart.kind == "rational":
            add(check_rational_chart(entry, chart))
        elif numeric:
            from .obstruction import implicit_chart_check, numeric_chart_check

            if chart.kind == "numeric":
                res = numeric_chart_check(entry, chart, samples=10, seed=seed)
                add(CheckResult(f"chart:{chart.name}", res["ok"], res["detail"]))
            elif chart.kind == "implicit":
                res = implicit_chart_check(chart.family, _implicit_samples(seed, 5), entry.params.get("tau"))
                add(CheckResult(f"chart:{chart.name}", res.ok, res.summary()))

    for ident in entry.raw.get("identities", []):
        if ident["kind"] == "parametrization":
            add(check_parametrization(entry, ident))
        else:
            add(check_pullback(entry, ident))
    for cf in entry.raw.get("closed_forms", []):
        w = entry.form(cf["form"])
        dw = exterior_derivative(w)
        add(CheckResult(f"closed_form:{cf['name']}", not dw, "d = 0" if not dw else f"d = {dw}"))
    for cb in entry.raw.get("coboundaries", []):
        X = entry.multivec(cb["field"])
        target = entry.multivec(cb["image"])
        ok = sigma(entry.ps, X) == target
        add(CheckResult(f"coboundary:{cb['name']}", ok, "sigma(field) = image" if ok else "mismatch", cb.get("claim", "")))
    for cc in entry.raw.get("cocycles", []):
        Q = entry.multivec(cc["field"])
        ok = s is not None and not sigma(entry.ps, Q) and s.tangential_part(Q) == Q
        add(CheckResult(f"cocycle:{cc['name']}", ok, "tangential and closed" if ok else "not a tangential cocycle",
                        cc.get("claim", "")))
    if "homotopy" in entry.raw and s is not None:
        rng = random.Random(seed)
        var = entry.raw["homotopy"]["variable"] - 1
        n = entry.raw["homotopy"].get("samples", 5)
        fails = 0
        for _ in range(n):
            phi = entry.ring(random_poly(rng, entry.dimension, 3))
            B = tangential_homotopy(entry.ps, phi, var)
            if sigma(entry.ps, B) != entry.ps.bivector * phi:
                fails += 1
        add(CheckResult("homotopy", not fails, f"{n - fails}/{n} samples", entry.claim("tp-h2-zero")))
    return report


def _implicit_samples(seed: int, n: int) -> list:
    import numpy as np

    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        x2, x3 = rng.uniform(-3, 3, size=2)
        if x2 * x2 + x3 * x3 > 0.05:
            out.append((float(x2), float(x3)))
    return out


# -- explicit homotopies and the closed-form assembly --------------------------------------


def tangential_homotopy(ps: PoissonStructure, phi: LocElem, var: int) -> MultiVec:
    """``integrate_from_zero(phi, var) * d_var``; a preimage of ``phi * Lambda`` when d_var Lambda-pairs to one."""
    a = integrate_from_zero(phi, var)
    return MultiVec(ps.ring, 1, {(var,): a})


def g41_tangential_homotopy(phi: LocElem, entry: CatalogEntry | None = None) -> MultiVec:
    """Tangential field B = (int_0^{x4} phi dx4) d/dx4 with sigma''(B) = phi * Lambda."""
    entry = entry or load_entry("g41")
    if phi.ring != entry.ring:
        phi = entry.ring(phi.num) if phi.is_polynomial() else phi
    return tangential_homotopy(entry.ps, phi, 3)


@dataclass
class AssemblySlice:
    label: str
    description: str
    report: object

    def to_dict(self) -> dict:
        r = self.report
        return {"summand": self.label, "description": self.description,
                "report": r.to_dict() if hasattr(r, "to_dict") else r}


@dataclass
class AssemblyReport:
    entry: str
    hypotheses: dict
    slices: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"entry": self.entry, "hypotheses": self.hypotheses, "slices": [s.to_dict() for s in self.slices]}


def closed_form_hypotheses(entry: CatalogEntry) -> dict:
    """Check d(beta) = 0 and sigma''(X) = 0 for the declared defining form and transversal field."""
    data = entry.raw.get("closed_foliation")
    if data is None:
        raise HypothesisFailure(f"entry {entry.name} declares no defining form")
    if entry.dimension != 3 or entry.ps.generic_rank() != 2:
        raise HypothesisFailure("the assembly needs a rank-2 structure in dimension 3")
    beta = entry.form(data["beta"], 1)
    X = entry.multivec(data["transversal"], 1)
    dbeta = exterior_derivative(beta)
    pairing = beta.evaluate([X])
    s = make_splitting(entry.ps, [X], entry.name)
    sx = sigma(entry.ps, X)
    mixed = s.component(sx, (1, 1))
    kills_leaves = all(not beta.evaluate([h]) for h in entry.ps.coordinate_sharps())
    return {
        "d_beta_zero": not dbeta,
        "sigma_dd_X_zero": not mixed,
        "beta_of_X": format_scalar(pairing),
        "beta_kills_leaves": kills_leaves,
        "_splitting": s,
    }


def closed_form_assembly(entry: CatalogEntry, trunc=None, slack: int = 2) -> AssemblyReport:
    """Truncated data for each summand of H^1, H^2, H^3 for a foliation defined by a closed form."""
    from .cohomology import TruncationSpec, casimir_basis, typed_cohomology

    hyp = closed_form_hypotheses(entry)
    s = hyp.pop("_splitting")
    if not (hyp["d_beta_zero"] and hyp["sigma_dd_X_zero"] and hyp["beta_kills_leaves"]
            and hyp["beta_of_X"] == "1"):
        raise HypothesisFailure(f"hypotheses fail for {entry.name}: {hyp}")
    trunc = trunc or TruncationSpec(2, 1)
    report = AssemblyReport(entry.name, hyp)
    add = report.slices.append
    cas = casimir_basis(entry.ps, trunc)
    add(AssemblySlice("H1:Ker(p)", "tangential degree-one cohomology",
                      typed_cohomology(s, (0, 1), trunc, slack)))
    add(AssemblySlice("H1:Im(p)", "invariant multiples of the transversal field",
                      {"dimension": len(cas), "basis": [f"({format_scalar(c)}) X" for c in cas],
                       "truncation": trunc.to_dict()}))
    add(AssemblySlice("H2:H2tan/sigma(V10)", "tangential degree-two classes modulo images of transversal fields",
                      typed_cohomology(s, (0, 2), trunc, slack, sources=[(0, 1), (1, 0)])))
    add(AssemblySlice("H2:H1(P1)", "degree-one cohomology of the (1, q) complex",
                      typed_cohomology(s, (1, 1), trunc, slack)))
    add(AssemblySlice("H3:V12/sigma(V11)", "top (1, q) cohomology",
                      typed_cohomology(s, (1, 2), trunc, slack)))
    return report
