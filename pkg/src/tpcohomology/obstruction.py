"""Floating-point obstruction integrals, divergence classification and implicit-chart checks.

Everything here is double precision and one-way: symbolic objects are turned into
float callables, never the reverse.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import sympy
from scipy import integrate, optimize
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from .errors import ConfigError, NewtonDivergence, QuadratureFailure
from .grammar import format_scalar

KINDS = ("G41", "HAlgebra", "SL2")
CONVERGENT = "ConvergentLimit"
POWER_LAW = "DivergentPowerLaw"
SUPER_POLYNOMIAL = "DivergentSuperPolynomial"
INCONCLUSIVE = "Inconclusive"

_TRANSFORMS = standard_transformations + (convert_xor,)


def sympy_expr(text: str, dimension: int, params: dict | None = None) -> sympy.Expr:
    """Parse ``text`` (``^`` or ``**`` for powers) over x1..xm with parameters substituted."""
    names = {f"x{i + 1}": sympy.Symbol(f"x{i + 1}", real=True) for i in range(dimension)}
    names.update({"exp": sympy.exp, "log": sympy.log, "sqrt": sympy.sqrt, "atan2": sympy.atan2})
    for k, v in (params or {}).items():
        names[k] = sympy.nsimplify(v)
    return parse_expr(text, local_dict=names, transformations=_TRANSFORMS)


def coordinate_symbols(dimension: int) -> list:
    return [sympy.Symbol(f"x{i + 1}", real=True) for i in range(dimension)]


# -- pullbacks of the obstruction functionals ------------------------------------------------


def h_chart(u: float, v: float) -> tuple:
    """Inverse of (x2, x3) -> (x2 x3, (x2^2 - x3^2)/2) on the closed first quadrant minus the origin."""
    r = math.hypot(u, v)
    if v > 0:
        a = math.sqrt(v + r)
        return a, u / a
    if v < 0:
        b = math.sqrt(-v + r)
        return u / b, b
    a = math.sqrt(u)
    return a, a


def sl2_point(s: float, q: float, z: float) -> tuple:
    return (-s * math.sin(q) + z * math.cos(q), -s * math.cos(q) - z * math.sin(q), s)


def _g41_integrand(f: Callable) -> Callable:
    def integrand(s, w):
        return f(w, s, (s * s - 1.0) / (2.0 * w), 0.0) / w
    return integrand


def _h_integrand(f: Callable) -> Callable:
    def integrand(t, u):
        x2, x3 = h_chart(u, t)
        return f(0.0, x2, x3) / (2.0 * math.sqrt(u * u + t * t))
    return integrand


_Q_NODES = 32


def _sl2_integrand(f: Callable, depends_on_q: bool) -> Callable:
    if not depends_on_q:
        def integrand(s, z):
            return 2.0 * math.pi * f(*sl2_point(s, 0.0, z))
        return integrand
    qs = [2.0 * math.pi * k / _Q_NODES for k in range(_Q_NODES)]

    def averaged(s, z):
        # periodic trapezoid rule: spectrally accurate for the trigonometric polynomials that arise
        return sum(f(*sl2_point(s, q, z)) for q in qs) * (2.0 * math.pi / _Q_NODES)
    return averaged


def _varies_in_q(f: Callable) -> bool:
    rng = np.random.default_rng(7)
    for _ in range(3):
        s, z = rng.uniform(0.2, 0.9, size=2)
        base = f(*sl2_point(s, 0.0, z))
        for q in (0.7, 2.1, 4.4):
            other = f(*sl2_point(s, q, z))
            if abs(other - base) > 1e-9 * max(1.0, abs(base)):
                return True
    return False


@dataclass
class ObstructionSpec:
    """One integral I(p) = int_{-1}^{1} integrand(s, p) ds, studied as p -> 0+."""

    kind: str
    name: str
    expression: str
    integrand: Callable
    parameter: str
    alpha: float | None = None
    family: str = "power"
    expect: str | None = None
    expected_exponent: float | None = None
    claim: str = ""
    bounds: tuple = (-1.0, 1.0)

    def integral(self, p: float, lower: float | None = None, upper: float | None = None) -> float:
        a = self.bounds[0] if lower is None else lower
        b = self.bounds[1] if upper is None else upper
        pts = [x for x in (-p, 0.0, p) if a < x < b]
        try:
            out = integrate.quad(self.integrand, a, b, args=(p,), points=pts or None, epsabs=1e-13,
                                 epsrel=1e-10, limit=400, full_output=1)
        except (OverflowError, ZeroDivisionError) as exc:
            raise QuadratureFailure(f"{self.name} at {self.parameter}={p}: integrand not finite ({exc})") from exc
        if len(out) > 3:
            raise QuadratureFailure(f"{self.name} at {self.parameter}={p}: {out[3].splitlines()[0]}")
        return out[0]


_PARAMETER = {"G41": "x1", "HAlgebra": "u", "SL2": "z"}


def obstruction_from_expression(kind: str, expr: sympy.Expr, dimension: int, name: str = "", **meta) -> ObstructionSpec:
    """Wrap a closed tangential coefficient (a function of x) as the integral for ``kind``."""
    if kind not in KINDS:
        raise ConfigError(f"unknown obstruction kind {kind!r}")
    xs = coordinate_symbols(dimension)
    f = sympy.lambdify(xs, expr, modules="math")
    if kind == "G41":
        integrand = _g41_integrand(f)
    elif kind == "HAlgebra":
        integrand = _h_integrand(f)
    else:
        integrand = _sl2_integrand(f, _varies_in_q(f))
    return ObstructionSpec(kind=kind, name=name, expression=str(expr), integrand=integrand,
                           parameter=_PARAMETER[kind], **meta)


# -- classification ---------------------------------------------------------------------------


@dataclass
class DivergenceVerdict:
    classification: str
    samples: list
    slope: float | None = None
    residual: float | None = None
    exponent: float | None = None
    limit: float | None = None
    name: str = ""
    alpha: float | None = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "alpha": self.alpha,
            "classification": self.classification,
            "exponent": self.exponent,
            "limit": self.limit,
            "fit": {"slope": self.slope, "residual": self.residual},
            "samples": [{"parameter": p, "integral": v} for p, v in self.samples],
        }


def check_grid(grid: Sequence[float], minimum: int = 5) -> list:
    grid = [float(g) for g in grid]
    if len(grid) < minimum:
        raise ConfigError(f"grid needs at least {minimum} points, got {len(grid)}")
    if any(g <= 0 for g in grid):
        raise ConfigError("grid values must be positive")
    if any(b >= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("grid must be strictly decreasing")
    return grid


def classify(params: Sequence[float], values: Sequence[float], threshold: float = 0.05) -> DivergenceVerdict:
    """Contracting differences mean convergence; otherwise try a log-log line through the tail."""
    samples = list(zip(params, values))
    diffs = [abs(b - a) for a, b in zip(values, values[1:])]
    scale = max(1.0, max(abs(v) for v in values))
    if max(diffs) <= 1e-9 * scale or all(b < a for a, b in zip(diffs, diffs[1:])):
        return DivergenceVerdict(CONVERGENT, samples, limit=values[-1])
    m = math.ceil(len(params) / 2)
    if any(v == 0 for v in values[-m:]):
        return DivergenceVerdict(INCONCLUSIVE, samples)
    lx = np.log(np.asarray(params[-m:], dtype=float))
    ly = np.log(np.abs(np.asarray(values[-m:], dtype=float)))
    slope, intercept = np.polyfit(lx, ly, 1)
    residual = float(np.max(np.abs(ly - (slope * lx + intercept))))
    local = np.diff(ly) / np.diff(lx)
    exponent = -float(slope)
    if exponent <= 0:
        return DivergenceVerdict(INCONCLUSIVE, samples, float(slope), residual)
    steep = float(np.max(np.abs(local)) / np.min(np.abs(local))) if np.all(local != 0) else math.inf
    if residual > threshold or steep > 1.1:
        return DivergenceVerdict(SUPER_POLYNOMIAL, samples, float(slope), residual)
    return DivergenceVerdict(POWER_LAW, samples, float(slope), residual, exponent=exponent)


def evaluate_obstruction(spec: ObstructionSpec, grid: Sequence[float], threshold: float = 0.05) -> DivergenceVerdict:
    grid = check_grid(grid)
    values = [spec.integral(p) for p in grid]
    verdict = classify(grid, values, threshold)
    verdict.name = spec.name
    verdict.alpha = spec.alpha
    return verdict


# -- independence of families -----------------------------------------------------------------


def g41_lower_bound(alpha: float, x: float) -> float:
    return 2.0 ** (-alpha) * x ** (-2.0 * alpha)


def g41_upper_bound(alpha: float, x: float) -> float:
    """Valid for alpha > 1/2 and 0 < x < 1."""
    return 2.0 * alpha / (2.0 * alpha - 1.0) * x ** (-2.0 * alpha)


@dataclass
class IndependenceReport:
    kind: str
    alphas: list
    grid: list
    verdicts: list
    envelope: list = field(default_factory=list)
    ratios: list = field(default_factory=list)
    independent: bool = False
    conclusive: bool = True
    note: str = ""

    @property
    def exponents(self) -> list:
        return [v.exponent for v in self.verdicts]

    def summary(self) -> str:
        n = len(self.alphas) if self.independent else 0
        return f"claim supported by {n} independent certified classes ({self.note})"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "alphas": self.alphas,
            "grid": self.grid,
            "exponents": self.exponents,
            "verdicts": [v.to_dict() for v in self.verdicts],
            "envelope": self.envelope,
            "ratios": self.ratios,
            "independent": self.independent,
            "conclusive": self.conclusive,
            "summary": self.summary(),
        }


def independence_certificate(family: Sequence[ObstructionSpec], grid: Sequence[float],
                             threshold: float = 0.05) -> IndependenceReport:
    """Staircase check: each member must dominate the sum of all earlier ones as the parameter shrinks."""
    grid = check_grid(grid)
    family = sorted(family, key=lambda s: s.alpha)
    kinds = {s.kind for s in family}
    if len(kinds) != 1:
        raise ConfigError("family members must share a kind")
    kind = kinds.pop()
    alphas = [s.alpha for s in family]
    verdicts = [evaluate_obstruction(s, grid, threshold) for s in family]
    report = IndependenceReport(kind, alphas, grid, verdicts)
    diverging = all(v.classification in (POWER_LAW, SUPER_POLYNOMIAL) for v in verdicts)
    if len(family) == 1:
        report.independent = diverging
        report.note = "single class, divergent obstruction" if diverging else "obstruction does not diverge"
        report.conclusive = diverging
        return report

    if kind == "G41" and all(s.family == "power" and s.alpha > 0.5 for s in family):
        # half-interval integrals against the closed-form envelopes
        holds_at = []
        for x in grid:
            if not 0 < x < 1:
                continue
            row = {"parameter": x, "steps": []}
            ok = True
            for p in range(1, len(family)):
                lo = g41_lower_bound(alphas[p], x)
                hi = sum(g41_upper_bound(a, x) for a in alphas[:p])
                measured = [s.integral(x, 0.0, 1.0) for s in family[: p + 1]]
                within = all(g41_lower_bound(a, x) <= v <= g41_upper_bound(a, x)
                             for a, v in zip(alphas[: p + 1], measured))
                step = lo > hi and within
                row["steps"].append({"alpha": alphas[p], "lower": lo, "sum_of_uppers": hi, "holds": step})
                ok = ok and step
            row["holds"] = ok
            report.envelope.append(row)
            if ok:
                holds_at.append(x)
        tail = grid[-max(1, len(grid) // 2):]
        report.independent = diverging and all(x in holds_at for x in tail)
        report.note = f"envelope inequalities hold for parameter <= {max(holds_at)}" if holds_at else "envelopes fail"
    else:
        # measured staircase: |I_p| / sum_{i<p} |I_i| must grow along the grid
        grows = True
        for p in range(1, len(family)):
            seq = []
            for k, x in enumerate(grid):
                top = abs(verdicts[p].samples[k][1])
                below = sum(abs(v.samples[k][1]) for v in verdicts[:p])
                seq.append(top / below if below else math.inf)
            report.ratios.append({"alpha": alphas[p], "ratios": seq})
            grows = grows and all(b > a for a, b in zip(seq, seq[1:]))
        report.independent = diverging and grows
        report.note = "dominance ratios increase along the grid" if grows else "dominance ratios do not increase"
    report.conclusive = diverging
    return report


# -- catalog plumbing -------------------------------------------------------------------------


def _probe_expression(entry, data: dict) -> sympy.Expr:
    from .schouten import hamiltonian_field, sigma

    xs = coordinate_symbols(entry.dimension)
    if "hamiltonian_combination" in data:
        B = None
        for idx, coeff in data["hamiltonian_combination"].items():
            H = hamiltonian_field(entry.ps, entry.scalar(f"x{idx}")) * entry.scalar(coeff)
            B = H if B is None else B + H
        image = sigma(entry.ps, B)
        lam = entry.ps.bivector
        key = next(iter(lam.comps))
        phi = sympy.cancel(sympy_expr(format_scalar(image.comps.get(key, entry.ring.zero)), entry.dimension)
                           / sympy_expr(format_scalar(lam.comps[key]), entry.dimension))
        for k, c in lam.comps.items():
            lhs = sympy_expr(format_scalar(image.comps.get(k, entry.ring.zero)), entry.dimension)
            if sympy.cancel(lhs - phi * sympy_expr(format_scalar(c), entry.dimension)) != 0:
                raise ConfigError(f"probe {data['name']}: sigma(B) is not a multiple of the Poisson tensor")
        return phi
    g = entry.scalar(data["primitive"])
    var = int(data["hamiltonian_of"])
    a = hamiltonian_field(entry.ps, entry.scalar(f"x{var}")).apply(g)
    expr = sympy_expr(format_scalar(a), entry.dimension)
    if data["kind"] == "G41":
        expr = expr.subs(xs[3], 0)
    return expr


def entry_obstructions(entry, alphas: Sequence[float] | None = None) -> list:
    """(group name, [ObstructionSpec], grid) for every obstruction block of a catalog entry."""
    out = []
    for data in entry.obstructions:
        kind = data["kind"]
        grid = [float(g) for g in data.get("grid", [])]
        if data.get("family") == "probe":
            expr = _probe_expression(entry, data)
            spec = obstruction_from_expression(kind, expr, entry.dimension, data["name"], family="probe",
                                               expect=data.get("expect"), claim=data.get("claim", ""))
            out.append((data["name"], [spec], grid))
            continue
        specs = []
        use = data.get("alphas", []) if alphas is None or data.get("family") != "power" else alphas
        for alpha in use:
            expr = sympy_expr(data["a"], entry.dimension, {**entry.params, "alpha": alpha})
            exponent = None
            if "exponent" in data:
                exponent = float(sympy_expr(data["exponent"], entry.dimension, {"alpha": alpha}))
            specs.append(obstruction_from_expression(
                kind, expr, entry.dimension, f"{data['name']}[alpha={float(alpha):g}]", alpha=float(alpha),
                family=data.get("family", "power"), expect=data.get("expect"), expected_exponent=exponent,
                claim=data.get("claim", "")))
        out.append((data["name"], specs, grid))
    return out


def matches_expectation(spec: ObstructionSpec, verdict: DivergenceVerdict, tolerance: float = 0.05) -> bool:
    if spec.expect and verdict.classification != spec.expect:
        return False
    if spec.expected_exponent is not None:
        if verdict.exponent is None:
            return False
        return abs(verdict.exponent - spec.expected_exponent) <= tolerance * spec.expected_exponent
    return True


# -- implicit charts --------------------------------------------------------------------------


@dataclass
class ImplicitSample:
    point: tuple
    ok: bool
    t: float | None = None
    residual: float | None = None
    derivative_error: float | None = None
    circle_error: float | None = None
    error: str = ""


@dataclass
class ImplicitChartReport:
    family: str
    samples: list

    @property
    def ok(self) -> bool:
        return bool(self.samples) and all(s.ok for s in self.samples)

    def summary(self) -> str:
        good = sum(s.ok for s in self.samples)
        worst = max((s.derivative_error or 0.0) for s in self.samples) if self.samples else 0.0
        return f"{good}/{len(self.samples)} samples, worst derivative error {worst:.2e}"


class _TauFamily:
    def __init__(self, tau: float):
        if not tau > 1:
            raise ConfigError(f"the tau family needs tau > 1, got {tau}")
        self.tau = tau

    def F(self, t, x2, x3):
        return math.exp(-2 * t) * x2 * x2 + math.exp(-2 * t / self.tau) * x3 * x3 - 1.0

    def dF(self, t, x2, x3):
        return -2 * math.exp(-2 * t) * x2 * x2 - 2 / self.tau * math.exp(-2 * t / self.tau) * x3 * x3

    def gradient(self, t, x2, x3):
        tau = self.tau
        den = math.exp(-2 * t) * x2 * x2 + math.exp(-2 * t / tau) * x3 * x3 / tau
        return (math.exp(-2 * t) * x2 / den, math.exp(-2 * t / tau) * x3 / den)

    def image(self, t, x2, x3):
        return (math.exp(-t) * x2, math.exp(-t / self.tau) * x3)


class _ShearFamily:
    def F(self, t, x2, x3):
        return math.exp(-2 * t) * ((x2 - x3 * t) ** 2 + x3 * x3) - 1.0

    def dF(self, t, x2, x3):
        y = x2 - x3 * t
        return -2 * math.exp(-2 * t) * (y * y + x3 * x3 + x3 * y)

    def gradient(self, t, x2, x3):
        den = (x2 - (t - 0.5) * x3) ** 2 + 0.75 * x3 * x3
        return ((x2 - t * x3) / den, (x3 + t * t * x3 - t * x2) / den)

    def image(self, t, x2, x3):
        return (math.exp(-t) * (x2 - x3 * t), math.exp(-t) * x3)


def _bracket(fam, x2: float, x3: float, t0: float) -> tuple:
    """Interval around the root; F is strictly decreasing in t for both families."""
    step = 1.0
    lo = hi = t0
    for _ in range(60):
        if fam.F(lo, x2, x3) > 0 and fam.F(hi, x2, x3) < 0:
            return lo, hi
        if fam.F(lo, x2, x3) <= 0:
            lo -= step
        if fam.F(hi, x2, x3) >= 0:
            hi += step
        step *= 2
    raise NewtonDivergence(f"could not bracket a root near t0={t0:.3g} at ({x2}, {x3})")


def _solve(fam, x2: float, x3: float) -> float:
    """Root of F(., x2, x3): Brent on a bracket from t0 = log|x|, then Newton polishing."""
    t0 = math.log(math.hypot(x2, x3))
    try:
        lo, hi = _bracket(fam, x2, x3, t0)
        t = optimize.brentq(fam.F, lo, hi, args=(x2, x3), xtol=1e-15, rtol=1e-15, maxiter=200)
        for _ in range(3):
            f = fam.F(t, x2, x3)
            if f == 0:
                break
            t -= f / fam.dF(t, x2, x3)
    except (RuntimeError, OverflowError, ZeroDivisionError) as exc:
        raise NewtonDivergence(f"no root from t0={t0:.3g} at ({x2}, {x3}): {exc}") from exc
    return float(t)


def _richardson(fam, x2: float, x3: float, k: int, h: float) -> float:
    """Central difference of the solved t in coordinate k, extrapolated from steps h and h/2."""
    def central(step):
        e = (step, 0.0) if k == 0 else (0.0, step)
        return (_solve(fam, x2 + e[0], x3 + e[1]) - _solve(fam, x2 - e[0], x3 - e[1])) / (2 * step)

    return (4 * central(h / 2) - central(h)) / 3


def implicit_chart_check(family: str, samples: Sequence[tuple], tau: float | None = None,
                         derivative_tol: float = 1e-6, residual_tol: float = 1e-12) -> ImplicitChartReport:
    """Solve the level-set equation for t at each (x2, x3), then test derivative formulas and the circle image."""
    if family == "tau":
        fam = _TauFamily(float(tau if tau is not None else 2.0))
    elif family == "shear":
        fam = _ShearFamily()
    else:
        raise ConfigError(f"unknown implicit family {family!r}")
    out = []
    for x2, x3 in samples:
        x2, x3 = float(x2), float(x3)
        if x2 == 0 and x3 == 0:
            out.append(ImplicitSample((x2, x3), False, error="origin is excluded"))
            continue
        try:
            t = _solve(fam, x2, x3)
        except NewtonDivergence as exc:
            out.append(ImplicitSample((x2, x3), False, error=str(exc)))
            continue
        res = abs(fam.F(t, x2, x3))
        formula = fam.gradient(t, x2, x3)
        err = 0.0
        # t varies on the scale e^t near the axes and 1/|dt/dx_k| where it is steep
        base = min(math.hypot(x2, x3), math.exp(min(t, 0.0)))
        try:
            for k in range(2):
                h = 1e-3 * (min(base, 1.0 / abs(formula[k])) if formula[k] else base)
                fd = _richardson(fam, x2, x3, k, h)
                err = max(err, abs(fd - formula[k]) / max(1.0, abs(formula[k])))
        except NewtonDivergence as exc:
            out.append(ImplicitSample((x2, x3), False, t, res, error=f"finite difference: {exc}"))
            continue
        p = fam.image(t, x2, x3)
        circle = abs(math.hypot(*p) - 1.0)
        ok = res <= residual_tol and err <= derivative_tol and circle <= residual_tol
        out.append(ImplicitSample((x2, x3), ok, t, res, err, circle))
    return ImplicitChartReport(family, out)


# -- transcendental Darboux charts ------------------------------------------------------------


def numeric_chart_check(entry, chart, samples: int = 10, seed: int = 0, tol: float = 1e-10) -> dict:
    """Evaluate the chart's pairwise Poisson brackets at seeded random points and compare with the table."""
    m = entry.dimension
    xs = coordinate_symbols(m)
    comps = {name: sympy_expr(text, m, entry.params) for name, text in chart.components.items()}
    grads = {name: [sympy.diff(e, x) for x in xs] for name, e in comps.items()}
    lam = {k: sympy_expr(format_scalar(c), m) for k, c in entry.ps.bivector.comps.items()}
    brackets = {}
    for f, g, _ in chart.canonical:
        expr = sum(c * (grads[f][i] * grads[g][j] - grads[f][j] * grads[g][i]) for (i, j), c in lam.items())
        brackets[(f, g)] = sympy.lambdify(xs, expr, modules="math")
    dens = [sympy.lambdify(xs, sympy_expr(format_scalar(entry.ring(d)), m), modules="math")
            for d in entry.ring.denominators]
    rng = np.random.default_rng(seed)
    worst = 0.0
    done = 0
    while done < samples:
        pt = [float(v) for v in rng.uniform(-2, 2, size=m)]
        if any(abs(d(*pt)) < 0.1 for d in dens):
            continue
        done += 1
        for f, g, want in chart.canonical:
            got = brackets[(f, g)](*pt)
            worst = max(worst, abs(got - float(want)) / max(1.0, abs(float(want))))
    ok = worst <= tol
    return {"ok": ok, "detail": f"{samples} samples, worst bracket error {worst:.2e}"}
