import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tpcohomology.errors import ConfigError, QuadratureFailure
from tpcohomology.obstruction import (
    CONVERGENT,
    INCONCLUSIVE,
    POWER_LAW,
    SUPER_POLYNOMIAL,
    check_grid,
    classify,
    entry_obstructions,
    evaluate_obstruction,
    h_chart,
    implicit_chart_check,
    independence_certificate,
    matches_expectation,
    obstruction_from_expression,
    sl2_point,
    sympy_expr,
)

from conftest import cached_entry

GRID = [0.2, 0.1, 0.05, 0.02, 0.01]


def spec(kind, text, dimension, alpha=None, name=""):
    return obstruction_from_expression(kind, sympy_expr(text, dimension), dimension, name, alpha=alpha)


def g41_arctan(x):
    return 2.0 / x**2 * math.atan(1.0 / x)


def h_arctan(u):
    return math.atan(1.0 / u) / (2.0 * u)


def sl2_arctan(z):
    return 2 * math.pi * math.sqrt(2) / z * math.atan(math.sqrt(2) / z)


@pytest.mark.parametrize("kind, text, dimension, oracle", [
    ("G41", "1/(x1^2 + x2^2)", 4, g41_arctan),
    ("HAlgebra", "1/(x2^2 + x3^2)", 3, h_arctan),
    ("SL2", "1/(x1^2 + x2^2 + x3^2)", 3, sl2_arctan),
])
def test_quadrature_matches_closed_forms(kind, text, dimension, oracle):
    s = spec(kind, text, dimension)
    for p in GRID:
        assert s.integral(p) == pytest.approx(oracle(p), rel=1e-8)


def test_g41_value_at_one_tenth():
    assert spec("G41", "1/(x1^2 + x2^2)", 4).integral(0.1) == pytest.approx(294.2255, abs=1e-4)


@pytest.mark.parametrize("kind, text, dimension, exponent", [
    ("G41", "1/(x1^2 + x2^2)", 4, 2.0),
    ("HAlgebra", "1/(x2^2 + x3^2)", 3, 1.0),
    ("SL2", "1/(x1^2 + x2^2 + x3^2)", 3, 1.0),
    ("SL2", "1/(x1^2 + x2^2 + x3^2)^2", 3, 3.0),
])
def test_power_law_exponents(kind, text, dimension, exponent):
    verdict = evaluate_obstruction(spec(kind, text, dimension), GRID)
    assert verdict.classification == POWER_LAW
    assert verdict.exponent == pytest.approx(exponent, rel=0.05)


def test_exact_direction_converges():
    verdict = evaluate_obstruction(spec("G41", "x1", 4), GRID)
    assert verdict.classification == CONVERGENT
    assert verdict.limit == pytest.approx(2.0, rel=1e-10)


def test_h_chart_lands_on_the_level_set():
    for u, v in [(0.3, 0.4), (0.3, -0.4), (0.5, 0.0), (1e-3, 2.0)]:
        x2, x3 = h_chart(u, v)
        assert x2 * x3 == pytest.approx(u)
        assert (x2**2 + x3**2) ** 2 == pytest.approx(4 * (u * u + v * v))


def test_sl2_point_on_hyperboloid():
    x = np.array(sl2_point(0.7, 1.3, 0.2))
    assert x[0] ** 2 + x[1] ** 2 - x[2] ** 2 == pytest.approx(0.04)


def test_classify_edge_cases():
    params = [0.5, 0.25, 0.125, 0.0625, 0.03125]
    assert classify(params, [1.0] * 5).classification == CONVERGENT
    assert classify(params, [p for p in params]).classification == CONVERGENT
    assert classify(params, [math.exp(1 / p) for p in params]).classification == SUPER_POLYNOMIAL
    assert classify(params, [1.0, 3.0, 2.0, 5.0, 1.0]).classification == INCONCLUSIVE


@settings(max_examples=40, deadline=None)
@given(st.floats(0.5, 6.0), st.floats(0.1, 10.0))
def test_classify_recovers_synthetic_power_laws(exponent, scale):
    params = [0.2, 0.1, 0.05, 0.02, 0.01]
    verdict = classify(params, [scale * p**-exponent for p in params])
    assert verdict.classification == POWER_LAW
    assert verdict.exponent == pytest.approx(exponent, rel=1e-6)


@pytest.mark.parametrize("grid", [[0.2, 0.1], [0.1, 0.2, 0.05, 0.02, 0.01], [0.2, 0.1, 0.05, 0.0, -0.1]])
def test_bad_grids(grid):
    with pytest.raises(ConfigError):
        check_grid(grid)


def test_overflowing_integrand_raises_quadrature_failure():
    s = spec("G41", "x1*exp(1/(x1**2 + x2**2))", 4)
    with pytest.raises(QuadratureFailure):
        evaluate_obstruction(s, [0.2, 0.1, 0.05, 0.02, 0.01])


def test_unknown_kind():
    with pytest.raises(ConfigError):
        spec("Nope", "x1", 3)


@pytest.mark.parametrize("name", ["g41", "h", "sl2"])
def test_catalog_obstructions_match_expectations(name):
    for group, specs, grid in entry_obstructions(cached_entry(name)):
        for s in specs:
            verdict = evaluate_obstruction(s, grid)
            assert matches_expectation(s, verdict), (group, s.name, verdict.to_dict())


@pytest.mark.parametrize("name", ["g41", "h", "sl2"])
def test_refinement_keeps_power_laws_divergent(name):
    for group, specs, grid in entry_obstructions(cached_entry(name)):
        for s in specs:
            if s.family != "power":
                continue
            refined = grid + [grid[-1] / 2]
            assert evaluate_obstruction(s, refined).classification != CONVERGENT


def test_g41_independence_certificate():
    family = entry_obstructions(cached_entry("g41"))[0][1]
    report = independence_certificate(family, GRID)
    assert report.independent
    assert report.exponents == pytest.approx([2.0, 4.0, 6.0], rel=0.05)
    holds = {row["parameter"]: row["holds"] for row in report.envelope}
    assert all(holds[x] for x in GRID if x <= 0.05)
    assert report.summary().startswith("claim supported by 3 independent certified classes")


def test_singleton_family_is_trivially_independent():
    family = entry_obstructions(cached_entry("g41"))[0][1][:1]
    report = independence_certificate(family, GRID)
    assert report.independent and report.exponents[0] == pytest.approx(2.0, rel=0.05)


def test_sl2_family_exponents():
    family = entry_obstructions(cached_entry("sl2"))[0][1]
    report = independence_certificate(family, GRID)
    assert report.independent
    assert report.exponents == pytest.approx([1.0, 3.0], rel=0.05)


@pytest.mark.parametrize("name", ["g41", "h", "sl2"])
def test_exp_families_dominate_each_other(name):
    groups = {g: (specs, grid) for g, specs, grid in entry_obstructions(cached_entry(name))}
    specs, grid = groups["k"]
    report = independence_certificate(specs, grid)
    assert all(v.classification == SUPER_POLYNOMIAL for v in report.verdicts)
    assert report.independent


def test_mixed_kinds_rejected():
    with pytest.raises(ConfigError):
        independence_certificate([spec("G41", "x1", 4, 1.0), spec("SL2", "x1", 3, 2.0)], GRID)


def test_implicit_chart_examples():
    report = implicit_chart_check("tau", [(1.0, 0.0)], tau=2.0)
    assert report.ok and report.samples[0].t == pytest.approx(0.0, abs=1e-15)
    report = implicit_chart_check("tau", [(2.0, 1.0)], tau=2.0)
    assert report.ok and report.samples[0].derivative_error < 1e-6
    report = implicit_chart_check("shear", [(0.0, 1.0)])
    assert report.ok and report.samples[0].circle_error < 1e-12


def test_implicit_chart_rejects_origin_and_bad_tau():
    assert not implicit_chart_check("shear", [(0.0, 0.0)]).ok
    with pytest.raises(ConfigError):
        implicit_chart_check("tau", [(1.0, 1.0)], tau=0.5)
    with pytest.raises(ConfigError):
        implicit_chart_check("spiral", [(1.0, 1.0)])


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["tau", "shear"]), st.floats(-3, 3), st.floats(-3, 3))
def test_implicit_charts_on_random_points(family, x2, x3):
    if math.hypot(x2, x3) < 0.05:
        return
    assert implicit_chart_check(family, [(x2, x3)], tau=3.0).ok
