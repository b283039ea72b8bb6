import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tpcohomology.catalog import (
    available_entries,
    closed_form_assembly,
    closed_form_hypotheses,
    g41_tangential_homotopy,
    lie_poisson,
    lie_spec,
    load_entry,
    verify_entry,
)
from tpcohomology.cohomology import TruncationSpec, casimir_basis
from tpcohomology.errors import CatalogLoadError, ConfigError, HypothesisFailure, JacobiViolation
from tpcohomology.sampling import random_poly
from tpcohomology.schouten import sigma
from tpcohomology.splitting import sigma_dd
from tpcohomology.tensors import MultiVec

from conftest import ENTRIES, SEED, cached_entry

CASIMIRS = {
    "heisenberg": ["x3"],
    "e2": ["x2^2 + x3^2"],
    "affine": ["x3"],
    "su2": ["x1^2 + x2^2 + x3^2"],
    "sl2": ["x1^2 + x2^2 - x3^2"],
    "h": ["x2*x3"],
    "g41": ["x1", "x2^2 - 2*x1*x3"],
}


def test_catalog_lists_every_algebra():
    assert len(available_entries()) == 12
    for name in ["heisenberg", "e2", "affine", "book", "grelaud", "tau_gt1", "shear",
                 "h", "tau_lt_m1", "su2", "sl2", "g41"]:
        assert name in available_entries()


def test_unknown_entry():
    with pytest.raises(CatalogLoadError):
        load_entry("nonexistent")


def test_structure_constants_are_antisymmetric(entry):
    spec = entry.spec
    for i in range(spec.dimension):
        for j in range(spec.dimension):
            a = spec.bracket(i, j)
            b = spec.bracket(j, i)
            assert {k: -v for k, v in b.items()} == a
    assert not spec.jacobi_defects()


def test_lie_poisson_examples(heisenberg, g41):
    assert heisenberg.ps.bivector == heisenberg.multivec("x3*e1^e2")
    assert g41.ps.bivector == g41.multivec("x2*e4^e3 + x1*e4^e2")
    rebuilt = lie_poisson(lie_spec(3, {"1,2": "X3"}), heisenberg.ring)
    assert rebuilt.bivector == heisenberg.ps.bivector


def test_pseudo_spec_fails_strict_loading():
    with pytest.raises(JacobiViolation):
        lie_spec(3, {"1,2": "X3", "2,3": "X2"})


def test_parameterised_entries():
    e = load_entry("grelaud", {"sigma": Fraction(1, 2)})
    assert verify_entry(e, numeric=False).ok
    t = load_entry("tau_gt1", {"tau": 3})
    assert verify_entry(t, numeric=False).ok
    with pytest.raises(ConfigError):
        load_entry("tau_gt1", {"tau": Fraction(1, 2)})


@pytest.mark.parametrize("name", ENTRIES)
def test_verify_entry(name):
    report = verify_entry(cached_entry(name), seed=SEED)
    assert report.ok, [c.to_dict() for c in report.checks if not c.ok]
    data = report.to_dict()
    assert data["passed"] == data["total"]


@pytest.mark.parametrize("name", sorted(CASIMIRS))
def test_declared_casimirs(name):
    e = cached_entry(name)
    assert sorted(str(c) for c in e.casimirs) == sorted(CASIMIRS[name])
    for c in e.casimirs:
        assert not sigma(e.ps, MultiVec.scalar(c))


@pytest.mark.parametrize("name, check", [
    ("affine", "chart:"),
    ("heisenberg", "chart:"),
    ("sl2", "identity:"),
    ("su2", "coboundary:"),
])
def test_entry_specific_checks(name, check):
    report = verify_entry(cached_entry(name), numeric=False)
    hits = [c for c in report.checks if c.name.startswith(check)]
    assert hits and all(c.passed for c in hits)


def test_grelaud_has_no_polynomial_invariant():
    e = cached_entry("grelaud")
    assert [str(c) for c in casimir_basis(e.ps, TruncationSpec(4))] == ["1"]


@pytest.mark.parametrize("phi, expected", [
    ("1", "x4*e4"),
    ("0", "0"),
    ("x1*x4^2", "1/3*x1*x4^3*e4"),
])
def test_g41_homotopy_examples(g41, phi, expected):
    f = g41.scalar(phi)
    B = g41_tangential_homotopy(f, g41)
    assert B == g41.multivec(expected, 1)
    assert sigma_dd(g41.splitting, B) == g41.ps.bivector * f


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_g41_homotopy_random(seed):
    g41 = cached_entry("g41")
    phi = g41.ring(random_poly(random.Random(seed), 4, 4))
    B = g41_tangential_homotopy(phi, g41)
    assert g41.splitting.tangential_part(B) == B
    assert sigma(g41.ps, B) == g41.ps.bivector * phi


@pytest.mark.parametrize("name", ["h", "sl2"])
def test_closed_form_hypotheses_hold(name):
    hyp = closed_form_hypotheses(cached_entry(name))
    hyp.pop("_splitting")
    assert hyp["d_beta_zero"] and hyp["sigma_dd_X_zero"] and hyp["beta_kills_leaves"]
    assert hyp["beta_of_X"] == "1"


def test_closed_form_assembly_h():
    report = closed_form_assembly(cached_entry("h"), TruncationSpec(1, 1), slack=1)
    labels = [s.label for s in report.slices]
    assert labels == ["H1:Ker(p)", "H1:Im(p)", "H2:H2tan/sigma(V10)", "H2:H1(P1)", "H3:V12/sigma(V11)"]
    assert report.to_dict()["entry"] == "h"


def test_book_avatar_fails_hypotheses():
    book = cached_entry("book")
    assert not closed_form_hypotheses(book)["d_beta_zero"]
    with pytest.raises(HypothesisFailure):
        closed_form_assembly(book)


def test_entry_without_defining_form():
    with pytest.raises(HypothesisFailure):
        closed_form_hypotheses(cached_entry("heisenberg"))
