import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tpcohomology.cohomology import (
    TruncationSpec,
    assemble_matrix,
    casimir_basis,
    cocycle_window,
    is_exact,
    tangential_cocycles,
    truncated_dimensions,
)
from tpcohomology.cohomology import _combine
from tpcohomology.errors import CodomainOverflow, NotACocycle
from tpcohomology.sampling import random_poly
from tpcohomology.schouten import hamiltonian_field, sigma
from tpcohomology.splitting import sigma_dd
from tpcohomology.tensors import MultiVec

from conftest import ENTRIES, cached_entry


def kernel_strings(matrix):
    return sorted(str(_combine(matrix.domain_basis, c)) for c in matrix.nullspace())


def test_heisenberg_functions_of_x3(heisenberg):
    M = assemble_matrix(heisenberg.splitting, "sigma_dd", TruncationSpec(2, 1, (0, 0)), TruncationSpec(3, 2, (0, 1)))
    assert kernel_strings(M) == sorted(["1/x3", "1", "x3", "x3^2"])


def test_g41_casimirs_in_degree_two(g41):
    M = assemble_matrix(g41.splitting, "sigma", TruncationSpec(2), TruncationSpec(3), degree=0)
    assert len(M.nullspace()) == 4
    assert kernel_strings(M) == sorted(["1", "x1", "x1^2", "x2^2 - 2*x1*x3"])


def test_empty_truncation_gives_empty_matrix(heisenberg):
    M = assemble_matrix(heisenberg.splitting, "sigma", TruncationSpec(-1), TruncationSpec(2), degree=0)
    assert M.shape == (0, 0)


def test_codomain_overflow(su2):
    with pytest.raises(CodomainOverflow):
        assemble_matrix(su2.splitting, "sigma", TruncationSpec(2), TruncationSpec(1), degree=0)


@pytest.mark.parametrize("name, degree, expected", [
    ("su2", 2, ["1", "x1^2 + x2^2 + x3^2"]),
    ("sl2", 2, ["1", "x1^2 + x2^2 - x3^2"]),
    ("book", 4, ["1"]),
    ("grelaud", 4, ["1"]),
    ("g41", 2, ["1", "x1", "x1^2", "x2^2 - 2*x1*x3"]),
])
def test_casimir_basis(name, degree, expected):
    e = cached_entry(name)
    basis = casimir_basis(e.ps, TruncationSpec(degree))
    assert sorted(str(c) for c in basis) == sorted(expected)
    assert all(not hamiltonian_field(e.ps, c) for c in basis)


def test_g41_multiples_of_the_tensor_are_exact(g41):
    rng = random.Random(5)
    for _ in range(5):
        phi = g41.ring(random_poly(rng, 4, 2))
        verdict = is_exact(g41.splitting, g41.ps.bivector * phi)
        assert verdict.exact
        assert sigma(g41.ps, verdict.witness) == g41.ps.bivector * phi


def test_zero_is_exact(su2):
    verdict = is_exact(su2.splitting, MultiVec.zero(su2.ring, 2))
    assert verdict.exact and not verdict.witness


def test_heisenberg_closed_field_is_exact(heisenberg):
    X = hamiltonian_field(heisenberg.ps, heisenberg.scalar("x2^3")) * heisenberg.scalar("1/x3")
    verdict = is_exact(heisenberg.splitting, X, slack=2)
    assert verdict.exact
    assert sigma(heisenberg.ps, verdict.witness) == X


def test_non_cocycle_is_rejected(heisenberg):
    with pytest.raises(NotACocycle):
        is_exact(heisenberg.splitting, heisenberg.multivec("x1*e1"))
    with pytest.raises(NotACocycle):
        is_exact(heisenberg.splitting, heisenberg.multivec("e3"))


def test_su2_tensor_is_only_exact_in_full_complex(su2):
    for slack in range(3):
        assert not is_exact(su2.splitting, su2.ps.bivector, slack=slack).exact
    verdict = is_exact(su2.splitting, su2.ps.bivector, slack=0, full_complex=True)
    assert verdict.exact
    assert verdict.witness == su2.multivec("x1*e1 + x2*e2 + x3*e3")


def test_su2_truncated_dimensions(su2):
    r1 = truncated_dimensions(su2.splitting, 1, TruncationSpec(3, 0), slack=2)
    assert r1.quotient_dim == 0 and r1.rank_nullity_ok
    r2 = truncated_dimensions(su2.splitting, 2, TruncationSpec(2, 1), slack=2)
    assert r2.quotient_dim >= 2 and r2.rank_nullity_ok
    reps = {str(r) for r in r2.representatives}
    assert {str(su2.ps.bivector), str(su2.ps.bivector * su2.scalar("1/(x1^2 + x2^2 + x3^2)"))} <= reps
    assert r2.truncation_dependent


def test_su2_invariant_multiples_need_degree_three(su2):
    report = truncated_dimensions(su2.splitting, 2, TruncationSpec(3, 0), slack=2)
    reps = {str(r) for r in report.representatives}
    assert str(su2.ps.bivector * su2.scalar("x1^2 + x2^2 + x3^2")) in reps


def test_no_cochains_beyond_leaf_dimension(entry):
    report = truncated_dimensions(entry.splitting, 3, TruncationSpec(1, 0), slack=1)
    assert report.domain_dim == 0 and report.quotient_dim == 0


@pytest.mark.parametrize("name", ENTRIES)
def test_rank_nullity(name):
    s = cached_entry(name).splitting
    for q in range(3):
        assert truncated_dimensions(s, q, TruncationSpec(1, 1), slack=1).rank_nullity_ok


def test_cocycle_window(heisenberg):
    assert cocycle_window(heisenberg.multivec("x1^2/x3*e1")) == TruncationSpec(1, (1,))


@settings(max_examples=10, deadline=None)
@given(st.sampled_from(["heisenberg", "affine", "e2", "su2"]), st.integers(0, 10**6))
def test_slack_monotonicity(name, seed):
    e = cached_entry(name)
    s = e.splitting
    cocycles = tangential_cocycles(s, 1, TruncationSpec(1, 1))
    if not cocycles:
        return
    rng = random.Random(seed)
    X = cocycles[rng.randrange(len(cocycles))]
    assert not sigma_dd(s, X)
    verdicts = [is_exact(s, X, slack=k).exact for k in range(3)]
    assert verdicts == sorted(verdicts)
