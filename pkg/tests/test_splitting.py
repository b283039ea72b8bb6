import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tpcohomology.errors import NotHomogeneous, NotTransversal, RankDefect
from tpcohomology.sampling import random_form, random_multivec
from tpcohomology.schouten import exterior_derivative, hamiltonian_field, sigma, tilde_sharp
from tpcohomology.splitting import (
    check_intertwining,
    d_components,
    d_dd,
    intertwining_holds,
    make_splitting,
    sigma_components,
    sigma_dd,
)
from tpcohomology.tensors import KForm, MultiVec

from conftest import ENTRIES, cached_entry


def pairing(frame, coframe):
    return [[beta.evaluate([X]) for X in frame] for beta in coframe]


def test_heisenberg_frame_is_dual(heisenberg):
    s = heisenberg.splitting
    frame = s.tangential + s.transversal
    coframe = s.tangential_coframe + s.transversal_coframe
    ring = heisenberg.ring
    for i, row in enumerate(pairing(frame, coframe)):
        assert row == [ring.one if i == j else ring.zero for j in range(3)]


def test_su2_euler_transversal(su2):
    euler = su2.multivec("x1*e1 + x2*e2 + x3*e3")
    s = make_splitting(su2.ps, [euler])
    assert s.transversal_coframe[0].evaluate([euler]) == su2.ring.one


def test_tangent_field_is_not_transversal(heisenberg):
    H = hamiltonian_field(heisenberg.ps, heisenberg.scalar("x1"))
    with pytest.raises(NotTransversal):
        make_splitting(heisenberg.ps, [H])


def test_wrong_frame_size(heisenberg):
    with pytest.raises(RankDefect):
        make_splitting(heisenberg.ps, [])


def test_bigrade_examples(entry):
    s = entry.splitting
    assert s.bigrade(entry.ps.bivector).types() == [(0, 2)]
    X = s.transversal[0]
    assert s.bigrade(X).types() == [(1, 0)]


def test_h_mixed_components():
    h = cached_entry("h")
    bg = h.splitting.bigrade(h.multivec("x2*e2"))
    assert bg.types() == [(0, 1), (1, 0)]
    assert bg.total() == h.multivec("x2*e2")


def test_sigma_components_examples(su2, heisenberg):
    s = su2.splitting
    euler = su2.multivec("x1*e1 + x2*e2 + x3*e3")
    prime, second = sigma_components(s, euler)
    assert not second
    assert prime == su2.ps.bivector
    assert not any(sigma_components(s, su2.ps.bivector))
    H = hamiltonian_field(heisenberg.ps, heisenberg.scalar("x1^2"))
    prime, second = sigma_components(heisenberg.splitting, H)
    assert not prime
    assert second == sigma(heisenberg.ps, H)


def test_sigma_components_need_homogeneous_input(heisenberg):
    with pytest.raises(NotHomogeneous):
        sigma_components(heisenberg.splitting, heisenberg.multivec("e1 + e3"))


def test_d_components_examples(heisenberg):
    h = cached_entry("h")
    assert not any(d_components(h.splitting, h.form("x2*dx3 + x3*dx2")))
    s = heisenberg.splitting
    assert not d_dd(s, KForm.scalar(heisenberg.scalar("x3")))
    assert not any(d_components(s, heisenberg.form("dx1")))
    w = heisenberg.form("dx2/x3 - x2/x3^2*dx3")
    assert not exterior_derivative(w)
    tangential = d_components(s, s.component(w, (0, 1)))
    transversal = d_components(s, s.component(w, (1, 0)))
    assert tangential[0] == -transversal[1]
    assert not tangential[1] and not tangential[2] and not transversal[0]


def test_intertwining_heisenberg(heisenberg):
    report = check_intertwining(heisenberg.splitting, samples=50, max_degree=3, seed=7)
    assert report.ok, report.failures
    lhs, rhs = intertwining_holds(heisenberg.splitting, KForm.scalar(heisenberg.scalar("x3^2")))
    assert not lhs and not rhs


def test_intertwining_su2_area_form(su2):
    w = su2.form("x1*dx2^dx3 + x2*dx3^dx1 + x3*dx1^dx2")
    s = su2.splitting
    lhs, rhs = intertwining_holds(s, s.tangential_part(w))
    assert lhs == rhs


@pytest.mark.parametrize("name", ENTRIES)
def test_intertwining_every_entry(name):
    report = check_intertwining(cached_entry(name).splitting, samples=12, max_degree=2, seed=3)
    assert report.ok, report.failures


seeds = st.integers(0, 10**6)
names = st.sampled_from(ENTRIES)


@settings(max_examples=30, deadline=None)
@given(names, seeds, st.integers(0, 3), st.booleans())
def test_reconstruction(name, seed, degree, forms):
    e = cached_entry(name)
    if degree > e.dimension:
        degree = e.dimension
    rng = random.Random(seed)
    T = (random_form if forms else random_multivec)(rng, e.ring, degree, 2, 1)
    assert e.splitting.bigrade(T).total() == T


@settings(max_examples=25, deadline=None)
@given(names, seeds, st.integers(0, 2))
def test_sigma_dd_squares_to_zero(name, seed, q):
    e = cached_entry(name)
    s = e.splitting
    Q = s.tangential_part(random_multivec(random.Random(seed), e.ring, q, 2, 1))
    prime, second = sigma_components(s, Q)
    assert prime + second == sigma(e.ps, Q)
    if second:
        assert s.homogeneous_type(second) == (0, q + 1)
    assert not sigma_dd(s, second)


@settings(max_examples=25, deadline=None)
@given(names, seeds, st.integers(0, 1), st.integers(0, 2))
def test_d_dd_squares_to_zero(name, seed, p, q):
    e = cached_entry(name)
    s = e.splitting
    if p > s.ntransversal:
        p = 0
    w = s.component(random_form(random.Random(seed), e.ring, p + q, 2, 1), (p, q))
    parts = d_components(s, w)
    total = parts[0] + parts[1] + parts[2]
    assert total == exterior_derivative(w)
    assert not d_dd(s, parts[1])


@pytest.mark.parametrize("name", ["sl2", "h", "su2"])
def test_closed_defining_form_hypotheses(name):
    e = cached_entry(name)
    s = e.splitting
    beta = s.transversal_coframe[0]
    assert not d_dd(s, beta)
    assert not sigma_dd(s, s.transversal[0])
