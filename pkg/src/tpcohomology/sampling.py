"""Seeded random elements for property checks and verification reports."""
from __future__ import annotations

import random
from itertools import combinations

from .ring import LocElem, Poly, RingSpec
from .tensors import KForm, MultiVec


def random_poly(rng: random.Random, nvars: int, max_degree: int, terms: int = 3, coeff: int = 5) -> Poly:
    out = {}
    for _ in range(terms):
        d = rng.randint(0, max_degree)
        exps = [0] * nvars
        for _ in range(d):
            exps[rng.randrange(nvars)] += 1
        out[tuple(exps)] = rng.randint(-coeff, coeff)
    return Poly(nvars, out)


def random_element(
    rng: random.Random,
    ring: RingSpec,
    max_degree: int = 2,
    max_den: int = 1,
    terms: int = 3,
) -> LocElem:
    den = tuple(rng.randint(0, max_den) for _ in ring.denominators)
    return LocElem(ring, random_poly(rng, ring.nvars, max_degree, terms), den)


def random_multivec(rng: random.Random, ring: RingSpec, degree: int, max_degree: int = 2, max_den: int = 1,
                    density: float = 0.7) -> MultiVec:
    comps = {}
    for idx in combinations(range(ring.nvars), degree):
        if rng.random() < density:
            comps[idx] = random_element(rng, ring, max_degree, max_den)
    return MultiVec(ring, degree, comps)


def random_form(rng: random.Random, ring: RingSpec, degree: int, max_degree: int = 2, max_den: int = 1,
                density: float = 0.7) -> KForm:
    comps = {}
    for idx in combinations(range(ring.nvars), degree):
        if rng.random() < density:
            comps[idx] = random_element(rng, ring, max_degree, max_den)
    return KForm(ring, degree, comps)
