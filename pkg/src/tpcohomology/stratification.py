"""Jump indices, layers and orbit separation for Lie-Poisson structures at rational points."""
from __future__ import annotations

import csv
import io
import random
from fractions import Fraction
from typing import Sequence

from .catalog import CatalogEntry, LieSpec
from .errors import DimensionMismatch, NotAFlag, PointOutsideOmega
from .linalg import Eliminator, rank
from .ring import LocElem


def _point(spec_dim: int, mu: Sequence) -> list:
    if len(mu) != spec_dim:
        raise DimensionMismatch(f"point has {len(mu)} coordinates, algebra has dimension {spec_dim}")
    return [Fraction(c) for c in mu]


def pairing_matrix(spec: LieSpec, mu: Sequence) -> list:
    """M[i][j] = <mu, [X_i, X_j]>; its kernel is the stabilizer of mu."""
    mu = _point(spec.dimension, mu)
    m = spec.dimension
    M = [[Fraction(0)] * m for _ in range(m)]
    for (i, j), vec in spec.constants.items():
        v = sum((c * mu[k] for k, c in vec.items()), Fraction(0))
        M[i][j] = v
        M[j][i] = -v
    return M


def matrix_rank(M: Sequence[Sequence]) -> int:
    return rank({j: c for j, c in enumerate(row) if c} for row in M)


def stabilizer(spec: LieSpec, mu: Sequence) -> list:
    """Basis of g_mu as coefficient vectors."""
    M = pairing_matrix(spec, mu)
    e = Eliminator(track=True)
    m = spec.dimension
    for j in range(m):
        e.add({i: M[i][j] for i in range(m) if M[i][j]}, j)
    out = []
    for rel in e.relations:
        out.append([Fraction(rel.get(j, 0)) for j in range(m)])
    return out


def is_jordan_holder(spec: LieSpec, basis: Sequence[Sequence]) -> bool:
    """True when [g, span(Y_1..Y_j)] lies in span(Y_1..Y_{j-1}) for every j."""
    m = spec.dimension
    units = [[Fraction(int(a == b)) for a in range(m)] for b in range(m)]
    for j in range(1, m + 1):
        e = Eliminator()
        for y in basis[: j - 1]:
            e.add({k: c for k, c in enumerate(y) if c})
        for x in units:
            w = spec.bracket_vectors(x, basis[j - 1])
            if not e.contains({k: c for k, c in enumerate(w) if c}):
                return False
    return True


def _order_basis(spec: LieSpec, order: Sequence[int]) -> list:
    m = spec.dimension
    if sorted(order) != list(range(m)):
        raise NotAFlag(f"{[k + 1 for k in order]} is not a permutation of the basis")
    return [[Fraction(int(a == k)) for a in range(m)] for k in order]


def jump_positions(spec: LieSpec, basis: Sequence[Sequence], mu: Sequence) -> list:
    """Positions j (1-based) where the rank of the pairing restricted to span(Y_1..Y_j) grows.

    Rows of M(mu) for the flag are added one at a time; the row space of the first j
    rows has dimension dim(g_j + g_mu) - dim(g_mu), so the rank jumps exactly when
    Y_j is not in g_{j-1} + g_mu.
    """
    M = pairing_matrix(spec, mu)
    m = spec.dimension
    e = Eliminator()
    out = []
    for pos, y in enumerate(basis):
        row = {}
        for i, c in enumerate(y):
            if c:
                for k in range(m):
                    if M[i][k]:
                        row[k] = row.get(k, 0) + c * M[i][k]
        if e.add({k: v for k, v in row.items() if v}):
            out.append(pos + 1)
    return out


def jump_indices(spec: LieSpec, jh_order: Sequence[int], mu: Sequence, check_flag: bool = False) -> tuple:
    """J_mu for the basis reordered by ``jh_order`` (0-based), reported as 1-based basis labels."""
    basis = _order_basis(spec, jh_order)
    if check_flag and not is_jordan_holder(spec, basis):
        raise NotAFlag(f"order {[k + 1 for k in jh_order]} is not a Jordan-Holder flag")
    positions = jump_positions(spec, basis, mu)
    return tuple(sorted(jh_order[p - 1] + 1 for p in positions))


def jump_indices_by_membership(spec: LieSpec, jh_order: Sequence[int], mu: Sequence) -> tuple:
    """Same set as :func:`jump_indices`, computed by testing X_j against g_{j-1} + g_mu."""
    basis = _order_basis(spec, jh_order)
    e = Eliminator()
    for v in stabilizer(spec, mu):
        e.add({k: c for k, c in enumerate(v) if c})
    out = []
    for pos, y in enumerate(basis):
        if e.add({k: c for k, c in enumerate(y) if c}):
            out.append(jh_order[pos] + 1)
    return tuple(sorted(out))


def in_omega(entry: CatalogEntry, mu: Sequence) -> bool:
    mu = _point(entry.dimension, mu)
    return all(d.evaluate(mu) != 0 for d in entry.ring.denominators)


def _require_omega(entry: CatalogEntry, mu: Sequence):
    if not in_omega(entry, mu):
        raise PointOutsideOmega(f"{[str(c) for c in mu]} lies on a declared denominator of {entry.name}")


def separation_witness(entry: CatalogEntry, invariants: Sequence[LocElem], pairs: Sequence) -> tuple | None:
    """First pair of points (on distinct orbits) where every invariant takes the same value."""
    for a, b in pairs:
        _require_omega(entry, a)
        _require_omega(entry, b)
        pa = _point(entry.dimension, a)
        pb = _point(entry.dimension, b)
        if all(f.evaluate(pa) == f.evaluate(pb) for f in invariants):
            return (tuple(pa), tuple(pb))
    return None


def declared_separation(entry: CatalogEntry) -> dict | None:
    """Run separation_witness on the entry's declared invariants and distinct-orbit pairs."""
    data = entry.raw.get("separation")
    if data is None:
        return None
    invariants = [entry.scalar(f) for f in data["invariants"]]
    pairs = [tuple(p["points"]) for p in data["pairs"]]
    witness = separation_witness(entry, invariants, pairs)
    return {
        "invariants": list(data["invariants"]),
        "pairs": len(pairs),
        "separated": witness is None,
        "witness": None if witness is None else [[str(c) for c in pt] for pt in witness],
    }


def invariant_jacobian_rank(invariants: Sequence[LocElem], mu: Sequence) -> int:
    if not invariants:
        return 0
    ring = invariants[0].ring
    mu = _point(ring.nvars, mu)
    if any(d.evaluate(mu) == 0 for d in ring.denominators):
        raise PointOutsideOmega("point lies on a declared denominator")
    rows = [[f.diff(i).evaluate(mu) for i in range(ring.nvars)] for f in invariants]
    return matrix_rank(rows)


def generic_membership(entry: CatalogEntry, mu: Sequence) -> bool:
    """True when J_mu equals the entry's declared first-layer jump set."""
    _require_omega(entry, mu)
    if entry.jh_order is None or entry.generic_jump_set is None:
        raise NotAFlag(f"entry {entry.name} declares no Jordan-Holder data")
    return jump_indices(entry.spec, entry.jh_order, mu) == entry.generic_jump_set


def _parabolic(mu, s, t):
    m1, m2, m3, _ = mu
    return (m1, s, (2 * m1 * m3 - m2 * m2 + s * s) / (2 * m1), m1 * t)


def _affine(mu, s, t):
    _, m2, _, _ = mu
    return (Fraction(0), m2, s, m2 * t)


# g41 coadjoint orbits through a base point, as functions of two rational parameters
_ORBIT_KINDS = {"parabolic": _parabolic, "affine": _affine}


def orbit_points(entry: CatalogEntry) -> list:
    """(base point, points on its coadjoint orbit) for each declared orbit parametrization."""
    out = []
    for item in entry.raw.get("orbit_parametrizations", []):
        mu = _point(entry.dimension, item["base"])
        fn = _ORBIT_KINDS[item["kind"]]
        out.append((tuple(mu), [tuple(fn(mu, Fraction(s), Fraction(t))) for s, t in item["steps"]]))
    return out


def random_points(rng: random.Random, dimension: int, count: int, bound: int = 3) -> list:
    return [[Fraction(rng.randint(-bound, bound)) for _ in range(dimension)] for _ in range(count)]


def layer_rows(entry: CatalogEntry, points: Sequence | None = None) -> list:
    """(point, J_mu, rank, generic flag) for the entry's sample points or the given ones."""
    pts = entry.samples() if points is None else [_point(entry.dimension, p) for p in points]
    order = entry.jh_order or list(range(entry.dimension))
    rows = []
    for mu in pts:
        J = jump_indices(entry.spec, order, mu)
        inside = in_omega(entry, mu)
        generic = inside and entry.generic_jump_set is not None and J == entry.generic_jump_set
        rows.append({
            "point": " ".join(str(c) for c in mu),
            "jump_set": " ".join(str(j) for j in J),
            "rank": matrix_rank(pairing_matrix(entry.spec, mu)),
            "in_omega": inside,
            "generic": generic,
        })
    return rows


def layers_csv(entry: CatalogEntry, points: Sequence | None = None) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=["entry", "point", "jump_set", "rank", "in_omega", "generic"])
    writer.writeheader()
    for row in layer_rows(entry, points):
        writer.writerow({"entry": entry.name, **row})
    return buf.getvalue()
