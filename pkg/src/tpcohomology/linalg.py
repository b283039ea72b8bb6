"""Sparse Gauss-Jordan elimination over the rationals.

Vectors are dicts from arbitrary hashable row keys to ``int``/``Fraction``
entries.  The eliminator keeps its basis fully reduced (every stored vector is
zero at every other pivot), so reducing a new vector never re-introduces a
pivot that was already cleared.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

from .ring import _norm


def height(c) -> int:
    if type(c) is int:
        return abs(c)
    return abs(c.numerator) + c.denominator


def _inv(c):
    if c == 1:
        return 1
    if c == -1:
        return -1
    return _norm(Fraction(1) / c)


def _axpy(target: dict, coeff, source: Mapping):
    """target -= coeff * source, dropping zeros."""
    for k, v in source.items():
        new = target.get(k, 0) - coeff * v
        if new:
            target[k] = _norm(new) if type(new) is Fraction else new
        else:
            target.pop(k, None)


class Eliminator:
    """Incremental reduced echelon form; optionally tracks combinations of inserted vectors."""

    def __init__(self, track: bool = False):
        self.track = track
        self.basis: dict = {}      # pivot key -> reduced vector (pivot entry 1)
        self.combos: dict = {}     # pivot key -> {tag: coeff}
        self.rows: dict = {}       # row key -> set of pivots whose vector touches it
        self.relations: list = []  # combos of inserted vectors that reduced to zero

    @property
    def rank(self) -> int:
        return len(self.basis)

    def reduce(self, vec: Mapping, combo: dict | None = None):
        v = dict(vec)
        hits = [k for k in v if k in self.basis]
        for p in hits:
            c = v.get(p)
            if not c:
                continue
            _axpy(v, c, self.basis[p])
            if combo is not None:
                _axpy(combo, c, self.combos[p])
        return v

    def contains(self, vec: Mapping) -> bool:
        return not self.reduce(vec)

    def express(self, vec: Mapping):
        """Coefficients over the inserted tags reproducing ``vec``, or ``None`` if outside the span."""
        combo: dict = {}
        v = dict(vec)
        hits = [k for k in v if k in self.basis]
        for p in hits:
            c = v.get(p)
            if not c:
                continue
            _axpy(v, c, self.basis[p])
            _axpy(combo, -c, self.combos[p])
        if v:
            return None
        return combo

    def add(self, vec: Mapping, tag: Hashable = None) -> bool:
        """Insert a vector; True when it enlarges the span."""
        combo = {tag: 1} if self.track else None
        v = self.reduce(vec, combo)
        if not v:
            if self.track:
                self.relations.append(combo)
            return False
        pivot = min(v, key=lambda k: (height(v[k]), k))
        inv = _inv(v[pivot])
        if inv != 1:
            v = {k: _norm(c * inv) for k, c in v.items()}
            if combo is not None:
                combo = {k: _norm(c * inv) for k, c in combo.items()}
        for p in list(self.rows.get(pivot, ())):
            b = self.basis[p]
            c = b.get(pivot)
            if not c:
                continue
            before = set(b)
            _axpy(b, c, v)
            if self.track:
                _axpy(self.combos[p], c, combo)
            after = set(b)
            for k in before - after:
                self.rows[k].discard(p)
            for k in after - before:
                self.rows.setdefault(k, set()).add(p)
        self.basis[pivot] = v
        if self.track:
            self.combos[pivot] = combo
        for k in v:
            self.rows.setdefault(k, set()).add(pivot)
        return True


def rank(vectors: Iterable[Mapping]) -> int:
    e = Eliminator()
    for v in vectors:
        e.add(v)
    return e.rank


def nullspace(columns: Sequence[Mapping]) -> list:
    """Basis of {c : sum_j c_j columns[j] = 0}, as dicts from column index to coefficient."""
    e = Eliminator(track=True)
    for j, col in enumerate(columns):
        e.add(col, j)
    return [r for r in e.relations if r]


def solve(columns: Sequence[Mapping], target: Mapping):
    """Some c with sum_j c_j columns[j] = target, or ``None``."""
    e = Eliminator(track=True)
    for j, col in enumerate(columns):
        e.add(col, j)
    combo = e.express(target)
    return combo


def rref_rows(rows: Sequence[Mapping], order: Sequence) -> list:
    """Reduced row echelon form with pivots chosen leftmost in ``order``."""
    position = {k: i for i, k in enumerate(order)}
    work = [dict(r) for r in rows if r]
    out: list = []
    while work:
        best = min(range(len(work)), key=lambda i: min(position[k] for k in work[i]))
        row = work.pop(best)
        pivot = min(row, key=lambda k: position[k])
        inv = _inv(row[pivot])
        row = {k: _norm(c * inv) for k, c in row.items()}
        for other in out:
            c = other.get(pivot)
            if c:
                _axpy(other, c, row)
        nxt = []
        for w in work:
            c = w.get(pivot)
            if c:
                _axpy(w, c, row)
            if w:
                nxt.append(w)
        work = nxt
        out.append(row)
    return out


@dataclass
class ExactMatrix:
    """Sparse rational matrix with labelled rows and columns."""

    row_labels: list
    col_labels: list
    entries: dict = field(default_factory=dict)  # (row index, col index) -> rational

    @property
    def shape(self):
        return (len(self.row_labels), len(self.col_labels))

    def columns(self) -> list:
        cols = [dict() for _ in self.col_labels]
        for (i, j), v in self.entries.items():
            cols[j][i] = v
        return cols

    def rank(self) -> int:
        return rank(self.columns())

    def nullspace(self) -> list:
        return nullspace(self.columns())

    def to_dense(self) -> list:
        m, n = self.shape
        out = [[Fraction(0)] * n for _ in range(m)]
        for (i, j), v in self.entries.items():
            out[i][j] = Fraction(v)
        return out
