"""Exact sparse row reduction for the large structured systems of graphical modules.

Rows are dicts column -> Fraction.  Entries are mostly 0 and small integers, so
elimination with a sparsest-row pivot rule keeps fill-in low.
"""
from __future__ import annotations

import heapq
from fractions import Fraction
from typing import Iterable, Sequence

SparseRow = dict[int, Fraction]


def sparse(v: Sequence) -> SparseRow:
    return {j: Fraction(a) for j, a in enumerate(v) if a}


def dense(row: SparseRow, n: int) -> list[Fraction]:
    out = [Fraction(0)] * n
    for j, a in row.items():
        out[j] = a
    return out


def _axpy(target: SparseRow, c: Fraction, src: SparseRow) -> None:
    """target -= c * src, in place."""
    for j, a in src.items():
        v = target.get(j)
        if v is None:
            target[j] = -c * a
        else:
            v -= c * a
            if v:
                target[j] = v
            else:
                del target[j]


class Echelon:
    """Incrementally maintained echelon basis of a row space.

    Pivot rows are normalized (pivot entry 1) and every stored row is reduced
    against the pivots known when it was added; ``reduce`` reduces fully.
    """

    def __init__(self):
        self.rows: dict[int, SparseRow] = {}

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, row: SparseRow) -> SparseRow:
        r = dict(row)
        # eliminate pivots in increasing column order; new entries only appear
        # to the right of a pivot, so one ascending sweep suffices
        heap = [j for j in r if j in self.rows]
        heapq.heapify(heap)
        while heap:
            j = heapq.heappop(heap)
            c = r.get(j)
            if not c:
                continue
            src = self.rows[j]
            for k in src:
                if k != j and k not in r and k in self.rows:
                    heapq.heappush(heap, k)
            _axpy(r, c, src)
        return r

    def add(self, row: SparseRow) -> bool:
        """Insert a row; returns False when it was already in the span."""
        r = self.reduce(row)
        if not r:
            return False
        p = min(r)
        inv = 1 / r[p]
        self.rows[p] = {j: a * inv for j, a in r.items()}
        return True

    def contains(self, row: SparseRow) -> bool:
        return not self.reduce(row)

    def fully_reduced(self) -> dict[int, SparseRow]:
        """Reduced row echelon rows keyed by pivot column."""
        out: dict[int, SparseRow] = {}
        for p in sorted(self.rows, reverse=True):
            r = dict(self.rows[p])
            for j in sorted(k for k in r if k != p and k in out):
                if j in r:
                    _axpy(r, r[j], out[j])
            out[p] = r
        return out


def sparse_rank(rows: Iterable[SparseRow]) -> int:
    e = Echelon()
    for r in rows:
        e.add(r)
    return e.rank


def sparse_kernel(rows: Iterable[SparseRow], ncols: int) -> list[SparseRow]:
    """Basis of {x : r . x = 0 for all rows r}, one vector per free column."""
    e = Echelon()
    for r in rows:
        e.add(r)
    red = e.fully_reduced()
    free = [j for j in range(ncols) if j not in red]
    # column view of the non-pivot entries
    col: dict[int, list[tuple[int, Fraction]]] = {}
    for p, r in red.items():
        for j, a in r.items():
            if j != p:
                col.setdefault(j, []).append((p, a))
    out = []
    for f in free:
        v = {f: Fraction(1)}
        for p, a in col.get(f, []):
            v[p] = -a
        out.append(v)
    return out
