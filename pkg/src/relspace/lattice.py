"""Finite geometric lattices stored by their closed atom sets.

Elements are identified by dense integer ids.  Ids are assigned in order of
rank and then of the sorted tuple of atoms below the element, so that every
construction is reproducible.  Atom sets are kept as integer bitmasks.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence


def _bits(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def _mask(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


class UnknownFlat(KeyError):
    pass


class GeomLattice:
    """A simple geometric lattice on the ground set {0, ..., n_atoms - 1}.

    ``closed_sets`` are the flats given as collections of ground indices; every
    singleton must be closed (the lattice is atomistic over its ground set).
    """

    def __init__(self, closed_sets: Iterable[Iterable[int]], n_atoms: int, ranks: dict | None = None):
        masks = {_mask(s) for s in closed_sets}
        masks.add(0)
        masks.add((1 << n_atoms) - 1)
        for i in range(n_atoms):
            if (1 << i) not in masks:
                raise ValueError(f"singleton {{{i}}} is not closed")
        if ranks is None:
            rank_by_mask = self._compute_ranks(masks)
        else:
            rank_by_mask = {_mask(k) if not isinstance(k, int) else k: v for k, v in ranks.items()}
            rank_by_mask[0] = 0
        order = sorted(masks, key=lambda m: (rank_by_mask[m], tuple(_bits(m))))
        self.n_atoms = n_atoms
        self.masks: tuple[int, ...] = tuple(order)
        self.ranks: tuple[int, ...] = tuple(rank_by_mask[m] for m in order)
        self._id = {m: i for i, m in enumerate(order)}
        self.bottom = 0
        self.top = len(order) - 1
        self.rank = self.ranks[self.top]
        self.atoms: tuple[int, ...] = tuple(self._id[1 << i] for i in range(n_atoms))
        by_rank: list[list[int]] = [[] for _ in range(self.rank + 1)]
        for i, r in enumerate(self.ranks):
            by_rank[r].append(i)
        self.by_rank = tuple(tuple(b) for b in by_rank)
        self._join_cache: dict[tuple[int, int], int] = {}
        self._up: list[tuple[int, ...] | None] = [None] * len(order)
        self._down: list[tuple[int, ...] | None] = [None] * len(order)
        self._decomp: dict[int, tuple[int, ...]] = {}
        self.origin: tuple[int, ...] | None = None

    @staticmethod
    def _compute_ranks(masks: set[int]) -> dict[int, int]:
        # rank = length of the longest chain from the empty flat
        ordered = sorted(masks, key=lambda m: bin(m).count("1"))
        rank = {}
        for m in ordered:
            best = -1
            for s in ordered:
                if s == m:
                    break
                if s & ~m == 0 and s != m and rank[s] > best:
                    best = rank[s]
            rank[m] = best + 1
        return rank

    # basic queries -------------------------------------------------------

    def __len__(self) -> int:
        return len(self.masks)

    @property
    def elements(self) -> range:
        return range(len(self.masks))

    def _check(self, x: int):
        if not isinstance(x, int) or not 0 <= x < len(self.masks):
            raise UnknownFlat(x)

    def rank_of(self, x: int) -> int:
        self._check(x)
        return self.ranks[x]

    def atom_set(self, x: int) -> tuple[int, ...]:
        self._check(x)
        return tuple(_bits(self.masks[x]))

    def atoms_below(self, x: int) -> tuple[int, ...]:
        return tuple(self.atoms[i] for i in self.atom_set(x))

    def id_of(self, atom_indices: Iterable[int]) -> int:
        m = _mask(atom_indices)
        if m not in self._id:
            raise UnknownFlat(tuple(sorted(atom_indices)))
        return self._id[m]

    def find(self, mask: int) -> int | None:
        return self._id.get(mask)

    def leq(self, x: int, y: int) -> bool:
        return self.masks[x] & ~self.masks[y] == 0

    def lt(self, x: int, y: int) -> bool:
        return x != y and self.leq(x, y)

    def closure_mask(self, mask: int) -> int:
        return self.masks[self.closure(mask)]

    def closure(self, mask: int) -> int:
        """Id of the smallest flat containing the given ground set."""
        hit = self._id.get(mask)
        if hit is not None:
            return hit
        # flats are sorted by rank, so the first flat containing mask is the closure
        return next(i for i in range(len(self.masks)) if mask & ~self.masks[i] == 0)

    def join(self, x: int, y: int) -> int:
        if x > y:
            x, y = y, x
        key = (x, y)
        hit = self._join_cache.get(key)
        if hit is None:
            m = self.masks[x] | self.masks[y]
            hit = self._id.get(m)
            if hit is None:
                start = self.by_rank[max(self.ranks[x], self.ranks[y])][0]
                hit = next(i for i in range(start, len(self.masks)) if m & ~self.masks[i] == 0)
            self._join_cache[key] = hit
        return hit

    def join_all(self, xs: Iterable[int]) -> int:
        acc = self.bottom
        for x in xs:
            acc = self.join(acc, x)
        return acc

    def meet(self, x: int, y: int) -> int:
        return self._id[self.masks[x] & self.masks[y]]

    def join_table(self) -> list[list[int]]:
        return [[self.join(x, y) for y in self.elements] for x in self.elements]

    def meet_table(self) -> list[list[int]]:
        return [[self.meet(x, y) for y in self.elements] for x in self.elements]

    def upper_covers(self, x: int) -> tuple[int, ...]:
        self._check(x)
        if self._up[x] is None:
            r = self.ranks[x]
            if r == self.rank:
                self._up[x] = ()
            else:
                mx = self.masks[x]
                self._up[x] = tuple(y for y in self.by_rank[r + 1] if mx & ~self.masks[y] == 0)
        return self._up[x]

    def lower_covers(self, x: int) -> tuple[int, ...]:
        self._check(x)
        if self._down[x] is None:
            r = self.ranks[x]
            if r == 0:
                self._down[x] = ()
            else:
                mx = self.masks[x]
                self._down[x] = tuple(y for y in self.by_rank[r - 1] if self.masks[y] & ~mx == 0)
        return self._down[x]

    def below(self, x: int) -> list[int]:
        """All elements y <= x, in id order."""
        mx = self.masks[x]
        return [y for y in range(x + 1) if self.masks[y] & ~mx == 0]

    def above(self, x: int) -> list[int]:
        mx = self.masks[x]
        return [y for y in range(x, len(self.masks)) if mx & ~self.masks[y] == 0]

    # decomposition -------------------------------------------------------

    def decompose(self, x: int) -> tuple[int, ...]:
        """Indecomposable parts of x (sorted ids); x itself when indecomposable."""
        self._check(x)
        if x == self.bottom:
            raise ValueError("the bottom element has no decomposition")
        hit = self._decomp.get(x)
        if hit is not None:
            return hit
        ground = self.atom_set(x)
        parent = {a: a for a in ground}

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for a, b in combinations(ground, 2):
            j = self.join(self.atoms[a], self.atoms[b])
            if bin(self.masks[j]).count("1") > 2:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[ra] = rb
        blocks: dict[int, int] = {}
        for a in ground:
            r = find(a)
            blocks[r] = blocks.get(r, 0) | (1 << a)
        parts = tuple(sorted(self.closure(m) for m in blocks.values()))
        self._decomp[x] = parts
        return parts

    def is_indecomposable(self, x: int) -> bool:
        return x != self.bottom and len(self.decompose(x)) == 1

    def indecomposables(self) -> list[int]:
        return [x for x in self.elements if self.is_indecomposable(x)]

    def dependent(self, xs: Sequence[int]) -> bool:
        if not xs:
            raise ValueError("dependency of an empty tuple is undefined")
        return sum(self.ranks[x] for x in xs) > self.ranks[self.join_all(xs)]

    # sublattices ---------------------------------------------------------

    def interval_below(self, x: int) -> "GeomLattice":
        """The lower interval below x, re-indexed on its own atoms; ``origin`` maps ids back."""
        ground = self.atom_set(x)
        pos = {a: i for i, a in enumerate(ground)}
        elems = self.below(x)
        sets = [[pos[a] for a in _bits(self.masks[y])] for y in elems]
        sub = GeomLattice(sets, len(ground), ranks={_mask(s): self.ranks[y] for s, y in zip(sets, elems)})
        lookup = {_mask(s): y for s, y in zip(sets, elems)}
        sub.origin = tuple(lookup[m] for m in sub.masks)
        return sub

    def interval_above(self, x: int) -> "GeomLattice":
        """The upper interval above x; its atoms are the upper covers of x."""
        covers = self.upper_covers(x)
        elems = self.above(x)
        sets = [[i for i, c in enumerate(covers) if self.leq(c, y)] for y in elems]
        r0 = self.ranks[x]
        sub = GeomLattice(sets, len(covers), ranks={_mask(s): self.ranks[y] - r0 for s, y in zip(sets, elems)})
        lookup = {_mask(s): y for s, y in zip(sets, elems)}
        sub.origin = tuple(lookup[m] for m in sub.masks)
        return sub

    # serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "size": len(self),
            "elements": [
                {
                    "id": x,
                    "rank": self.ranks[x],
                    "atoms": list(self.atom_set(x)),
                    "covers": list(self.upper_covers(x)),
                }
                for x in self.elements
            ],
        }

    def strata(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.by_rank)


def is_isomorphic_by_atoms(a: GeomLattice, b: GeomLattice) -> bool:
    """Equality of closed-set systems and ranks (the ground sets are matched by index)."""
    return a.n_atoms == b.n_atoms and set(zip(a.masks, a.ranks)) == set(zip(b.masks, b.ranks))


def isomorphic(a: GeomLattice, b: GeomLattice) -> bool:
    """Brute-force lattice isomorphism test via atom permutations, for small lattices."""
    from itertools import permutations

    if len(a) != len(b) or a.n_atoms != b.n_atoms or a.strata() != b.strata():
        return False
    target = set(zip(b.masks, b.ranks))
    for perm in permutations(range(a.n_atoms)):
        mapped = {(_mask(perm[i] for i in _bits(m)), r) for m, r in zip(a.masks, a.ranks)}
        if mapped == target:
            return True
    return False


# ---------------------------------------------------------------------------
# stock lattices


def boolean_lattice(n: int) -> GeomLattice:
    sets = [list(c) for r in range(n + 1) for c in combinations(range(n), r)]
    return GeomLattice(sets, n, ranks={_mask(s): len(s) for s in sets})


def set_partitions(items: Sequence[int]) -> list[list[tuple[int, ...]]]:
    items = list(items)
    if not items:
        return [[]]
    first, rest = items[0], items[1:]
    out = []
    for part in set_partitions(rest):
        out.append([(first,)] + part)
        for i in range(len(part)):
            out.append(part[:i] + [(first,) + part[i]] + part[i + 1:])
    return out


def partition_pairs(n: int) -> list[tuple[int, int]]:
    """Ground set of the partition lattice of {0..n-1}: the pairs i < j, lexicographically."""
    return list(combinations(range(n), 2))


def partition_lattice(n: int) -> GeomLattice:
    pairs = partition_pairs(n)
    index = {p: i for i, p in enumerate(pairs)}
    sets, ranks = [], {}
    for part in set_partitions(range(n)):
        s = [index[tuple(sorted(p))] for block in part for p in combinations(sorted(block), 2)]
        sets.append(s)
        ranks[_mask(s)] = n - len(part)
    return GeomLattice(sets, len(pairs), ranks=ranks)


def partition_of(lattice: GeomLattice, x: int, n: int) -> list[tuple[int, ...]]:
    """Blocks of the partition of {0..n-1} corresponding to x in partition_lattice(n)."""
    pairs = partition_pairs(n)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            a = parent[a]
        return a

    for i in lattice.atom_set(x):
        a, b = pairs[i]
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    blocks: dict[int, list[int]] = {}
    for i in range(n):
        blocks.setdefault(find(i), []).append(i)
    return sorted(tuple(b) for b in blocks.values())


# ---------------------------------------------------------------------------
# truncations


@dataclass
class TruncationMap:
    source: GeomLattice
    target: GeomLattice
    k: int
    mapping: dict[int, int] = field(default_factory=dict)

    def __call__(self, x: int) -> int:
        return self.mapping[x]


def verify_truncation(t: TruncationMap) -> dict:
    """Check the truncation axioms and the maximal-element decomposition exhaustively."""
    L, lam, k = t.source, t.target, t.k
    failures: list[dict] = []
    domain = [x for x in L.elements if L.ranks[x] >= k]
    missing = [x for x in domain if x not in t.mapping]
    if missing:
        failures.append({"check": "domain", "flat": missing[0]})
        return {"passed": False, "failures": failures}
    for x in domain:
        if lam.ranks[t.mapping[x]] != L.ranks[x] - k:
            failures.append({"check": "rank_shift", "flat": x, "image": t.mapping[x]})
    for x in domain:
        for y in domain:
            if L.leq(x, y) and not lam.leq(t.mapping[x], t.mapping[y]):
                failures.append({"check": "monotone", "pair": [x, y]})
            if x < y and L.ranks[L.meet(x, y)] >= k:
                if t.mapping[L.join(x, y)] != lam.join(t.mapping[x], t.mapping[y]):
                    failures.append({"check": "join", "pair": [x, y]})
    if not failures:
        for xt in lam.elements:
            below = [x for x in domain if lam.leq(t.mapping[x], xt)]
            maximal = [x for x in below if not any(L.lt(x, y) for y in below)]
            covered: dict[int, int] = {}
            for m in maximal:
                for x in below:
                    if L.leq(x, m):
                        covered[x] = covered.get(x, 0) + 1
            if set(covered) != set(below) or any(c != 1 for c in covered.values()):
                failures.append({"check": "maximal_decomposition", "target": xt})
    return {"passed": not failures, "failures": failures[:20], "n_failures": len(failures)}
