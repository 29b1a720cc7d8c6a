"""Degree slices of polynomial rings, linear ideals, defining-ideal complexes and the
generalized Orlik-Solomon algebra of a lattice-graded complex.

Everything is computed one polynomial degree at a time; no Groebner bases.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb
from typing import Sequence

from .complex import AtomicDatum, GradedComplex, check_exactness, minimal_complex, os_ranks
from .exactq import QMatrix, Subspace, ZERO, rank_of_rows, env_cap
from .lattice import GeomLattice, TruncationMap

DEFAULT_SLICE_CAP = env_cap("RELSPACE_SLICE_CAP", 4000)


class SliceTooLarge(ValueError):
    def __init__(self, estimate: int, cap: int):
        super().__init__(f"slice of dimension {estimate} exceeds the cap {cap}")
        self.estimate = estimate
        self.cap = cap


# ---------------------------------------------------------------------------
# polynomial slices


class PolyDegreewise:
    """Sym of an N-dimensional space, one degree at a time.

    A monomial of degree d is a sorted tuple of d generator indices; the slice
    basis is in lexicographic order of these tuples.
    """

    def __init__(self, n: int, cap: int | None = None):
        self.n = n
        self.cap = DEFAULT_SLICE_CAP if cap is None else cap
        self._mono: dict[int, list[tuple[int, ...]]] = {}
        self._index: dict[int, dict[tuple[int, ...], int]] = {}

    def slice_dim(self, d: int) -> int:
        return comb(self.n + d - 1, d) if d >= 0 else 0

    def monomials(self, d: int) -> list[tuple[int, ...]]:
        if d not in self._mono:
            size = self.slice_dim(d)
            if size > self.cap:
                raise SliceTooLarge(size, self.cap)
            self._mono[d] = list(combinations_with_replacement(range(self.n), d))
            self._index[d] = {m: i for i, m in enumerate(self._mono[d])}
        return self._mono[d]

    def index(self, d: int, mono: tuple[int, ...]) -> int:
        self.monomials(d)
        return self._index[d][mono]

    def times_linear(self, form: Sequence[Fraction], mono: tuple[int, ...]) -> dict[int, Fraction]:
        """form * mono as a sparse vector of the next slice."""
        d = len(mono) + 1
        out: dict[int, Fraction] = {}
        for i, c in enumerate(form):
            if c:
                j = self.index(d, tuple(sorted(mono + (i,))))
                out[j] = out.get(j, ZERO) + c
        return out

    def multiplication_matrix(self, form: Sequence[Fraction], d: int) -> QMatrix:
        """Matrix of multiplication by a linear form from slice d to slice d + 1."""
        rows, cols = self.slice_dim(d + 1), self.slice_dim(d)
        data = [[ZERO] * cols for _ in range(rows)]
        for j, m in enumerate(self.monomials(d)):
            for i, c in self.times_linear(form, m).items():
                data[i][j] += c
        return QMatrix.from_rows(data, cols)


@dataclass
class LinearIdeal:
    ring: PolyDegreewise
    generators: Subspace  # inside the degree-one slice

    def slice(self, d: int) -> Subspace:
        size = self.ring.slice_dim(d)
        if d == 0 or not self.generators.dim:
            self.ring.monomials(d)
            return Subspace.zero(size)
        vecs = []
        for g in self.generators.basis:
            for m in self.ring.monomials(d - 1):
                row = [ZERO] * size
                for i, c in self.ring.times_linear(g, m).items():
                    row[i] += c
                vecs.append(row)
        return Subspace.span(vecs, size)


# ---------------------------------------------------------------------------
# ideal complexes


def atom_generators(V: GradedComplex) -> dict[int, Subspace]:
    """boundary(V_a) inside V_0 for every atom flat a."""
    L = V.lattice
    n0 = V.dims[L.bottom]
    out = {}
    for a in L.by_rank[1]:
        cols = V.block(a, L.bottom).columns() if V.dims[a] else []
        out[a] = Subspace.span(cols, n0)
    return out


def ideal_datum(V: GradedComplex, d: int, ring: PolyDegreewise | None = None) -> AtomicDatum:
    L = V.lattice
    ring = ring or PolyDegreewise(V.dims[L.bottom])
    gens = atom_generators(V)
    size = ring.slice_dim(d)
    spaces = []
    for i in range(L.n_atoms):
        spaces.append(LinearIdeal(ring, gens[L.atoms[i]]).slice(d))
    return AtomicDatum(Subspace.full(size), tuple(spaces))


@dataclass
class DegreewiseFamily:
    lattice: GeomLattice
    complexes: dict[int, GradedComplex]
    exactness: dict[int, dict]

    @property
    def exact(self) -> bool:
        return all(r["acyclic"] for r in self.exactness.values())

    def dims(self) -> dict[int, tuple[int, ...]]:
        return {d: C.dims for d, C in self.complexes.items()}

    def euler_characteristics(self) -> dict[int, int]:
        out = {}
        for d, C in self.complexes.items():
            out[d] = sum((-1) ** i * C.degree_dim(i) for i in range(C.lattice.rank + 1))
        return out

    def to_json(self) -> dict:
        euler = self.euler_characteristics()
        return {
            "degrees": {
                str(d): {
                    "dims": list(C.dims),
                    "homology": self.exactness[d]["homology"],
                    "exact": self.exactness[d]["acyclic"],
                    "euler_characteristic": euler[d],
                }
                for d, C in self.complexes.items()
            },
            "exact": self.exact,
        }


def ideal_complex_family(V: GradedComplex, max_deg: int, cap: int | None = None) -> DegreewiseFamily:
    """Per degree d, the minimal complex of (Sym^d V_0, <boundary V_a>_d)."""
    L = V.lattice
    ring = PolyDegreewise(V.dims[L.bottom], cap)
    complexes, exactness = {}, {}
    for d in range(max_deg + 1):
        C = minimal_complex(L, ideal_datum(V, d, ring))
        complexes[d] = C
        exactness[d] = check_exactness(C)
    return DegreewiseFamily(L, complexes, exactness)


def defining_ideal_complex(arr, V: GradedComplex, max_deg: int, cap: int | None = None) -> DegreewiseFamily:
    if V.dims[V.lattice.bottom] != arr.ambient_dim:
        raise ValueError("V must be the relation complex of the arrangement")
    return ideal_complex_family(V, max_deg, cap)


def truncate_complex(V: GradedComplex, t: TruncationMap) -> GradedComplex:
    """Shift by k and regroup the pieces along the truncation map."""
    L, lam, k = V.lattice, t.target, t.k
    if t.source is not L:
        raise ValueError("truncation map must start at the complex's lattice")
    groups: dict[int, list[int]] = {}
    for x in L.elements:
        if L.ranks[x] >= k and V.dims[x]:
            groups.setdefault(t.mapping[x], []).append(x)
    dims = [sum(V.dims[x] for x in groups.get(lam_x, [])) for lam_x in lam.elements]
    boundary = {}
    for lx, xs in groups.items():
        for ly in lam.lower_covers(lx):
            ys = groups.get(ly, [])
            if not ys:
                continue
            rows = []
            for y in ys:
                row = [V.block(x, y) if y in L.lower_covers(x) else QMatrix.zeros(V.dims[y], V.dims[x]) for x in xs]
                rows.append(row)
            from .exactq import block_matrix

            boundary[(lx, ly)] = block_matrix(rows)
    # every inherited boundary must go down one cover in the target lattice
    for (x, y), m in V.boundary.items():
        if L.ranks[y] >= k and V.dims[x] and V.dims[y] and not m.is_zero():
            if t.mapping[y] not in lam.lower_covers(t.mapping[x]):
                raise ValueError(f"truncation is not compatible at ({x}, {y})")
    return GradedComplex(lam, tuple(dims), boundary)


def projected_ideal_complex(V: GradedComplex, projection, max_deg: int, cap: int | None = None) -> DegreewiseFamily:
    """Degreewise minimal complexes over Sym V_k with atom ideals <boundary V_{l^{-1}(a)}>."""
    T = truncate_complex(V, projection.truncation)
    return ideal_complex_family(T, max_deg, cap)


# ---------------------------------------------------------------------------
# generalized Orlik-Solomon algebra


@dataclass
class SuperAlgebraSlice:
    """Weight-d part of S(V) (every element of V has weight one).

    Generators are pairs (flat, index) ordered by flat id; a generator is odd
    when the rank of its flat is odd.  A monomial is the tuple of its even
    generators (sorted, with repetition) followed by its odd ones (sorted, distinct).
    """

    V: GradedComplex
    weight: int
    generators: list[tuple[int, int]] = field(default_factory=list)
    monomials: list[tuple[int, ...]] = field(default_factory=list)

    def __post_init__(self):
        L = self.V.lattice
        self.generators = [(x, i) for x in L.elements for i in range(self.V.dims[x])]
        self.gid = {g: j for j, g in enumerate(self.generators)}
        self.odd = [L.ranks[x] % 2 == 1 for x, _ in self.generators]
        self.monomials = [m for m in combinations_with_replacement(range(len(self.generators)), self.weight)
                          if self._valid(m)]

    def _valid(self, m) -> bool:
        odd = [g for g in m if self.odd[g]]
        return len(set(odd)) == len(odd)

    def flats(self, m) -> list[int]:
        return [self.generators[g][0] for g in m]

    def join(self, m) -> int:
        return self.V.lattice.join_all(self.flats(m)) if m else self.V.lattice.bottom

    def hom_degree(self, m) -> int:
        return sum(self.V.lattice.ranks[x] for x in self.flats(m))

    def dependent(self, m) -> bool:
        return bool(m) and self.hom_degree(m) > self.V.lattice.ranks[self.join(m)]

    def canonical(self, word: Sequence[int]) -> tuple[int, tuple[int, ...]] | None:
        """Sign and sorted form of a word, or None when an odd generator repeats."""
        odd = [g for g in word if self.odd[g]]
        if len(set(odd)) != len(odd):
            return None
        inversions = sum(1 for i in range(len(odd)) for j in range(i + 1, len(odd)) if odd[i] > odd[j])
        return (-1) ** inversions, tuple(sorted(word))

    def differential(self, m: tuple[int, ...]) -> dict[tuple[int, ...], Fraction]:
        """The super-derivation extending the boundary, on a canonical monomial.

        Canonical order puts generators by id, which is the stored order; the Koszul
        sign for position i is (-1)^(number of odd generators before i).
        """
        V, L = self.V, self.V.lattice
        out: dict[tuple[int, ...], Fraction] = {}
        # use the order evens-then-odds for sign bookkeeping
        word = [g for g in m if not self.odd[g]] + [g for g in m if self.odd[g]]
        base = self.canonical(word)
        # sign relating the stored monomial (sorted) to the evens-then-odds word is +1,
        # since moving even generators is free and the odd ones stay sorted
        assert base is not None and base[0] == 1
        odd_before = 0
        for pos, g in enumerate(word):
            x, i = self.generators[g]
            if L.ranks[x] > 0:
                for y in L.lower_covers(x):
                    if not V.dims[y]:
                        continue
                    col = V.block(x, y).column(i)
                    for j, c in enumerate(col):
                        if not c:
                            continue
                        new = word[:pos] + [self.gid[(y, j)]] + word[pos + 1:]
                        hit = self.canonical(new)
                        if hit is None:
                            continue
                        sign, mono = hit
                        coeff = (-1) ** odd_before * sign * c
                        out[mono] = out.get(mono, ZERO) + coeff
            if self.odd[g]:
                odd_before += 1
        return {k: v for k, v in out.items() if v}


def generalized_os_dims(V: GradedComplex, max_deg: int, cap: int | None = None) -> dict:
    """dim of the weight-d part of the quotient at each flat, for d = 0..max_deg.

    The quotient at x is spanned by independent monomials with join x, modulo
    the x-components of the differentials of dependent monomials one homological
    degree higher.
    """
    cap = DEFAULT_SLICE_CAP if cap is None else cap
    L = V.lattice
    table: dict[int, dict[int, int]] = {}
    checks = {"bottom_is_sym": True, "atom_image_is_ideal": True}
    n0 = V.dims[L.bottom]
    ring = PolyDegreewise(n0, cap)
    gens = atom_generators(V)
    for d in range(max_deg + 1):
        S = SuperAlgebraSlice(V, d)
        if len(S.monomials) > cap:
            raise SliceTooLarge(len(S.monomials), cap)
        info = [(m, S.join(m), S.hom_degree(m), S.dependent(m)) for m in S.monomials]
        row: dict[int, int] = {}
        reps: dict[int, list] = {}
        for x in L.elements:
            basis = [m for m, j, h, dep in info if j == x and not dep]
            if not basis:
                row[x] = 0
                continue
            pos = {m: i for i, m in enumerate(basis)}
            rel_rows = []
            for m, j, h, dep in info:
                if dep and h == L.ranks[x] + 1 and L.leq(x, j):
                    r = [ZERO] * len(basis)
                    hit = False
                    for mono, c in S.differential(m).items():
                        if mono in pos:
                            r[pos[mono]] += c
                            hit = True
                    if hit:
                        rel_rows.append(r)
            rk = rank_of_rows(rel_rows, len(basis)) if rel_rows else 0
            row[x] = len(basis) - rk
            reps[x] = (basis, rel_rows)
        table[d] = row
        if row[L.bottom] != ring.slice_dim(d):
            checks["bottom_is_sym"] = False
        # image of the atom parts under the differential is the linear ideal slice
        for a in L.by_rank[1]:
            if a not in reps:
                image = Subspace.zero(ring.slice_dim(d))
            else:
                vecs = []
                for m in reps[a][0]:
                    v = [ZERO] * ring.slice_dim(d)
                    for mono, c in S.differential(m).items():
                        exps = tuple(sorted(S.generators[g][1] for g in mono))
                        v[ring.index(d, exps)] += c
                    vecs.append(v)
                image = Subspace.span(vecs, ring.slice_dim(d))
            if image != LinearIdeal(ring, gens[a]).slice(d):
                checks["atom_image_is_ideal"] = False
    return {"dims": table, "checks": checks}


def constant_os_complex(lattice: GeomLattice, n: int = 1) -> GradedComplex:
    """V_a = V_0 = Q^n with identity boundaries and nothing above rank one."""
    dims = [0] * len(lattice)
    dims[lattice.bottom] = n
    boundary = {}
    for a in lattice.by_rank[1]:
        dims[a] = n
        boundary[(a, lattice.bottom)] = QMatrix.identity(n)
    return GradedComplex(lattice, tuple(dims), boundary)


def expected_constant_os_dims(lattice: GeomLattice, n: int, d: int) -> dict[int, int]:
    """|mu(0, x)| times the dimension of Sym^{d - rk x} of Q^n."""
    mu = os_ranks(lattice)
    out = {}
    for x in lattice.elements:
        r = lattice.ranks[x]
        out[x] = mu[x] * comb(n + d - r - 1, d - r) if d >= r else 0
    return out
