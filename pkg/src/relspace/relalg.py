"""Graphical modules over polynomial rings, k-th order relation algebras, the modified
Euler-Poincare complex, Hilbert data, and the discriminantal (higher Bruhat) setting
for braid arrangements.

All modules are computed one degree at a time as exact kernels.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from math import comb
from typing import Hashable, Sequence

from .arrangement import (Arrangement, ArrangementLattice, NotInGeneralPosition, ProjectionData,
                          build_lattice, project)
from .complex import GradedComplex, relation_complex
from .exactq import QMatrix, Subspace, ZERO, dot, kernel, vec
from .osalg import LinearIdeal, PolyDegreewise, atom_generators, truncate_complex
from .sparse import Echelon, SparseRow, sparse_kernel, sparse_rank
from .zonotope import FaceLattice, chambers, enumerate_faces


class InsufficientDegrees(ValueError):
    pass


# ---------------------------------------------------------------------------
# graphical data


@dataclass
class GraphicalDatum:
    """Vertices, labeled edges (i, j, label) between vertex positions, and one linear ideal per label."""

    vertices: list[Hashable]
    edges: list[tuple[int, int, Hashable]]
    ring: PolyDegreewise
    edge_ideals: dict[Hashable, LinearIdeal]

    def __post_init__(self):
        nv = len(self.vertices)
        for i, j, lab in self.edges:
            if not (0 <= i < nv and 0 <= j < nv) or i == j:
                raise ValueError(f"bad edge ({i}, {j})")
            if lab not in self.edge_ideals:
                raise ValueError(f"edge label {lab!r} has no ideal")
        for lab, ideal in self.edge_ideals.items():
            if ideal.ring is not self.ring:
                raise ValueError(f"ideal of label {lab!r} lives in another ring")

    def components(self) -> list[int]:
        """Class of each vertex after identifying the endpoints of zero-ideal edges."""
        parent = list(range(len(self.vertices)))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for i, j, lab in self.edges:
            if not self.edge_ideals[lab].generators.dim:
                a, b = find(i), find(j)
                if a != b:
                    parent[max(a, b)] = min(a, b)
        roots = sorted({find(i) for i in range(len(self.vertices))})
        pos = {r: t for t, r in enumerate(roots)}
        return [pos[find(i)] for i in range(len(self.vertices))]

    def is_connected(self) -> bool:
        seen = {0} if self.vertices else set()
        adj: dict[int, list[int]] = {}
        for i, j, _ in self.edges:
            adj.setdefault(i, []).append(j)
            adj.setdefault(j, []).append(i)
        stack = list(seen)
        while stack:
            a = stack.pop()
            for b in adj.get(a, []):
                if b not in seen:
                    seen.add(b)
                    stack.append(b)
        return len(seen) == len(self.vertices)


class _SliceCache:
    """Echelon bases of ideal slices and products with variables, per degree."""

    def __init__(self, ring: PolyDegreewise):
        self.ring = ring
        self._ideal: dict[tuple[int, int], tuple[dict[int, SparseRow], Subspace]] = {}
        self._shift: dict[tuple[int, int], list[int]] = {}

    def shift(self, d: int, var: int) -> list[int]:
        """Index in slice d+1 of x_var times each monomial of slice d."""
        key = (d, var)
        if key not in self._shift:
            self._shift[key] = [self.ring.index(d + 1, tuple(sorted(m + (var,)))) for m in self.ring.monomials(d)]
        return self._shift[key]

    def ideal(self, gens: Subspace, d: int) -> dict[int, SparseRow]:
        """Reduced echelon rows (keyed by pivot) of the degree-d slice of the ideal generated by gens."""
        key = (id(gens), d)
        if key in self._ideal:
            return self._ideal[key][0]
        e = Echelon()
        if d >= 1 and gens.dim:
            ring = self.ring
            ring.monomials(d)
            for g in gens.basis:
                for m in ring.monomials(d - 1):
                    e.add(ring.times_linear(g, m))
        red = e.fully_reduced()
        self._ideal[key] = (red, gens)  # keep gens alive so the id stays unique
        return red


def _quotient_rows(red: dict[int, SparseRow], size: int) -> list[SparseRow]:
    """Rows of the projection R_d -> R_d / I_d onto the non-pivot coordinates of I_d's echelon form."""
    free = [j for j in range(size) if j not in red]
    col: dict[int, list[tuple[int, Fraction]]] = {}
    for p, r in red.items():
        for j, a in r.items():
            if j != p:
                col.setdefault(j, []).append((p, a))
    rows = []
    for f in free:
        row = {f: Fraction(1)}
        for p, a in col.get(f, []):
            row[p] = -a
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# degreewise modules


@dataclass
class DegreewiseModule:
    """Slices of a graphical module.

    ``bases[d]`` holds sparse vectors in class coordinates: position
    c * dim R_d + j is monomial j at vertex class c.  ``classes[v]`` is the
    class of vertex v (vertices joined by zero-ideal edges share a class).
    """

    datum: GraphicalDatum | None
    max_deg: int
    hilbert: dict[int, int]
    generation: dict[int, int] = field(default_factory=dict)
    bases: dict[int, list[SparseRow]] = field(default_factory=dict)
    classes: list[int] = field(default_factory=list)
    context: dict = field(default_factory=dict)

    @property
    def n_classes(self) -> int:
        return max(self.classes) + 1 if self.classes else 0

    def hilbert_list(self) -> list[int]:
        return [self.hilbert[d] for d in range(self.max_deg + 1)]

    def generation_list(self) -> list[int]:
        return [self.generation[d] for d in range(self.max_deg + 1) if d in self.generation]

    def vertex_vector(self, b: SparseRow, d: int) -> SparseRow:
        """Expand a class-coordinate vector to the vertex coordinates of R_d^V."""
        size = self.datum.ring.slice_dim(d)
        by_class: dict[int, list[int]] = {}
        for v, c in enumerate(self.classes):
            by_class.setdefault(c, []).append(v)
        out: SparseRow = {}
        for key, a in b.items():
            c, j = divmod(key, size)
            for v in by_class[c]:
                out[v * size + j] = a
        return out

    def values(self, b: SparseRow, d: int) -> list[dict[int, Fraction]]:
        """Per-vertex polynomials (monomial index -> coefficient)."""
        size = self.datum.ring.slice_dim(d)
        per_class: dict[int, dict[int, Fraction]] = {}
        for key, a in b.items():
            c, j = divmod(key, size)
            per_class.setdefault(c, {})[j] = a
        return [dict(per_class.get(c, {})) for c in self.classes]

    def contains_values(self, vals: list[dict[int, Fraction]], d: int) -> bool:
        """Is the vertex function vals (degree d) an element of the module, by the defining congruences?"""
        return _satisfies_congruences(self.datum, vals, d)

    def to_json(self) -> dict:
        return {
            "max_deg": self.max_deg,
            "hilbert": self.hilbert_list(),
            "generation": self.generation_list(),
            "n_vertices": len(self.classes),
            "n_classes": self.n_classes,
        }


def _satisfies_congruences(datum: GraphicalDatum, vals: list[dict[int, Fraction]], d: int) -> bool:
    cache = _SliceCache(datum.ring)
    for i, j, lab in datum.edges:
        diff = dict(vals[i])
        for t, a in vals[j].items():
            v = diff.get(t, ZERO) - a
            if v:
                diff[t] = v
            else:
                diff.pop(t, None)
        if not diff:
            continue
        red = cache.ideal(datum.edge_ideals[lab].generators, d)
        e = Echelon()
        e.rows = {p: r for p, r in red.items()}
        if e.reduce(diff):
            return False
    return True


def graphical_module(datum: GraphicalDatum, max_deg: int, generation: bool = True) -> DegreewiseModule:
    """Kernel of R_d^V -> sum over edges of R_d / (M_e)_d, for d = 0..max_deg.

    Endpoints of zero-ideal edges must agree, so they are merged into one unknown
    block before the kernel is taken.
    """
    if max_deg < 0:
        raise ValueError("max_deg must be nonnegative")
    ring = datum.ring
    classes = datum.components()
    nclass = max(classes) + 1 if classes else 0
    cache = _SliceCache(ring)
    edges = sorted({(min(classes[i], classes[j]), max(classes[i], classes[j]), lab)
                    for i, j, lab in datum.edges if classes[i] != classes[j]}, key=lambda e: (e[0], e[1], repr(e[2])))
    hilbert, gen, bases = {}, {}, {}
    for d in range(max_deg + 1):
        size = ring.slice_dim(d)
        ring.monomials(d)
        rows: list[SparseRow] = []
        for a, b, lab in edges:
            red = cache.ideal(datum.edge_ideals[lab].generators, d)
            for qrow in _quotient_rows(red, size):
                row: SparseRow = {}
                for j, c in qrow.items():
                    row[a * size + j] = c
                    row[b * size + j] = -c
                rows.append(row)
        basis = sparse_kernel(rows, nclass * size)
        bases[d] = basis
        hilbert[d] = len(basis)
        if generation:
            if d == 0:
                gen[0] = hilbert[0]
            else:
                gen[d] = hilbert[d] - _product_rank(ring, cache, bases[d - 1], d - 1, nclass)
    return DegreewiseModule(datum, max_deg, hilbert, gen if generation else {}, bases, classes)


def _product_rank(ring: PolyDegreewise, cache: _SliceCache, basis: list[SparseRow], d: int, nblocks: int) -> int:
    """dim of R_1 * span(basis), basis in block coordinates of R_d."""
    size, up = ring.slice_dim(d), ring.slice_dim(d + 1)
    e = Echelon()
    for var in range(ring.n):
        sh = cache.shift(d, var)
        for b in basis:
            row = {}
            for key, a in b.items():
                c, j = divmod(key, size)
                row[c * up + sh[j]] = a
            e.add(row)
    return e.rank


def multiply(M: DegreewiseModule, a: SparseRow, da: int, b: SparseRow, db: int) -> list[dict[int, Fraction]]:
    """Vertexwise product of two module elements given in class coordinates."""
    ring = M.datum.ring
    va, vb = M.values(a, da), M.values(b, db)
    ma, mb = ring.monomials(da), ring.monomials(db)
    ring.monomials(da + db)
    out = []
    for fa, fb in zip(va, vb):
        prod: dict[int, Fraction] = {}
        for i, x in fa.items():
            for j, y in fb.items():
                t = ring.index(da + db, tuple(sorted(ma[i] + mb[j])))
                prod[t] = prod.get(t, ZERO) + x * y
        out.append({t: c for t, c in prod.items() if c})
    return out


def subalgebra_dims(M: DegreewiseModule, max_deg: int | None = None) -> dict[int, int]:
    """dim of the degree-d part of the subalgebra generated by the degree-one slice (data only)."""
    top = M.max_deg if max_deg is None else min(max_deg, M.max_deg)
    ring = M.datum.ring
    out = {0: 1 if M.hilbert.get(0) else 0}
    if top < 1:
        return out
    gens = M.bases[1]
    current = gens
    out[1] = len(gens)
    for d in range(2, top + 1):
        e = Echelon()
        size = ring.slice_dim(d)
        for g in gens:
            for s in current:
                vals = multiply(M, g, 1, s, d - 1)
                row = {}
                seen = set()
                for v, poly in enumerate(vals):
                    c = M.classes[v]
                    if c in seen:
                        continue
                    seen.add(c)
                    for j, a in poly.items():
                        row[c * size + j] = a
                e.add(row)
        current = list(e.fully_reduced().values())
        out[d] = len(current)
    return out


# ---------------------------------------------------------------------------
# relation algebras of projected arrangements


@dataclass
class RelationAlgebraSetup:
    arrangement: Arrangement
    lattice: ArrangementLattice
    complex: GradedComplex
    projection: ProjectionData | None
    truncated: GradedComplex | None
    faces: FaceLattice | None
    datum: GraphicalDatum
    k: int


def relation_algebra_setup(arr: Arrangement, P: Subspace, al: ArrangementLattice | None = None,
                           V: GradedComplex | None = None, allow_merge: bool = True) -> RelationAlgebraSetup:
    """Zonotope graph of the projected arrangement with edge ideals <boundary V_x> inside Sym V_k.

    Rank-(k+1) flats with a common image are accepted only when at most one of
    them carries a nonzero piece of the relation complex; the merged edge ideal
    is then the sum over the group.
    """
    al = al or build_lattice(arr)
    V = V or relation_complex(arr, al)
    L = al.lattice
    total = arr.span()
    if P.ambient_dim != arr.ambient_dim or not total.contains(P):
        raise ValueError("P must be a subspace of the span of the normals")
    k = total.dim - P.dim
    if P.dim == 0:
        # the projected arrangement is empty: one vertex, R = Sym V_k with V_k the top pieces
        nk = sum(V.dims[x] for x in L.by_rank[k])
        ring = PolyDegreewise(nk)
        datum = GraphicalDatum([0], [], ring, {})
        return RelationAlgebraSetup(arr, al, V, None, None, None, datum, k)
    proj = project(arr, P, al, strict=not allow_merge)
    for g in proj.hyperplane_flats:
        carrying = [x for x in g if V.dims[x]]
        if len(carrying) > 1:
            raise NotInGeneralPosition("distinct_images", carrying[1],
                                       f"shares its image with flat {carrying[0]} and both carry relations")
    T = truncate_complex(V, proj.truncation)
    lam = proj.truncation.target
    ring = PolyDegreewise(T.dims[lam.bottom])
    gens = atom_generators(T)
    fl = enumerate_faces(proj.projected, proj.projected_lattice)
    verts = fl.vertices()
    pos = {v: t for t, v in enumerate(verts)}
    edges = [(pos[a], pos[b], lab) for a, b, lab in fl.edges()]
    ideals = {a: LinearIdeal(ring, gens[a]) for a in lam.by_rank[1]}
    datum = GraphicalDatum(list(verts), edges, ring, ideals)
    return RelationAlgebraSetup(arr, al, V, proj, T, fl, datum, k)


def build_relation_algebra(arr: Arrangement, P: Subspace, max_deg: int | None = None,
                           al: ArrangementLattice | None = None, setup: RelationAlgebraSetup | None = None,
                           generation: bool = True) -> DegreewiseModule:
    setup = setup or relation_algebra_setup(arr, P, al)
    n = setup.lattice.lattice.rank
    if max_deg is None:
        max_deg = n - setup.k + 2
    M = graphical_module(setup.datum, max_deg, generation)
    M.context = {"setup": setup, "k": setup.k, "rank": n}
    return M


# ---------------------------------------------------------------------------
# modified Euler-Poincare complex


def face_ideal_generators(setup: RelationAlgebraSetup, face_type: int) -> Subspace:
    """Generators of M_F: the sum of the atom ideals below the type of F."""
    lam = setup.projection.truncation.target
    ring = setup.datum.ring
    vecs = []
    for a in lam.by_rank[1]:
        if lam.leq(a, face_type):
            vecs += list(setup.datum.edge_ideals[a].generators.basis)
    return Subspace.span(vecs, ring.n)


def modified_ep(arr: Arrangement, P: Subspace, max_deg: int | None = None,
                M: DegreewiseModule | None = None, al: ArrangementLattice | None = None) -> dict:
    """Ranks and homology of 0 -> R -> M -> sum_{E_1} M_F -> ... -> M_Z -> 0 in each degree.

    Positions run from -1 (the copy of R) to dim Z_P.
    """
    if M is None:
        M = build_relation_algebra(arr, P, max_deg, al, generation=False)
    setup: RelationAlgebraSetup = M.context["setup"]
    if setup.faces is None:
        raise ValueError("the projected zonotope is a point; there is no face complex")
    fl = setup.faces
    ring = setup.datum.ring
    top = M.max_deg if max_deg is None else min(max_deg, M.max_deg)
    dim_z = fl.lattice.lattice.rank
    posin = {}
    for j in range(-1, dim_z + 1):
        for t, f in enumerate(fl.by_dim.get(j, [])):
            posin[f] = t
    ups: dict[int, list[tuple[int, int]]] = {}
    for lo, up, s in fl.facet_pairs:
        ups.setdefault(lo, []).append((up, s))
    gens_by_type: dict[int, Subspace] = {}
    cache = _SliceCache(ring)
    per_degree = {}
    for d in range(top + 1):
        size = ring.slice_dim(d)
        ring.monomials(d)
        # bases of the terms, as (face, sparse vector of R_d)
        terms: dict[int, list[list[tuple[int, SparseRow]]]] = {}
        terms[-1] = [[(0, {j: Fraction(1)})] for j in range(size)]
        terms[0] = []
        for b in M.bases[d]:
            vals = M.values(b, d)
            terms[0].append([(fl.by_dim[0][v], poly) for v, poly in enumerate(vals) if poly])
        term_face_slices: dict[int, dict[int, SparseRow]] = {}
        for j in range(1, dim_z + 1):
            terms[j] = []
            for f in fl.by_dim.get(j, []):
                x = fl.faces[f].type_flat
                if x not in gens_by_type:
                    gens_by_type[x] = face_ideal_generators(setup, x)
                red = cache.ideal(gens_by_type[x], d)
                term_face_slices[f] = red
                for r in red.values():
                    terms[j].append([(f, r)])
        dims = {j: len(terms[j]) for j in terms}

        def image(vec_blocks):
            out: dict[tuple[int, int], Fraction] = {}
            for f, poly in vec_blocks:
                for up, s in ups.get(f, []):
                    for t, a in poly.items():
                        key = (up, t)
                        v = out.get(key, ZERO) + s * a
                        if v:
                            out[key] = v
                        else:
                            out.pop(key, None)
            return out

        ranks, contained, square_zero = {}, True, True
        for j in range(-1, dim_z):
            e = Echelon()
            target_dim = j + 1
            for blocks in terms[j]:
                img = image(blocks)
                # image must lie in the next term
                if target_dim >= 1:
                    grouped: dict[int, SparseRow] = {}
                    for (f, t), a in img.items():
                        grouped.setdefault(f, {})[t] = a
                    for f, poly in grouped.items():
                        ech = Echelon()
                        ech.rows = term_face_slices[f]
                        if ech.reduce(poly):
                            contained = False
                    second = image(list(grouped.items()))
                    if second:
                        square_zero = False
                e.add({posin[f] * size + t: a for (f, t), a in img.items()})
            ranks[j] = e.rank
        homology = {}
        for j in range(-1, dim_z + 1):
            into = ranks.get(j - 1, 0)
            out_rank = ranks.get(j, 0)
            homology[j] = dims[j] - out_rank - into
        euler = sum((-1) ** (j + 1) * dims[j] for j in dims)
        per_degree[d] = {
            "dims": [dims[j] for j in range(-1, dim_z + 1)],
            "ranks": [ranks[j] for j in range(-1, dim_z)],
            "homology": [homology[j] for j in range(-1, dim_z + 1)],
            "exact": not any(homology.values()),
            "first_two_places_exact": homology[-1] == 0 and homology[0] == 0,
            "maps_land_in_terms": contained,
            "square_zero": square_zero,
            "euler_characteristic": euler,
        }
    return {
        "positions": list(range(-1, dim_z + 1)),
        "per_degree": per_degree,
        "exact": all(r["exact"] and r["maps_land_in_terms"] and r["square_zero"] for r in per_degree.values()),
        "euler_zero": all(r["euler_characteristic"] == 0 for r in per_degree.values()),
        "first_two_places_exact": all(r["first_two_places_exact"] for r in per_degree.values()),
    }


# ---------------------------------------------------------------------------
# Hilbert data and generation degrees


def generation_check(M: DegreewiseModule, bound: int) -> dict:
    seq = M.generation_list()
    above = {d: g for d, g in M.generation.items() if d > bound}
    return {
        "generation": seq,
        "bound": bound,
        "checked_degrees": sorted(above),
        "passed": not any(above.values()),
        "failing_degrees": sorted(d for d, g in above.items() if g),
    }


def hilbert_numerator(hilbert: Sequence[int] | DegreewiseModule, denominator_power: int,
                      n_coeffs: int | None = None) -> list[int]:
    """Coefficients of H(t) (1 - t)^p that the prefix certifies (degrees < prefix length)."""
    h = hilbert.hilbert_list() if isinstance(hilbert, DegreewiseModule) else list(hilbert)
    if n_coeffs is None:
        n_coeffs = len(h)
    if n_coeffs > len(h):
        raise InsufficientDegrees(f"{n_coeffs} coefficients requested from a prefix of length {len(h)}")
    p = denominator_power
    return [sum((-1) ** (j - i) * comb(p, j - i) * h[i] for i in range(j + 1) if j - i <= p) for j in range(n_coeffs)]


def series_prefix(numerator: Sequence[int], denominator_power: int, length: int) -> list[int]:
    """First coefficients of numerator(t) / (1 - t)^p."""
    p = denominator_power
    return [sum(c * comb(d - i + p - 1, p - 1) for i, c in enumerate(numerator) if i <= d) if p else
            (numerator[d] if d < len(numerator) else 0) for d in range(length)]


# ---------------------------------------------------------------------------
# piecewise linear functions


def piecewise_linear_dim(arr: Arrangement, al: ArrangementLattice | None = None) -> int:
    """dim of the space of families lambda_v in U over the chambers with lambda_v - lambda_w on the normal line."""
    al = al or build_lattice(arr)
    total = arr.span()
    n = arr.ambient_dim
    if total.dim == 0:
        return n
    proj = project(arr, total, al)
    fl = enumerate_faces(proj.projected, proj.projected_lattice)
    verts = fl.vertices()
    pos = {v: t for t, v in enumerate(verts)}
    # the edge label is a hyperplane of the essentialized copy; map it back through the truncation
    t = proj.truncation
    atom_of = {t.mapping[a]: a for a in al.lattice.by_rank[1]}
    rows: list[SparseRow] = []
    for a, b, lab in fl.edges():
        h = al.lattice.atom_set(atom_of[lab])[0]
        u = arr.normals[h]
        ann = kernel(QMatrix.from_rows([u], n))
        for f in ann.basis:
            row: SparseRow = {}
            for j, c in enumerate(f):
                if c:
                    row[pos[a] * n + j] = c
                    row[pos[b] * n + j] = -c
            rows.append(row)
    return len(verts) * n - sparse_rank(rows)


def piecewise_linear_check(arr: Arrangement, P: Subspace, al: ArrangementLattice | None = None) -> dict:
    """Compare dim M_1 of the first-order relation algebra with dim Lambda - dim U (codimension one only)."""
    if arr.span().dim - P.dim != 1:
        raise ValueError("the degree-one identification concerns codimension k = 1")
    al = al or build_lattice(arr)
    lam_dim = piecewise_linear_dim(arr, al)
    M = build_relation_algebra(arr, P, 1, al, generation=False)
    m1 = M.hilbert[1]
    u = arr.ambient_dim
    return {"dim_Lambda": lam_dim, "dim_U": u, "dim_M1": m1, "k": M.context["k"], "passed": m1 == lam_dim - u}


# ---------------------------------------------------------------------------
# discriminantal arrangements and higher Bruhat orders


def _det(rows: list[list[Fraction]]) -> Fraction:
    m = [list(r) for r in rows]
    n = len(m)
    out = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            out = -out
        out *= m[c][c]
        for r in range(c + 1, n):
            if m[r][c]:
                f = m[r][c] / m[c][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return out


@dataclass
class BruhatData:
    n: int
    k: int
    nodes: tuple[Fraction, ...]
    alpha: dict[tuple[int, ...], Fraction]
    E: dict[tuple[int, ...], tuple[Fraction, ...]]
    vertices: list[frozenset]
    witnesses: list[tuple[Fraction, ...]]
    edges: list[tuple[int, int, tuple[int, ...]]]

    @property
    def labels(self) -> list[tuple[int, ...]]:
        return sorted(self.E)

    def to_json(self) -> dict:
        from .exactq import q_str

        fmt = lambda s: "".join(str(i + 1) for i in s)
        return {
            "n": self.n,
            "k": self.k,
            "nodes": [q_str(t) for t in self.nodes],
            "alpha": {fmt(I): q_str(a) for I, a in sorted(self.alpha.items())},
            "E": {fmt(I): [q_str(a) for a in v] for I, v in sorted(self.E.items())},
            "V_P": [sorted(fmt(I) for I in v) for v in self.vertices],
            "edges": [[a, b, fmt(I)] for a, b, I in self.edges],
        }


def bruhat_data(n: int, k: int, nodes: Sequence) -> BruhatData:
    t = vec(nodes)
    if len(t) != n:
        raise ValueError(f"need {n} nodes, got {len(t)}")
    if any(b <= a for a, b in zip(t, t[1:])):
        raise ValueError("nodes must be strictly increasing")
    if not 0 <= k <= n - 2:
        raise ValueError("k must satisfy 0 <= k <= n - 2")
    A = [[tj ** i for tj in t] for i in range(k + 1)]
    alpha = {}
    for I in combinations(range(n), k + 1):
        a = _det([[row[j] for j in I] for row in A])
        if not a:
            raise NotInGeneralPosition("nonzero_minor", 0, f"alpha{I} = 0")
        alpha[I] = a
    E = {}
    for I in combinations(range(n), k + 2):
        v = [ZERO] * n
        for nu, i in enumerate(I):
            v[i] = (-1) ** nu * alpha[tuple(j for j in I if j != i)]
        E[I] = tuple(v)
    P = kernel(QMatrix.from_rows(A, n))
    labels = sorted(E)
    forms = [tuple(dot(b, E[I]) for b in P.basis) for I in labels]
    cells = chambers(forms, P.dim)
    verts, wits = [], []
    for c in cells:
        lam = tuple(sum((ci * b[j] for ci, b in zip(c, P.basis)), ZERO) for j in range(n))
        verts.append(frozenset(I for I in labels if dot(lam, E[I]) > 0))
        wits.append(lam)
    order = sorted(range(len(verts)), key=lambda i: (len(verts[i]), sorted(verts[i])))
    verts = [verts[i] for i in order]
    wits = [wits[i] for i in order]
    index = {v: i for i, v in enumerate(verts)}
    edges = []
    for i, v in enumerate(verts):
        for I in labels:
            if I not in v:
                j = index.get(v | {I})
                if j is not None:
                    edges.append((i, j, I))
    return BruhatData(n, k, t, alpha, E, verts, wits, edges)


def boundary_form(I: tuple[int, ...], var_index: dict[tuple[int, ...], int]) -> list[Fraction]:
    """Coefficients of the alternating sum of x_{I minus i_nu} in the variables x_J."""
    v = [ZERO] * len(var_index)
    for nu, i in enumerate(I):
        v[var_index[tuple(j for j in I if j != i)]] += (-1) ** nu
    return v


def bruhat_relation_algebra(bd: BruhatData, max_deg: int) -> DegreewiseModule:
    """Functions m on the vertices with m(v) - m(v + I) = boundary(x_I) * c for some c, per degree.

    Each edge contributes a cofactor unknown c in R_{d-1}; since R is a domain
    and the boundary form is nonzero, the cofactor is determined by m, so the
    nullity of the combined system is dim M_d.
    """
    if max_deg < 0:
        raise ValueError("max_deg must be nonnegative")
    vars_ = list(combinations(range(bd.n), bd.k + 1))
    var_index = {J: i for i, J in enumerate(vars_)}
    ring = PolyDegreewise(len(vars_))
    forms = {I: boundary_form(I, var_index) for I in bd.labels}
    nv, ne = len(bd.vertices), len(bd.edges)
    hilbert = {}
    for d in range(max_deg + 1):
        size = ring.slice_dim(d)
        lower = ring.slice_dim(d - 1) if d >= 1 else 0
        ring.monomials(d)
        if d >= 1:
            ring.monomials(d - 1)
        ncols = nv * size + ne * lower
        eqs: list[dict[int, Fraction]] = [dict() for _ in range(ne * size)]
        for e, (a, b, I) in enumerate(bd.edges):
            for j in range(size):
                row = eqs[e * size + j]
                row[a * size + j] = Fraction(1)
                row[b * size + j] = Fraction(-1)
            if d >= 1:
                for s, mono in enumerate(ring.monomials(d - 1)):
                    for t, c in ring.times_linear(forms[I], mono).items():
                        key = nv * size + e * lower + s
                        row = eqs[e * size + t]
                        row[key] = row.get(key, ZERO) - c
        rank = sparse_rank(eqs)
        hilbert[d] = ncols - rank
    M = DegreewiseModule(None, max_deg, hilbert)
    M.context = {"n": bd.n, "k": bd.k, "variables": len(vars_)}
    return M


def consistent_sets(n: int, k: int) -> list[frozenset]:
    """Brute force over all subsets of C(n, k+2): every packet meets the set in a prefix or suffix (lex order)."""
    labels = list(combinations(range(n), k + 2))
    if len(labels) > 20:
        raise ValueError("brute force limited to at most 20 labels")
    packets = []
    for K in combinations(range(n), k + 3):
        packets.append(sorted(tuple(j for j in K if j != i) for i in K))
    out = []
    for mask in range(1 << len(labels)):
        S = {labels[i] for i in range(len(labels)) if mask >> i & 1}
        ok = True
        for pk in packets:
            hits = [I in S for I in pk]
            m = sum(hits)
            if hits != [True] * m + [False] * (len(pk) - m) and hits != [False] * (len(pk) - m) + [True] * m:
                ok = False
                break
        if ok:
            out.append(frozenset(S))
    return out


def weak_order(n: int) -> tuple[set[frozenset], set[tuple[frozenset, frozenset]]]:
    """Inversion sets {(i, j) : i < j, w_i > w_j} of all permutations and the covering pairs."""
    sets = {}
    for w in permutations(range(n)):
        sets[w] = frozenset((i, j) for i, j in combinations(range(n), 2) if w[i] > w[j])
    covers = set()
    for w, s in sets.items():
        pos = {v: i for i, v in enumerate(w)}
        for v in range(n - 1):
            i, j = pos[v], pos[v + 1]
            if i < j:
                u = list(w)
                u[i], u[j] = v + 1, v
                covers.add((s, sets[tuple(u)]))
    return set(sets.values()), covers


def bruhat_checks(bd: BruhatData) -> dict:
    out: dict = {"n_vertices": len(bd.vertices), "n_edges": len(bd.edges)}
    out["alpha_positive"] = all(a > 0 for a in bd.alpha.values())
    out["empty_set_present"] = frozenset() in bd.vertices
    try:
        cons = set(consistent_sets(bd.n, bd.k))
        out["consistent"] = all(v in cons for v in bd.vertices)
        out["n_consistent_sets"] = len(cons)
    except ValueError:
        out["consistent"] = None
    seen = {0}
    adj: dict[int, list[int]] = {}
    for a, b, _ in bd.edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    stack = [0]
    while stack:
        a = stack.pop()
        for b in adj.get(a, []):
            if b not in seen:
                seen.add(b)
                stack.append(b)
    out["connected"] = len(seen) == len(bd.vertices)
    if bd.k == 0:
        sets, covers = weak_order(bd.n)
        verts = set(bd.vertices)
        edges = {(bd.vertices[a], bd.vertices[b]) for a, b, _ in bd.edges}
        out["weak_order"] = verts == sets and edges == covers
        out["factorial"] = len(bd.vertices) == len(sets)
    out["passed"] = all(v for key, v in out.items() if isinstance(v, bool))
    return out
