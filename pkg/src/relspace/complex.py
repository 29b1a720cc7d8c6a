"""Lattice-graded chain complexes: minimal complexes of atomic data and their homotopies.

A :class:`GradedComplex` stores for each flat x a coordinate space V_x of
dimension ``dims[x]`` together with boundary blocks V_x -> V_y for the lower
covers y of x.  Degree i of the complex is the direct sum of the pieces of the
rank-i flats, ordered by flat id.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .arrangement import Arrangement, ArrangementLattice, build_lattice, restriction
from .exactq import (
    QMatrix,
    Subspace,
    ZERO,
    block_matrix,
    dot,
    kernel,
    q_str,
    rank_of_rows,
    solve,
)
from .lattice import GeomLattice


# ---------------------------------------------------------------------------
# atomic data


@dataclass(frozen=True)
class AtomicDatum:
    """U_0 inside Q^N together with one subspace U_a of U_0 per atom index."""

    ambient: Subspace
    atom_spaces: tuple[Subspace, ...]

    def __post_init__(self):
        for u in self.atom_spaces:
            if not self.ambient.contains(u):
                raise ValueError("every atom space must lie in the ambient space")

    def total(self) -> Subspace:
        acc = Subspace.zero(self.ambient.ambient_dim)
        for u in self.atom_spaces:
            acc = acc.sum(u)
        return acc

    def is_essential(self) -> bool:
        return self.total() == self.ambient

    def is_nondegenerate(self) -> bool:
        return all(u.dim for u in self.atom_spaces)

    def is_orthogonal(self, lattice: GeomLattice) -> bool:
        for i, j in combinations(range(len(self.atom_spaces)), 2):
            top = lattice.join(lattice.atoms[i], lattice.atoms[j])
            if not lattice.is_indecomposable(top) and self.atom_spaces[i].intersect(self.atom_spaces[j]).dim:
                return False
        return True


def defining_datum(arr: Arrangement) -> AtomicDatum:
    n = arr.ambient_dim
    return AtomicDatum(Subspace.full(n), tuple(Subspace.span([u], n) for u in arr.normals))


def constant_datum(lattice: GeomLattice) -> AtomicDatum:
    return AtomicDatum(Subspace.full(1), tuple(Subspace.full(1) for _ in range(lattice.n_atoms)))


# ---------------------------------------------------------------------------
# graded complexes


@dataclass
class GradedComplex:
    lattice: GeomLattice
    dims: tuple[int, ...]
    boundary: dict[tuple[int, int], QMatrix]
    bottom_basis: QMatrix | None = None  # basis of V_0 inside the ambient space, when known

    def block(self, x: int, y: int) -> QMatrix:
        hit = self.boundary.get((x, y))
        return hit if hit is not None else QMatrix.zeros(self.dims[y], self.dims[x])

    def degree_flats(self, i: int, within: Iterable[int] | None = None) -> list[int]:
        if i < 0 or i > self.lattice.rank:
            return []
        flats = self.lattice.by_rank[i]
        if within is not None:
            allowed = set(within)
            flats = [x for x in flats if x in allowed]
        return [x for x in flats if self.dims[x]]

    def degree_dim(self, i: int, within=None) -> int:
        return sum(self.dims[x] for x in self.degree_flats(i, within))

    def global_boundary(self, i: int, within=None) -> QMatrix:
        """Matrix of the boundary from degree i to degree i-1 (restricted to ``within``)."""
        src = self.degree_flats(i, within)
        dst = self.degree_flats(i - 1, within)
        ncols = sum(self.dims[x] for x in src)
        if not dst:
            return QMatrix.zeros(0, ncols)
        return block_matrix([[self.block(x, y) for x in src] for y in dst]) if src else QMatrix.zeros(sum(self.dims[y] for y in dst), 0)

    def boundary_of(self, x: int) -> QMatrix:
        """The map V_x -> V_{<x} stacked over the lower covers with nonzero pieces."""
        covers = [y for y in self.lattice.lower_covers(x) if self.dims[y]]
        if not covers:
            return QMatrix.zeros(0, self.dims[x])
        return block_matrix([[self.block(x, y)] for y in covers])

    def to_json(self) -> dict:
        L = self.lattice
        return {
            "flats": [
                {
                    "id": x,
                    "rank": L.ranks[x],
                    "dim": self.dims[x],
                    "covers": list(L.lower_covers(x)),
                    "boundary": {str(y): self.block(x, y).to_json() for y in L.lower_covers(x) if self.dims[x] and self.dims[y]},
                }
                for x in L.elements
            ]
        }


def minimal_complex(lattice: GeomLattice, datum: AtomicDatum) -> GradedComplex:
    """Iterated-kernel complex: V_0 = U_0, V_a = U_a, V_x = Ker(V_{<x} -> V_{rk x - 2})."""
    if len(datum.atom_spaces) != lattice.n_atoms:
        raise ValueError("datum must provide one space per atom")
    dims = [0] * len(lattice)
    boundary: dict[tuple[int, int], QMatrix] = {}
    amb = datum.ambient
    dims[lattice.bottom] = amb.dim
    for i, u in enumerate(datum.atom_spaces):
        a = lattice.atoms[i]
        dims[a] = u.dim
        cols = [amb.coordinates(b) for b in u.basis]
        boundary[(a, lattice.bottom)] = QMatrix.from_columns(cols, amb.dim) if cols else QMatrix.zeros(amb.dim, 0)
    for r in range(2, lattice.rank + 1):
        for x in lattice.by_rank[r]:
            covers = [y for y in lattice.lower_covers(x) if dims[y]]
            if not covers:
                continue
            seconds = sorted({z for y in covers for z in lattice.lower_covers(y) if dims[z]})
            ncols = sum(dims[y] for y in covers)
            if seconds:
                rows = block_matrix([[boundary.get((y, z)) or QMatrix.zeros(dims[z], dims[y]) for y in covers] for z in seconds])
            else:
                rows = QMatrix.zeros(0, ncols)
            ker = kernel(rows)
            if not ker.dim:
                continue
            dims[x] = ker.dim
            off = 0
            for y in covers:
                cols = [vec[off:off + dims[y]] for vec in ker.basis]
                boundary[(x, y)] = QMatrix.from_columns(cols, dims[y])
                off += dims[y]
    return GradedComplex(lattice, tuple(dims), boundary, amb.matrix())


def relation_complex(arr: Arrangement, al: ArrangementLattice | None = None) -> GradedComplex:
    al = al or build_lattice(arr)
    return minimal_complex(al.lattice, defining_datum(arr))


# ---------------------------------------------------------------------------
# exactness


def homology(C: GradedComplex, within: Iterable[int] | None = None) -> list[int]:
    """dim Ker d_i - dim Im d_{i+1} for i = 1..rank (restricted to a down-closed flat set)."""
    within = list(within) if within is not None else None
    n = C.lattice.rank
    ranks = {}
    for i in range(1, n + 2):
        m = C.global_boundary(i, within) if i <= n else None
        ranks[i] = rank_of_rows(m.data, m.cols) if m is not None and m.rows and m.cols else 0
    return [C.degree_dim(i, within) - ranks[i] - ranks[i + 1] for i in range(1, n + 1)]


def check_exactness(C: GradedComplex, within=None) -> dict:
    h = homology(C, within)
    bad = [i + 1 for i, v in enumerate(h) if v]
    return {"acyclic": not bad, "homology": h, "failing_degrees": bad}


def check_composite_zero(C: GradedComplex) -> bool:
    for i in range(2, C.lattice.rank + 1):
        a = C.global_boundary(i - 1)
        b = C.global_boundary(i)
        if a.rows and a.cols and b.cols and not (a @ b).is_zero():
            return False
    return True


def check_L_contractible_dims(C: GradedComplex, homotopy: "LHomotopy | None" = None) -> dict:
    per_flat = {}
    failing = []
    for x in C.lattice.elements:
        h = homology(C, C.lattice.below(x))
        per_flat[x] = h
        if any(h):
            failing.append(x)
    report = {"passed": not failing, "per_flat_homology": per_flat, "failing_flats": failing}
    if homotopy is not None:
        hv = verify_homotopy(homotopy)
        report["homotopy"] = hv
        report["passed"] = report["passed"] and hv["passed"]
    return report


def relation_space_oracle(arr: Arrangement, al: ArrangementLattice | None = None) -> dict:
    """Brute-force 2-formality: all linear relations among the normals versus those supported on rank-two flats."""
    al = al or build_lattice(arr)
    L = al.lattice
    m, n = len(arr.normals), arr.ambient_dim
    cols = QMatrix.from_columns(list(arr.normals), n) if m else QMatrix.zeros(n, 0)
    full = kernel(cols)
    local = []
    for x in (L.by_rank[2] if L.rank >= 2 else []):
        hs = L.atom_set(x)
        sub = kernel(QMatrix.from_columns([arr.normals[h] for h in hs], n))
        for v in sub.basis:
            w = [ZERO] * m
            for h, a in zip(hs, v):
                w[h] = a
            local.append(w)
    loc = Subspace.span(local, m)
    return {"relations": full.dim, "local_relations": loc.dim, "two_formal": loc.dim == full.dim}


# ---------------------------------------------------------------------------
# compatible sections


@dataclass
class CompatibleSection:
    lattice: GeomLattice
    datum: AtomicDatum
    d0: dict[int, QMatrix]  # atom index -> map from V_0 coordinates to U_a coordinates
    coxeter_numbers: dict[int, Fraction] = field(default_factory=dict)
    failures: list[dict] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.failures


class SectionError(ValueError):
    def __init__(self, message: str, witness):
        super().__init__(message)
        self.witness = witness


def _inclusion(datum: AtomicDatum, i: int) -> QMatrix:
    amb = datum.ambient
    u = datum.atom_spaces[i]
    cols = [amb.coordinates(b) for b in u.basis]
    return QMatrix.from_columns(cols, amb.dim) if cols else QMatrix.zeros(amb.dim, 0)


def _truncated_composite(s: CompatibleSection, x: int) -> QMatrix:
    """The endomorphism of V_0 given by the boundary after the x-truncated section."""
    L = s.lattice
    m0 = s.datum.ambient.dim
    acc = QMatrix.zeros(m0, m0)
    for i in L.atom_set(x):
        if s.datum.atom_spaces[i].dim:
            acc = acc + _inclusion(s.datum, i) @ s.d0[i]
    return acc


def span_below(datum: AtomicDatum, lattice: GeomLattice, x: int) -> Subspace:
    """U^x in V_0 coordinates."""
    vecs = []
    for i in lattice.atom_set(x):
        vecs += _inclusion(datum, i).columns()
    return Subspace.span(vecs, datum.ambient.dim)


def verify_section(lattice: GeomLattice, datum: AtomicDatum, d0: dict[int, QMatrix],
                   flats: Iterable[int] | None = None, orthogonal: bool = True) -> CompatibleSection:
    """Check the two section conditions and read off the scalars h^x.

    ``flats`` defaults to the indecomposable flats; each must act on U^x by a scalar.
    The vanishing across decomposable pairs is only required for orthogonal data.
    """
    s = CompatibleSection(lattice, datum, d0)
    flats = lattice.indecomposables() if flats is None else list(flats)
    for x in flats:
        ux = span_below(datum, lattice, x)
        comp = _truncated_composite(s, x)
        h = None
        for v in ux.basis:
            image = comp.apply(v)
            p = next(j for j, a in enumerate(v) if a)
            ratio = image[p] / v[p]
            if tuple(ratio * a for a in v) != image:
                s.failures.append({"check": "scalar", "flat": x})
                break
            if h is None:
                h = ratio
            elif h != ratio:
                s.failures.append({"check": "scalar", "flat": x})
                break
        else:
            s.coxeter_numbers[x] = h if h is not None else Fraction(0)
    for i, j in combinations(range(lattice.n_atoms) if orthogonal else (), 2):
        top = lattice.join(lattice.atoms[i], lattice.atoms[j])
        if lattice.is_indecomposable(top):
            continue
        for a, b in ((i, j), (j, i)):
            if datum.atom_spaces[a].dim and datum.atom_spaces[b].dim:
                if not (d0[b] @ _inclusion(datum, a)).is_zero():
                    s.failures.append({"check": "decomposable_component", "atoms": [a, b]})
    return s


def coxeter_section(arr: Arrangement, al: ArrangementLattice | None = None, check_family: bool = True,
                    inner: Sequence[Fraction] | None = None, weights: Sequence[Fraction] | None = None) -> CompatibleSection:
    """Reflection section v -> (2 (v, u_a) u_a / (u_a, u_a))_a on the defining datum.

    ``inner`` is an optional diagonal inner product and ``weights`` optional
    per-hyperplane factors; both default to 1.
    """
    al = al or build_lattice(arr)
    datum = defining_datum(arr)
    n = arr.ambient_dim
    g = [Fraction(1)] * n if inner is None else [Fraction(c) for c in inner]
    d0 = {}
    for i, u in enumerate(datum.atom_spaces):
        b = u.basis[0]
        gb = [c * a for c, a in zip(g, b)]
        w = Fraction(1) if weights is None else Fraction(weights[i])
        d0[i] = QMatrix.from_rows([[2 * w * a / dot(b, gb) for a in gb]], n)
    s = verify_section(al.lattice, datum, d0)
    if s.failures:
        raise SectionError("not a compatible section", s.failures[0])
    if check_family and inner is None and weights is None:
        L = al.lattice
        for x, h in s.coxeter_numbers.items():
            expected = Fraction(2 * len(L.atom_set(x)), L.ranks[x])
            if h != expected:
                raise SectionError(f"Coxeter number at flat {x} is {h}, expected {expected}", x)
    return s


def phi_section(n: int, m: int, al: ArrangementLattice | None = None) -> CompatibleSection:
    """Section for Phi(n, m) transported from its realization as a restriction of D_{n+m}.

    Coordinates 1..m of Phi(n, m) come from two coordinates of D_{n+m} each, so
    the induced inner product is 1/2 there, and each hyperplane carries the sum
    of |proj u'|^2 / |u'|^2 over the hyperplanes u' of D_{n+m} mapping to it.
    """
    from .arrangement import phi_family

    arr = phi_family(n, m)
    doubled = lambda i: i < m
    inner = [Fraction(1, 2) if doubled(i) else Fraction(1) for i in range(n)]
    weights = []
    for u in arr.normals:
        support = [i for i, a in enumerate(u) if a]
        if len(support) == 1:
            weights.append(Fraction(1))
        else:
            k = sum(doubled(i) for i in support)
            weights.append((Fraction(1), Fraction(3, 2), Fraction(2))[k])
    return coxeter_section(arr, al or build_lattice(arr), inner=inner, weights=weights)


def family_section(arr: Arrangement, al: ArrangementLattice | None = None) -> CompatibleSection:
    """Coxeter section for A/B/D names, the transported section for Phi(n, m)."""
    m = re.fullmatch(r"Phi\((\d+),(\d+)\)", arr.name or "")
    if m:
        return phi_section(int(m.group(1)), int(m.group(2)), al)
    return coxeter_section(arr, al)


@dataclass
class RestrictedSection:
    section: CompatibleSection
    restriction: object  # arrangement.Restriction
    lattice: ArrangementLattice


def restricted_section(arr: Arrangement, al: ArrangementLattice, x: int) -> RestrictedSection:
    """Section for the restriction to x: sum over hyperplanes with the same image."""
    res = restriction(arr, al, x)
    rarr = res.arrangement
    ral = build_lattice(rarr)
    datum = defining_datum(rarr)
    bmat = res.basis.matrix()
    m = rarr.ambient_dim
    rows = {i: [ZERO] * m for i in range(len(rarr))}
    for h, img in res.image.items():
        u = arr.normals[h]
        bu = bmat.apply(u)  # (b_t, u_H) for each basis vector, i.e. the pairing with c
        c = 2 * res.scale[h] / dot(u, u)
        rows[img] = [r + c * a for r, a in zip(rows[img], bu)]
    # rarr normals are line representatives, hence already the echelon basis of U_a
    d0 = {i: QMatrix.from_rows([rows[i]], m) for i in rows}
    s = verify_section(ral.lattice, datum, d0)
    if s.failures:
        raise SectionError("restricted section fails", s.failures[0])
    return RestrictedSection(s, res, ral)


def generic_rank2_section(arr: Arrangement, al: ArrangementLattice | None = None) -> CompatibleSection:
    """Sum over pairs of atoms of the inverse of U_a + U_b -> U (rank two only)."""
    al = al or build_lattice(arr)
    if al.lattice.rank != 2:
        raise ValueError("generic rank-two section needs a rank-two arrangement")
    datum = defining_datum(arr)
    n = arr.ambient_dim
    bs = [u.basis[0] for u in datum.atom_spaces]
    rows = [[ZERO] * n for _ in bs]
    for i, j in combinations(range(len(bs)), 2):
        g = QMatrix.from_rows([[dot(bs[i], bs[i]), dot(bs[i], bs[j])], [dot(bs[j], bs[i]), dot(bs[j], bs[j])]])
        ginv = solve(g, QMatrix.identity(2))
        for a, row in ((i, 0), (j, 1)):
            coeff = [ginv.data[row][0] * p + ginv.data[row][1] * r for p, r in zip(bs[i], bs[j])]
            rows[a] = [x + y for x, y in zip(rows[a], coeff)]
    d0 = {i: QMatrix.from_rows([rows[i]], n) for i in range(len(bs))}
    s = verify_section(al.lattice, datum, d0)
    if s.failures:
        raise SectionError("generic rank-two section fails", s.failures[0])
    return s


def coxeter_number_identity(s: CompatibleSection) -> dict:
    L = s.lattice
    h = s.coxeter_numbers
    failures = []
    checked = 0
    for z in h:
        for x in h:
            if not L.leq(x, z):
                continue
            rhs = sum((h[y] - h[x] for y in L.upper_covers(x) if y in h and L.leq(y, z)), Fraction(0))
            checked += 1
            if h[z] - h[x] != rhs:
                failures.append({"x": x, "z": z, "lhs": q_str(h[z] - h[x]), "rhs": q_str(rhs)})
    return {"passed": not failures, "pairs_checked": checked, "failures": failures}


# ---------------------------------------------------------------------------
# L-homotopies


@dataclass
class LHomotopy:
    complex: GradedComplex
    section: CompatibleSection
    blocks: dict[tuple[int, int], QMatrix]  # d_{x;y}: V_x -> V_y for x covered by y
    h: dict[int, Fraction]
    indecomposable_only: bool = True

    def block(self, x: int, y: int) -> QMatrix:
        hit = self.blocks.get((x, y))
        return hit if hit is not None else QMatrix.zeros(self.complex.dims[y], self.complex.dims[x])

    def d0_block(self, a_flat: int) -> QMatrix:
        i = self.complex.lattice.atom_set(a_flat)[0]
        return self.section.d0[i]

    def to_json(self) -> dict:
        return {
            "h": {str(x): q_str(v) for x, v in sorted(self.h.items())},
            "blocks": {f"{x}->{y}": m.to_json() for (x, y), m in sorted(self.blocks.items())},
        }


class HomotopyError(ValueError):
    def __init__(self, message: str, pair):
        super().__init__(message)
        self.pair = pair


def _lower_part(C: GradedComplex, hom: "LHomotopy", x: int, y: int) -> QMatrix:
    """(d^y_{i-1} o boundary_x) as a map V_x -> V_{<y} (stacked over the nonzero lower covers of y)."""
    L = C.lattice
    targets = [t for t in L.lower_covers(y) if C.dims[t]]
    blocks = []
    for t in targets:
        acc = QMatrix.zeros(C.dims[t], C.dims[x])
        if L.ranks[x] == 1:
            if L.leq(t, y):
                acc = hom.d0_block(t) @ C.block(x, L.bottom)
        else:
            for xp in L.lower_covers(x):
                if C.dims[xp] and (xp, t) in hom.blocks:
                    acc = acc + hom.blocks[(xp, t)] @ C.block(x, xp)
        blocks.append([acc])
    return block_matrix(blocks) if blocks else QMatrix.zeros(0, C.dims[x])


def build_homotopy(C: GradedComplex, s: CompatibleSection, indecomposable_only: bool = True,
                   h: dict[int, Fraction] | None = None, verify: bool = True) -> LHomotopy:
    """Solve boundary_y o d_{x;y} = h^y id - d^y o boundary_x by increasing rank of x."""
    L = C.lattice
    hvals = dict(s.coxeter_numbers if h is None else h)
    hom = LHomotopy(C, s, {}, hvals, indecomposable_only)
    for r in range(1, L.rank):
        for x in L.by_rank[r]:
            if not C.dims[x]:
                continue
            for y in L.upper_covers(x):
                if indecomposable_only and not L.is_indecomposable(y):
                    continue
                if y not in hvals:
                    raise HomotopyError(f"no scalar h for flat {y}", (x, y))
                targets = [t for t in L.lower_covers(y) if C.dims[t]]
                rhs_blocks = []
                for t in targets:
                    ident = QMatrix.identity(C.dims[x], hvals[y]) if t == x else QMatrix.zeros(C.dims[t], C.dims[x])
                    rhs_blocks.append([ident])
                rhs = block_matrix(rhs_blocks) - _lower_part(C, hom, x, y)
                dy = C.boundary_of(y)
                sol = solve(dy, rhs)
                if sol is None:
                    raise HomotopyError(f"recursion has no solution at ({x}, {y})", (x, y))
                if C.dims[y]:
                    hom.blocks[(x, y)] = sol
    if verify:
        rep = verify_homotopy(hom)
        if not rep["passed"]:
            raise HomotopyError("homotopy identity fails", rep["failures"][0])
    return hom


def _parts_for(L: GeomLattice, z: int, indecomposable_only: bool) -> list[int]:
    if z == L.bottom:
        return []
    return list(L.decompose(z)) if indecomposable_only else [z]


def homotopy_defects(hom: LHomotopy, z: int) -> list[dict]:
    """Check (1/h)(boundary d + d boundary) = id on every degree of the interval below z.

    For decomposable z the homotopy is the direct sum over the parts of z, each
    scaled by its own 1/h.
    """
    C, L = hom.complex, hom.complex.lattice
    parts = _parts_for(L, z, hom.indecomposable_only)
    failures = []
    for p in parts:
        if hom.h.get(p, 0) == 0:
            failures.append({"flat": z, "check": "zero_scalar", "part": p})
    if failures:
        return failures
    # degree zero: U^z is the direct sum of the U^p and the truncated section inverts the boundary on each
    if C.bottom_basis is not None and parts:
        total = span_below(hom.section.datum, L, z)
        if sum(span_below(hom.section.datum, L, p).dim for p in parts) != total.dim:
            failures.append({"flat": z, "check": "direct_sum"})
        for p in parts:
            comp = _truncated_composite(hom.section, p)
            for v in span_below(hom.section.datum, L, p).basis:
                if comp.apply(v) != tuple(hom.h[p] * a for a in v):
                    failures.append({"flat": z, "check": "degree0", "part": p})
                    break
    for x in L.below(z):
        r = L.ranks[x]
        if r == 0 or not C.dims[x]:
            continue
        owner = next((p for p in parts if L.leq(x, p)), None)
        if owner is None:
            failures.append({"flat": z, "check": "support", "piece": x})
            continue
        scale = 1 / hom.h[owner]
        below_owner = set(L.below(owner))
        result: dict[int, QMatrix] = {}

        def add(t, m):
            result[t] = result[t] + m if t in result else m

        # d o boundary
        for xp in L.lower_covers(x):
            if not C.dims[xp]:
                continue
            dx = C.block(x, xp)
            if r == 1:
                for t in L.by_rank[1]:
                    if t in below_owner and C.dims[t]:
                        add(t, hom.d0_block(t) @ dx)
            else:
                for t in L.upper_covers(xp):
                    if t in below_owner and (xp, t) in hom.blocks:
                        add(t, hom.blocks[(xp, t)] @ dx)
        # boundary o d
        for y in L.upper_covers(x):
            if y in below_owner and (x, y) in hom.blocks:
                for t in L.lower_covers(y):
                    if C.dims[t]:
                        add(t, C.block(y, t) @ hom.blocks[(x, y)])
        for t in L.by_rank[r]:
            if not C.dims[t] or t not in below_owner and t != x:
                continue
            got = result.get(t, QMatrix.zeros(C.dims[t], C.dims[x])).scale(scale)
            want = QMatrix.identity(C.dims[x]) if t == x else QMatrix.zeros(C.dims[t], C.dims[x])
            if got != want:
                failures.append({"flat": z, "check": "identity", "piece": x, "target": t})
        for t in result:
            if t not in below_owner and not result[t].is_zero():
                failures.append({"flat": z, "check": "leak", "piece": x, "target": t})
    return failures


def verify_homotopy(hom: LHomotopy, flats: Iterable[int] | None = None) -> dict:
    L = hom.complex.lattice
    if flats is None:
        if hom.indecomposable_only:
            flats = [z for z in L.elements if z != L.bottom]
        else:
            flats = [z for z in L.elements if hom.h.get(z, 0) != 0]
    failures = []
    checked = 0
    for z in flats:
        checked += 1
        failures += homotopy_defects(hom, z)
    # structural shape: blocks only go one cover up
    for (x, y) in hom.blocks:
        if y not in L.upper_covers(x):
            failures.append({"check": "shape", "pair": [x, y]})
    return {"passed": not failures, "intervals_checked": checked, "failures": failures[:20]}


# ---------------------------------------------------------------------------
# the constant-coefficient variant


def os_homotopy_check(lattice: GeomLattice, atom_index: int = 0) -> dict:
    """Recursion for the constant datum with the section hitting a single atom.

    The resulting maps should behave like multiplication by e_a: they vanish
    except from x to x v a (a not below x), square to zero, and are injective there.
    """
    L = lattice
    datum = constant_datum(L)
    C = minimal_complex(L, datum)
    d0 = {i: QMatrix.from_rows([[1 if i == atom_index else 0]], 1) for i in range(L.n_atoms)}
    a = L.atoms[atom_index]
    flats = [x for x in L.elements if x != L.bottom]
    s = verify_section(L, datum, d0, flats=flats, orthogonal=False)
    failures = list(s.failures)
    expected = {x: Fraction(1 if L.leq(a, x) else 0) for x in flats}
    if s.coxeter_numbers != expected:
        failures.append({"check": "scalars"})
    hom = build_homotopy(C, s, indecomposable_only=False, verify=False)
    ver = verify_homotopy(hom)
    failures += ver["failures"]
    for (x, y), m in hom.blocks.items():
        if m.is_zero():
            continue
        if L.leq(a, x) or y != L.join(x, a):
            failures.append({"check": "pattern", "pair": [x, y]})
        elif m.rank() != C.dims[x]:
            failures.append({"check": "injective", "pair": [x, y]})
    for (x, y), m in hom.blocks.items():
        for w in L.upper_covers(y):
            if (y, w) in hom.blocks and not (hom.blocks[(y, w)] @ m).is_zero():
                failures.append({"check": "square_zero", "pair": [x, y, w]})
    return {
        "passed": not failures,
        "atom": a,
        "intervals": ver["intervals_checked"],
        "scalars": {str(x): q_str(v) for x, v in sorted(s.coxeter_numbers.items())},
        "failures": failures[:20],
    }


def os_ranks(lattice: GeomLattice) -> dict[int, int]:
    """|mu(0, x)| for every flat via the Moebius recursion (oracle for the constant datum)."""
    mu = {lattice.bottom: 1}
    for x in lattice.elements:
        if x == lattice.bottom:
            continue
        mu[x] = -sum(mu[y] for y in lattice.below(x) if y != x)
    return {x: abs(v) for x, v in mu.items()}
