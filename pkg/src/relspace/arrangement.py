"""Rational central hyperplane arrangements, their lattices, restrictions and projections.

A hyperplane H of U* is stored through a normal vector u_H in U = Q^n.  A flat
is represented on the U side by the span of the normals of the hyperplanes
containing it, so every flat is a :class:`Subspace` of one ambient space.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .exactq import (
    QMatrix,
    Subspace,
    ZERO,
    kernel,
    line_representative,
    q_str,
    solve,
    vec,
)
from .lattice import GeomLattice, TruncationMap, _bits, _mask


@dataclass(frozen=True)
class Arrangement:
    ambient_dim: int
    normals: tuple[tuple[Fraction, ...], ...]
    name: str = ""

    def __post_init__(self):
        seen = set()
        for u in self.normals:
            if len(u) != self.ambient_dim:
                raise ValueError(f"normal {u} does not live in dimension {self.ambient_dim}")
            if not any(u):
                raise ValueError("zero normal vector")
            rep = line_representative(u)
            if rep in seen:
                raise ValueError(f"proportional normals: {[q_str(a) for a in u]}")
            seen.add(rep)

    @classmethod
    def from_vectors(cls, vectors: Sequence[Sequence], ambient_dim: int | None = None, name: str = "") -> "Arrangement":
        normals = tuple(vec(v) for v in vectors)
        if ambient_dim is None:
            if not normals:
                raise ValueError("ambient dimension needed for an empty arrangement")
            ambient_dim = len(normals[0])
        return cls(ambient_dim, normals, name)

    @classmethod
    def from_json(cls, data: dict) -> "Arrangement":
        if not isinstance(data, dict) or "normals" not in data:
            raise ValueError("arrangement JSON needs a 'normals' list")
        normals = data["normals"]
        if not isinstance(normals, list) or not all(isinstance(r, list) for r in normals):
            raise ValueError("'normals' must be a list of lists")
        dim = data.get("dim", len(normals[0]) if normals else None)
        if not isinstance(dim, int) or dim < 0:
            raise ValueError("'dim' must be a non-negative integer")
        return cls.from_vectors(normals, dim, str(data.get("name", "")))

    def to_json(self) -> dict:
        return {"dim": self.ambient_dim, "name": self.name, "normals": [[q_str(a) for a in u] for u in self.normals]}

    def __len__(self) -> int:
        return len(self.normals)

    def span(self) -> Subspace:
        return Subspace.span(self.normals, self.ambient_dim)

    @property
    def rank(self) -> int:
        return self.span().dim

    def is_essential(self) -> bool:
        return self.rank == self.ambient_dim


@dataclass
class ArrangementLattice:
    arrangement: Arrangement
    lattice: GeomLattice
    flat_span: tuple[Subspace, ...]

    def flat_hyperplanes(self, x: int) -> tuple[int, ...]:
        return self.lattice.atom_set(x)

    def flat_of_span(self, s: Subspace) -> int:
        """Id of the flat whose span is s (raises KeyError if s is not a flat)."""
        mask = _mask(i for i, u in enumerate(self.arrangement.normals) if s.contains_vector(u))
        x = self.lattice.find(mask)
        if x is None or self.flat_span[x] != s:
            raise KeyError("subspace is not the span of a flat")
        return x

    def atom(self, h: int) -> int:
        return self.lattice.atoms[h]


def build_lattice(arr: Arrangement) -> ArrangementLattice:
    """Enumerate all flats rank by rank through closures of spans."""
    n, normals = arr.ambient_dim, arr.normals
    spans: dict[int, Subspace] = {0: Subspace.zero(n)}
    ranks: dict[int, int] = {0: 0}
    layer = [0]
    while layer:
        nxt: dict[int, Subspace] = {}
        for mask in layer:
            s = spans[mask]
            done = mask
            for h, u in enumerate(normals):
                if done >> h & 1:
                    continue
                t = s.sum(Subspace.span([u], n))
                closed = _mask(i for i, v in enumerate(normals) if t.contains_vector(v))
                done |= closed
                if closed not in nxt:
                    nxt[closed] = t
        for mask, t in nxt.items():
            spans[mask] = t
            ranks[mask] = t.dim
        layer = list(nxt)
    lat = GeomLattice([_bits(m) for m in spans], len(normals), ranks=ranks)
    return ArrangementLattice(arr, lat, tuple(spans[m] for m in lat.masks))


# ---------------------------------------------------------------------------
# localization, restriction, essentialization


def localize(arr: Arrangement, al: ArrangementLattice, x: int) -> Arrangement:
    """Hyperplanes containing x, in the same ambient space."""
    hs = al.lattice.atom_set(x)
    return Arrangement(arr.ambient_dim, tuple(arr.normals[h] for h in hs), f"{arr.name}|loc{x}" if arr.name else "")


@dataclass
class Restriction:
    """The restriction to a flat x, realized in coordinates of flat_span(x)^perp.

    ``basis`` is the echelon basis b_1..b_m of the orthogonal complement W of
    flat_span(x); a vector w of W has coordinates c with w = sum c_i b_i.  The
    induced inner product in these coordinates is ``gram``.  Each parent
    hyperplane H not containing x maps to ``image[H]`` with
    proj_x(u_H) = ``scale[H]`` times the image normal.
    """

    parent: Arrangement
    flat: int
    arrangement: Arrangement
    basis: Subspace
    gram: QMatrix
    image: dict[int, int]
    scale: dict[int, Fraction]

    def coordinates(self, w: Sequence[Fraction]) -> tuple[Fraction, ...]:
        """Coordinates of the orthogonal projection of w onto W."""
        b = self.basis.matrix()
        rhs = QMatrix.from_rows([[a] for a in b.apply(vec(w))], 1)
        sol = solve(self.gram, rhs)
        return sol.column(0)

    def lift(self, c: Sequence[Fraction]) -> tuple[Fraction, ...]:
        return self.basis.matrix().T.apply(vec(c))


def restriction(arr: Arrangement, al: ArrangementLattice, x: int) -> Restriction:
    w = al.flat_span[x].annihilator()
    b = w.matrix()
    gram = b @ b.T
    inside = set(al.lattice.atom_set(x))
    reps: list[tuple[Fraction, ...]] = []
    index: dict[tuple[Fraction, ...], int] = {}
    image, scale = {}, {}
    tmp = Restriction(arr, x, Arrangement(w.dim, ()), w, gram, {}, {})
    for h, u in enumerate(arr.normals):
        if h in inside:
            continue
        c = tmp.coordinates(u)
        rep = line_representative(c)
        if rep not in index:
            index[rep] = len(reps)
            reps.append(rep)
        image[h] = index[rep]
        scale[h] = next(a for a in c if a) / next(a for a in rep if a)
    name = f"{arr.name}|res{x}" if arr.name else ""
    return Restriction(arr, x, Arrangement(w.dim, tuple(reps), name), w, gram, image, scale)


def restrict(arr: Arrangement, al: ArrangementLattice, x: int) -> Arrangement:
    return restriction(arr, al, x).arrangement


def essentialize(arr: Arrangement) -> Arrangement:
    """Coordinates of the normals in the echelon basis of their span."""
    s = arr.span()
    normals = tuple(s.coordinates(u) for u in arr.normals)
    return Arrangement(s.dim, normals, arr.name)


# ---------------------------------------------------------------------------
# projections


class NotInGeneralPosition(ValueError):
    def __init__(self, condition: str, flat: int, detail: str = ""):
        super().__init__(f"general position fails ({condition}) at flat {flat}{': ' + detail if detail else ''}")
        self.condition = condition
        self.flat = flat


@dataclass
class ProjectionData:
    parent: Arrangement
    parent_lattice: ArrangementLattice
    P: Subspace
    k: int
    projected: Arrangement
    projected_lattice: ArrangementLattice
    truncation: TruncationMap
    # flats of rank k+1 mapping onto each hyperplane of the projection (singletons in general position)
    hyperplane_flats: tuple[tuple[int, ...], ...]

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "P": self.P.to_json(),
            "projected": self.projected.to_json(),
            "hyperplane_flats": [list(g) for g in self.hyperplane_flats],
        }


def project(arr: Arrangement, P: Subspace, al: ArrangementLattice | None = None, strict: bool = True) -> ProjectionData:
    """Project the arrangement to P (inside the span of the normals).

    Raises :class:`NotInGeneralPosition` naming the failing condition and flat.
    With ``strict=False`` only transversality is required: flats of rank k+1
    with the same image are merged into one hyperplane, which then carries
    all of them in ``hyperplane_flats``.
    """
    al = al or build_lattice(arr)
    lat = al.lattice
    total = arr.span()
    if P.ambient_dim != arr.ambient_dim or not total.contains(P):
        raise ValueError("P must be a subspace of the span of the normals")
    k = total.dim - P.dim
    if not 0 <= k <= lat.rank - 1:
        raise ValueError(f"codimension k={k} must satisfy 0 <= k <= rank - 1 = {lat.rank - 1}")
    for x in lat.by_rank[k]:
        if al.flat_span[x].intersect(P).dim:
            raise NotInGeneralPosition("transversality", x)
    lines: list[tuple[Fraction, ...]] = []
    groups: list[list[int]] = []
    seen: dict[tuple[Fraction, ...], int] = {}
    for x in lat.by_rank[k + 1]:
        ell = al.flat_span[x].intersect(P)
        rep = line_representative(P.coordinates(ell.basis[0]))
        if rep in seen:
            if strict:
                raise NotInGeneralPosition("distinct_images", x, f"same image as flat {groups[seen[rep]][0]}")
            groups[seen[rep]].append(x)
            continue
        seen[rep] = len(lines)
        lines.append(rep)
        groups.append([x])
    name = f"{arr.name}|P{k}" if arr.name else ""
    proj = Arrangement(P.dim, tuple(lines), name)
    pl = build_lattice(proj)
    mapping = {}
    for x in lat.elements:
        if lat.ranks[x] < k:
            continue
        sx = al.flat_span[x].intersect(P)
        coords = Subspace.span([P.coordinates(v) for v in sx.basis], P.dim)
        mask = _mask(j for j, u in enumerate(lines) if coords.contains_vector(u))
        mapping[x] = pl.lattice.closure(mask)
    t = TruncationMap(lat, pl.lattice, k, mapping)
    return ProjectionData(arr, al, P, k, proj, pl, t, tuple(tuple(g) for g in groups))


def vandermonde_subspace(nodes: Sequence, k: int) -> Subspace:
    """Kernel of the (k+1) x n Vandermonde matrix with rows t_j^i, i = 0..k."""
    t = vec(nodes)
    if any(b <= a for a, b in zip(t, t[1:])):
        raise ValueError("nodes must be strictly increasing")
    a = QMatrix.from_rows([[tj ** i for tj in t] for i in range(k + 1)], len(t))
    return kernel(a)


def random_general_position(arr: Arrangement, k: int, seed: int = 0, max_retries: int = 64,
                            al: ArrangementLattice | None = None) -> ProjectionData:
    al = al or build_lattice(arr)
    total = arr.span()
    r = total.dim
    if not 0 <= k <= r - 1:
        raise ValueError(f"k={k} must satisfy 0 <= k <= rank - 1 = {r - 1}")
    if k == 0:
        return project(arr, total, al)
    rng = random.Random(seed)
    bound = 1
    last: Exception | None = None
    for _ in range(max_retries):
        coeffs = [[rng.randint(-bound, bound) for _ in range(r)] for _ in range(r - k)]
        rows = [[sum((c * b[j] for c, b in zip(row, total.basis)), ZERO) for j in range(arr.ambient_dim)] for row in coeffs]
        P = Subspace.span(rows, arr.ambient_dim)
        bound *= 2
        if P.dim != r - k:
            continue
        try:
            return project(arr, P, al)
        except NotInGeneralPosition as exc:
            last = exc
    raise RuntimeError(f"no general-position subspace found after {max_retries} tries (last: {last})")


# ---------------------------------------------------------------------------
# reflection families


def _unit(n: int, i: int, s: int = 1) -> list[int]:
    v = [0] * n
    v[i] = s
    return v


def phi_family(n: int, m: int) -> Arrangement:
    """Normals e_i - e_j, e_i + e_j (i < j) followed by e_i for i <= m."""
    if n < 1 or not 0 <= m <= n:
        raise ValueError("Phi(n, m) needs n >= 1 and 0 <= m <= n")
    normals = []
    for i, j in combinations(range(n), 2):
        minus = _unit(n, i)
        minus[j] = -1
        plus = _unit(n, i)
        plus[j] = 1
        normals += [minus, plus]
    normals += [_unit(n, i) for i in range(m)]
    if not normals:
        raise ValueError("Phi(1, 0) has no hyperplanes")
    if m == n:
        name = f"B{n}"
    elif m == 0:
        name = f"D{n}"
    else:
        name = f"Phi({n},{m})"
    return Arrangement.from_vectors(normals, n, name)


def type_a(n: int) -> Arrangement:
    """The braid arrangement e_i - e_j in Q^(n+1) (not essential)."""
    if n < 1:
        raise ValueError("A_n needs n >= 1")
    normals = []
    for i, j in combinations(range(n + 1), 2):
        v = _unit(n + 1, i)
        v[j] = -1
        normals.append(v)
    return Arrangement.from_vectors(normals, n + 1, f"A{n}")


def coxeter_family(family: str, n: int, m: int | None = None, essential: bool = False) -> Arrangement:
    family = family.upper()
    if family == "A":
        arr = type_a(n)
        return essentialize(arr) if essential else arr
    if family == "B":
        return phi_family(n, n)
    if family == "D":
        if n < 2:
            raise ValueError("D_n needs n >= 2")
        return phi_family(n, 0)
    if family == "PHI":
        if m is None:
            raise ValueError("Phi needs m")
        return phi_family(n, m)
    raise ValueError(f"unknown family {family!r}")


def parse_family(tag: str) -> Arrangement:
    """Parse tags such as "A3", "B2", "D4", "Phi(4,2)"."""
    text = tag.replace(" ", "")
    m = re.fullmatch(r"(?i)(phi)\(?(\d+),(\d+)\)?", text)
    if m:
        return coxeter_family("PHI", int(m.group(2)), int(m.group(3)))
    m = re.fullmatch(r"(?i)([abd])(\d+)", text)
    if m:
        return coxeter_family(m.group(1), int(m.group(2)))
    raise ValueError(f"cannot parse family tag {tag!r}")
