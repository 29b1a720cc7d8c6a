"""Covectors of a real arrangement and the face lattice of its dual zonotope.

A face is stored through its covector: sign_H = sign <lambda, u_H> for a
witness functional lambda.  Chambers (all signs nonzero) are the vertices of
the zonotope, the zero covector is the whole zonotope.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

from .arrangement import Arrangement, ArrangementLattice, build_lattice, restriction
from .exactq import QMatrix, Subspace, ZERO, dot, kernel, line_representative, rank_of_rows, vec, env_cap

DEFAULT_FACE_CAP = env_cap("RELSPACE_FACE_CAP", 100000)


class TooManyFaces(ValueError):
    def __init__(self, estimate: int, cap: int):
        super().__init__(f"face enumeration would exceed the cap {cap} (reached {estimate})")
        self.estimate = estimate
        self.cap = cap


def _sign(a: Fraction) -> int:
    return (a > 0) - (a < 0)


def sign_string(signs: Sequence[int]) -> str:
    return "".join("+" if s > 0 else "-" if s < 0 else "0" for s in signs)


# ---------------------------------------------------------------------------
# chambers


def chambers(forms: Sequence[Sequence[Fraction]], dim: int, cap: int | None = None) -> list[tuple[Fraction, ...]]:
    """Interior witnesses, one per chamber, of the central arrangement of linear forms on Q^dim.

    Zero forms are ignored and proportional forms count once.  Hyperplanes are
    added one at a time; the chambers cut by a new hyperplane f are found from
    the chambers of the arrangement restricted to f = 0.
    """
    cap = DEFAULT_FACE_CAP if cap is None else cap
    distinct: list[tuple[Fraction, ...]] = []
    seen = set()
    for f in forms:
        f = vec(f)
        if not any(f):
            continue
        rep = line_representative(f)
        if rep not in seen:
            seen.add(rep)
            distinct.append(f)
    return _chambers(distinct, dim, cap)


def _chambers(forms: list[tuple[Fraction, ...]], dim: int, cap: int) -> list[tuple[Fraction, ...]]:
    current = [tuple(ZERO for _ in range(dim))]
    done: list[tuple[Fraction, ...]] = []
    for f in forms:
        if not done:
            current = [f, tuple(-a for a in f)]
            done.append(f)
            continue
        basis = kernel(QMatrix.from_rows([f], dim)).basis
        restricted = [tuple(dot(g, b) for b in basis) for g in done]
        cut_points = []
        for c in chambers(restricted, dim - 1, cap):
            mu = tuple(sum((ci * b[j] for ci, b in zip(c, basis)), ZERO) for j in range(dim))
            cut_points.append(mu)
        keys = {tuple(_sign(dot(g, mu)) for g in done): mu for mu in cut_points}
        nxt = []
        for w in current:
            key = tuple(_sign(dot(g, w)) for g in done)
            mu = keys.get(key)
            if mu is None:
                nxt.append(w)
                continue
            # step off the hyperplane along f without crossing any other one
            eps = Fraction(1)
            for g in done:
                gn = dot(g, f)
                if gn:
                    eps = min(eps, abs(dot(g, mu)) / abs(gn) / 2)
            nxt.append(tuple(a + eps * b for a, b in zip(mu, f)))
            nxt.append(tuple(a - eps * b for a, b in zip(mu, f)))
        current = nxt
        done.append(f)
        if len(current) > cap:
            raise TooManyFaces(len(current), cap)
    return current


# ---------------------------------------------------------------------------
# faces


@dataclass
class CovectorFace:
    signs: tuple[int, ...]
    type_flat: int | None          # None for the empty face
    dim: int
    witness: tuple[Fraction, ...] | None
    barycenter: tuple[Fraction, ...] | None
    vertices_below: tuple[int, ...] = ()

    def to_json(self, ids: bool = True) -> dict:
        from .exactq import q_str

        return {
            "signs": sign_string(self.signs) if self.type_flat is not None else None,
            "type": self.type_flat,
            "dim": self.dim,
            "barycenter": [q_str(a) for a in self.barycenter] if self.barycenter is not None else None,
            "witness": [q_str(a) for a in self.witness] if self.witness is not None else None,
        }


@dataclass
class FaceLattice:
    arrangement: Arrangement
    lattice: ArrangementLattice
    faces: list[CovectorFace]
    by_dim: dict[int, list[int]]
    facet_pairs: list[tuple[int, int, int]] = field(default_factory=list)  # (lower, upper, sign)
    index: dict[tuple[int, ...], int] = field(default_factory=dict)

    def f_vector(self) -> tuple[int, ...]:
        n = self.lattice.lattice.rank
        return tuple(len(self.by_dim.get(j, [])) for j in range(n + 1))

    def vertices(self) -> list[int]:
        return self.by_dim.get(0, [])

    def edges(self) -> list[tuple[int, int, int]]:
        """(vertex, vertex, atom flat) for every edge of the zonotope."""
        out = []
        for e in self.by_dim.get(1, []):
            ends = [lo for lo, up, _ in self.facet_pairs if up == e]
            out.append((ends[0], ends[1], self.faces[e].type_flat))
        return out

    def to_json(self) -> dict:
        return {
            "f_vector": list(self.f_vector()),
            "faces": [dict(id=i, **f.to_json()) for i, f in enumerate(self.faces)],
            "facet_pairs": [[a, b, s] for a, b, s in self.facet_pairs],
        }


def _det_sign(rows: list[list[Fraction]]) -> int:
    """Sign of the determinant of a square rational matrix by elimination."""
    m = [list(r) for r in rows]
    n = len(m)
    sign = 1
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c]), None)
        if p is None:
            return 0
        if p != c:
            m[c], m[p] = m[p], m[c]
            sign = -sign
        if m[c][c] < 0:
            sign = -sign
        for r in range(c + 1, n):
            if m[r][c]:
                t = m[r][c] / m[c][c]
                m[r] = [a - t * b for a, b in zip(m[r], m[c])]
    return sign


def enumerate_faces(arr: Arrangement, al: ArrangementLattice | None = None, cap: int | None = None) -> FaceLattice:
    cap = DEFAULT_FACE_CAP if cap is None else cap
    if not arr.is_essential():
        raise ValueError("arrangement must be essential (essentialize it first)")
    al = al or build_lattice(arr)
    L = al.lattice
    n = arr.ambient_dim
    faces = [CovectorFace(tuple(), None, -1, None, None)]
    total = 0
    for x in L.elements:
        inside = set(L.atom_set(x))
        ann = al.flat_span[x].annihilator()
        basis = ann.basis
        forms = [tuple(dot(b, u) for b in basis) for h, u in enumerate(arr.normals) if h not in inside]
        for c in chambers(forms, len(basis), cap):
            lam = tuple(sum((ci * b[j] for ci, b in zip(c, basis)), ZERO) for j in range(n))
            signs = tuple(_sign(dot(lam, u)) for u in arr.normals)
            bary = tuple(sum((s * u[j] for s, u in zip(signs, arr.normals)), ZERO) for j in range(n))
            faces.append(CovectorFace(signs, x, L.ranks[x], lam, bary))
            total += 1
            if total > cap:
                raise TooManyFaces(total, cap)
    order = sorted(range(1, len(faces)), key=lambda i: (faces[i].dim, faces[i].type_flat, faces[i].signs))
    faces = [faces[0]] + [faces[i] for i in order]
    by_dim: dict[int, list[int]] = {-1: [0]}
    index = {}
    for i, f in enumerate(faces):
        if i:
            by_dim.setdefault(f.dim, []).append(i)
            index[f.signs] = i
    fl = FaceLattice(arr, al, faces, by_dim, [], index)
    _incidences(fl)
    return fl


def _incidences(fl: FaceLattice) -> None:
    L = fl.lattice.lattice
    faces = fl.faces
    vertices = fl.by_dim.get(0, [])
    for v in vertices:
        fl.facet_pairs.append((0, v, 1))
    bases = {x: fl.lattice.flat_span[x] for x in L.elements}
    for i, f in enumerate(faces):
        if f.dim < 1:
            continue
        f.vertices_below = tuple(v for v in vertices if all(s == 0 or s == t for s, t in zip(f.signs, faces[v].signs)))
        # facets: lower covers y of the type, signs agreeing off the zero set of f
        zero_f = set(L.atom_set(f.type_flat))
        for y in L.lower_covers(f.type_flat):
            zero_y = set(L.atom_set(y))
            for j in fl.by_dim.get(f.dim - 1, []):
                g = faces[j]
                if g.type_flat != y:
                    continue
                if any(g.signs[h] != f.signs[h] for h in range(len(f.signs)) if h not in zero_f):
                    continue
                fl.facet_pairs.append((j, i, _ep_sign(g, f, bases)))
            del zero_y
    fl.facet_pairs.sort()


def _ep_sign(lower: CovectorFace, upper: CovectorFace, bases: dict[int, Subspace]) -> int:
    """sign det of [w | B_{x(lower)}] in the echelon basis of the span of the upper face's type."""
    w = tuple(a - b for a, b in zip(upper.barycenter, lower.barycenter))
    big = bases[upper.type_flat]
    cols = [big.coordinates(w)] + [big.coordinates(b) for b in bases[lower.type_flat].basis]
    rows = [[c[r] for c in cols] for r in range(big.dim)]
    s = _det_sign(rows)
    if s == 0:
        raise ArithmeticError("degenerate orientation")
    return s


def faces_of_type(fl: FaceLattice, x: int) -> list[int]:
    return [i for i, f in enumerate(fl.faces) if f.type_flat == x]


def faces_above_type(fl: FaceLattice, x: int) -> list[int]:
    L = fl.lattice.lattice
    return [i for i, f in enumerate(fl.faces) if f.type_flat is not None and L.leq(x, f.type_flat)]


# ---------------------------------------------------------------------------
# Euler-Poincare complexes


def ep_matrices(fl: FaceLattice, coeff_dim: int = 1) -> list[QMatrix]:
    """delta_j : C_{j-1} -> C_j for j = 0..n, C_j spanned by the j-dimensional faces (C_{-1} by the empty face)."""
    n = fl.lattice.lattice.rank
    pos = {}
    for j in range(-1, n + 1):
        for t, i in enumerate(fl.by_dim.get(j, [])):
            pos[i] = t
    mats = []
    for j in range(0, n + 1):
        rows = len(fl.by_dim.get(j, []))
        cols = len(fl.by_dim.get(j - 1, []))
        data = [[ZERO] * cols for _ in range(rows)]
        for lo, up, s in fl.facet_pairs:
            if fl.faces[up].dim == j:
                data[pos[up]][pos[lo]] = Fraction(s)
        m = QMatrix.from_rows(data, cols)
        if coeff_dim != 1:
            m = _kron_identity(m, coeff_dim)
        mats.append(m)
    return mats


def _kron_identity(m: QMatrix, c: int) -> QMatrix:
    data = [[ZERO] * (m.cols * c) for _ in range(m.rows * c)]
    for i in range(m.rows):
        for j in range(m.cols):
            if m.data[i][j]:
                for t in range(c):
                    data[i * c + t][j * c + t] = m.data[i][j]
    return QMatrix.from_rows(data, m.cols * c)


def ep_complex(fl: FaceLattice, coeff_dim: int = 1) -> dict:
    mats = ep_matrices(fl, coeff_dim)
    sizes = [mats[0].cols] + [m.rows for m in mats]
    square_zero = all((mats[j + 1] @ mats[j]).is_zero() for j in range(len(mats) - 1))
    ranks = [rank_of_rows(m.data, m.cols) if m.rows and m.cols else 0 for m in mats]
    # homology at C_j: dim C_j - rank(out of C_j) - rank(into C_j)
    homology = []
    for j in range(len(sizes)):
        into = ranks[j - 1] if j >= 1 else 0
        out = ranks[j] if j < len(ranks) else 0
        homology.append(sizes[j] - out - into)
    return {
        "sizes": sizes,
        "square_zero": square_zero,
        "homology": homology,
        "exact": square_zero and not any(homology),
        "euler_characteristic": sum((-1) ** j * s for j, s in enumerate(sizes)),
    }


def h_vector(fl: FaceLattice) -> list[int]:
    """h_i = sum_j (-1)^(j-i) C(j, i) |E_j| over the nonempty faces."""
    from math import comb

    n = fl.lattice.lattice.rank
    f = fl.f_vector()
    return [sum((-1) ** (j - i) * comb(j, i) * f[j] for j in range(i, n + 1)) for i in range(n + 1)]


# ---------------------------------------------------------------------------
# restriction to a flat


def projected_zonotope_faces(arr: Arrangement, al: ArrangementLattice, x: int,
                             fl: FaceLattice | None = None) -> tuple[FaceLattice, dict]:
    """Faces of the zonotope of the restriction, matched with the faces of type >= x."""
    res = restriction(arr, al, x)
    rarr = res.arrangement
    if len(rarr) == 0:
        sub = FaceLattice(rarr, build_lattice(rarr), [CovectorFace((), None, -1, None, None),
                                                      CovectorFace((), 0, 0, (), ())], {-1: [0], 0: [1]}, [(0, 1, 1)], {(): 1})
    else:
        sub = enumerate_faces(rarr)
    fl = fl or enumerate_faces(arr, al)
    r = al.lattice.ranks[x]
    mapped = {}
    for i in faces_above_type(fl, x):
        f = fl.faces[i]
        img = [0] * len(rarr)
        for h, j in res.image.items():
            img[j] = f.signs[h] * _sign(res.scale[h])
        mapped[tuple(img)] = (i, f.dim - r)
    own = {f.signs: f.dim for f in sub.faces[1:]}
    ok = set(mapped) == set(own) and all(own[s] == d for s, (_, d) in mapped.items())
    return sub, {"bijection": ok, "faces": len(own)}


# ---------------------------------------------------------------------------
# brute-force oracle


def fm_feasible(eqs: list[Sequence[Fraction]], strict: list[Sequence[Fraction]], dim: int) -> bool:
    """Is there lambda with a.lambda = 0 for a in eqs and b.lambda > 0 for b in strict?

    Equalities are removed by passing to their joint kernel; the homogeneous
    strict system is then decided by Fourier-Motzkin elimination.
    """
    if eqs:
        basis = kernel(QMatrix.from_rows([vec(e) for e in eqs], dim)).basis
    else:
        basis = [tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim)]
    rows = [[dot(vec(b), v) for v in basis] for b in strict]
    nvar = len(basis)
    if any(not any(r) for r in rows):
        return False
    for var in range(nvar - 1, -1, -1):
        pos = [r for r in rows if r[var] > 0]
        neg = [r for r in rows if r[var] < 0]
        rest = [r for r in rows if r[var] == 0]
        for p in pos:
            for q in neg:
                rest.append([a * -q[var] + b * p[var] for a, b in zip(p, q)])
        rows = []
        seen = set()
        for r in rest:
            head = r[:var]
            if not any(head):
                return False
            lead = next(a for a in head if a)
            key = tuple(a / abs(lead) for a in head)
            if key not in seen:
                seen.add(key)
                rows.append(r[:var])
    return True


def brute_force_covectors(arr: Arrangement) -> set[tuple[int, ...]]:
    """All realizable sign vectors, by trying each of the 3^m candidates."""
    out = set()
    n = arr.ambient_dim
    for signs in product((-1, 0, 1), repeat=len(arr)):
        eqs = [u for s, u in zip(signs, arr.normals) if s == 0]
        strict = [tuple(s * a for a in u) for s, u in zip(signs, arr.normals) if s != 0]
        if fm_feasible(eqs, strict, n):
            out.add(signs)
    return out
