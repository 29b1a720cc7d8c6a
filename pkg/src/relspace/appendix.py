"""Closed-form relation complexes for the A, B and Phi(n, m) families with explicit homotopies.

Indices follow the usual 1-based convention: coordinate i is the basis vector
e_i of the ambient space, stored at position i - 1.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Callable

from .arrangement import Arrangement, ArrangementLattice, build_lattice, phi_family, type_a
from .complex import (GradedComplex, HomotopyError, build_homotopy, defining_datum, family_section,
                      minimal_complex, verify_section)
from .exactq import QMatrix, Subspace, kernel, q_str, solve

Vec = dict  # label -> Fraction


def _add(acc: Vec, label, c) -> None:
    if c:
        v = acc.get(label, 0) + c
        if v:
            acc[label] = v
        else:
            acc.pop(label, None)


def _combine(*terms: tuple[Fraction, Vec]) -> Vec:
    out: Vec = {}
    for c, v in terms:
        for k, a in v.items():
            _add(out, k, c * a)
    return out


@dataclass
class Piece:
    flat: int
    degree: int
    basis: list[Vec]                      # vectors in the big space of this degree
    coords: Callable[[Vec], list[Fraction] | None]  # coordinates of a vector supported on this piece
    support: set = field(default_factory=set)     # labels this piece can occupy
    labels: list[str] = field(default_factory=list)


@dataclass
class AppendixComplex:
    tag: str
    arrangement: Arrangement
    lattice: ArrangementLattice
    pieces: dict[int, Piece]
    boundary_fn: Callable[[int, Vec], Vec]
    homotopy_fn: Callable[[int, Vec], Vec]
    complex: GradedComplex | None = None
    homotopy_blocks: dict[tuple[int, int], QMatrix] = field(default_factory=dict)
    report: dict = field(default_factory=dict)

    def degree_pieces(self, k: int) -> list[Piece]:
        return [p for p in self.pieces.values() if p.degree == k]

    def decompose(self, k: int, v: Vec) -> dict[int, list[Fraction]]:
        """Split a vector of degree k into piece coordinates; raise if it leaves the complex."""
        out = {}
        rest = dict(v)
        for p in self.degree_pieces(k):
            part = {lab: a for lab, a in v.items() if lab in p.support}
            if not part:
                continue
            c = p.coords(part)
            if c is None:
                raise ValueError(f"vector leaves piece {p.flat}")
            if any(c):
                out[p.flat] = c
            for lab in part:
                rest.pop(lab, None)
        if rest:
            raise ValueError(f"vector has components outside the complex in degree {k}")
        return out


# ---------------------------------------------------------------------------
# type A: the irrelevant ideal of the exterior algebra


def _wedge_left(i: int, I: tuple[int, ...]) -> tuple[int, tuple[int, ...]] | None:
    if i in I:
        return None
    pos = sum(1 for a in I if a < i)
    return (-1) ** pos, tuple(sorted(I + (i,)))


def _appendix_a(n: int, variant: str) -> AppendixComplex:
    arr = type_a(n)
    al = build_lattice(arr)
    N = n + 1
    dim = N

    def e(i):
        return tuple(1 if t == i - 1 else 0 for t in range(dim))

    def boundary(k, v):
        out: Vec = {}
        for I, c in v.items():
            if len(I) == 1:
                continue
            for j, i in enumerate(I):
                _add(out, I[:j] + I[j + 1:], (-1) ** j * c)
        return out

    if variant == "e1":
        gens = {1: Fraction(1)}
    elif variant == "equivariant":
        gens = {i: Fraction(1, N) for i in range(1, N + 1)}
    else:
        raise ValueError(f"unknown variant {variant!r} for type A")

    def homotopy(k, v):
        out: Vec = {}
        for I, c in v.items():
            for i, g in gens.items():
                hit = _wedge_left(i, I)
                if hit:
                    _add(out, hit[1], hit[0] * g * c)
        return out

    pieces = {}
    bottom = al.lattice.bottom
    pieces[bottom] = Piece(bottom, 0, [{(i,): Fraction(1)} for i in range(1, N + 1)],
                           lambda v: [v.get((i,), Fraction(0)) for i in range(1, N + 1)],
                           {(i,) for i in range(1, N + 1)}, [f"e{i}" for i in range(1, N + 1)])
    for size in range(2, N + 1):
        for I in combinations(range(1, N + 1), size):
            vecs = [tuple(a - b for a, b in zip(e(I[0]), e(j))) for j in I[1:]]
            x = al.flat_of_span(Subspace.span(vecs, dim))
            pieces[x] = Piece(x, size - 1, [{I: Fraction(1)}], (lambda I: lambda v: [v.get(I, Fraction(0))])(I),
                              {I}, ["e" + "".join(map(str, I))])
    return AppendixComplex(f"A{n}", arr, al, pieces, boundary, homotopy)


# ---------------------------------------------------------------------------
# types B and Phi: the mapping cone on W and its subcomplex K + W[1]


def _norm(I: tuple[int, ...], eps: tuple[int, ...]) -> tuple[tuple, int]:
    """Normal form of e_(I, eps) using e_(I, -eps) = (-1)^(|I|+1) e_(I, eps)."""
    if eps[0] == 1:
        return (I, eps), 1
    return (I, tuple(-s for s in eps)), (-1) ** (len(I) + 1)


def w_boundary(v: Vec) -> Vec:
    out: Vec = {}
    for (I, eps), c in v.items():
        if len(I) == 1:
            continue
        for j in range(len(I)):
            lab, s = _norm(I[:j] + I[j + 1:], eps[:j] + eps[j + 1:])
            _add(out, lab, (-1) ** j * eps[j] * s * c)
    return out


def w_step(k: int, v: Vec) -> Vec:
    """The map d^{W,k}."""
    out: Vec = {}
    for (I, eps), c in v.items():
        if k in I:
            continue
        pos = sum(1 for a in I if a < k)
        J = tuple(sorted(I + (k,)))
        at = J.index(k)
        sign = (-1) ** pos * Fraction(1, 2) * c
        for t, sk in ((1, 1), (-1, -1)):
            lab, s = _norm(J, eps[:at] + (sk,) + eps[at:])
            _add(out, lab, t * s * sign)
    return out


def phi_map(m: int, v: Vec) -> Vec:
    """W -> U: e_(I, eps) -> prod eps * sum_{x in I, x > m} (-1)^{#{i in I, i > x}} eps(x) f^x_{I - x}."""
    out: Vec = {}
    for (I, eps), c in v.items():
        pe = 1
        for s in eps:
            pe *= s
        for j, x in enumerate(I):
            if x <= m:
                continue
            above = len(I) - j - 1
            _add(out, (x, I[:j] + I[j + 1:]), pe * (-1) ** above * eps[j] * c)
    return out


def _w_labels(J: tuple[int, ...]) -> list[tuple]:
    return [(J, (1,) + rest) for rest in product((1, -1), repeat=len(J) - 1)]


def _appendix_phi(n: int, m: int, variant: str) -> AppendixComplex:
    arr = phi_family(n, m)
    al = build_lattice(arr)
    if variant == "cone" and m != n:
        raise ValueError("the plain cone homotopy is only available for B_n")
    if variant == "cone":
        dsteps = None
    elif variant == "equivariant" and m == n:
        dsteps = {k: Fraction(1, n) for k in range(1, n + 1)}
    elif variant in ("standard", "equivariant"):
        if m == 0:
            if n < 2:
                raise ValueError("D_n needs n >= 2")
            dsteps = {k: Fraction(1, n - 1) for k in range(1, n + 1)}
        else:
            dsteps = {1: Fraction(1)}
    else:
        raise ValueError(f"unknown variant {variant!r}")

    def D(v: Vec) -> Vec:
        return _combine(*((c, w_step(k, v)) for k, c in dsteps.items()))

    # big space in degree k: labels ("K", I, eps) with |I| = k and ("W", I, eps) with |I| = k + 1
    def split(v: Vec) -> tuple[Vec, Vec]:
        a, b = {}, {}
        for (tag, lab), c in v.items():
            (a if tag == "K" else b)[lab] = c
        return a, b

    def join(a: Vec, b: Vec) -> Vec:
        out = {("K", lab): c for lab, c in a.items()}
        out.update({("W", lab): c for lab, c in b.items()})
        return out

    def boundary(k, v):
        a, b = split(v)
        return join(_combine((-1, w_boundary(a))), _combine((1, a), (1, w_boundary(b))))

    def homotopy(k, v):
        a, b = split(v)
        if dsteps is None:
            return join(b, {})
        first = _combine((-1, D(a)), (1, b), (-1, w_boundary(D(b))), (-1, D(w_boundary(b))))
        return join(first, D(b))

    def e(i):
        return tuple(1 if t == i - 1 else 0 for t in range(n))

    pieces = {}
    bottom = al.lattice.bottom
    singles = [((i,), (1,)) for i in range(1, n + 1)]
    pieces[bottom] = Piece(bottom, 0, [{("W", s): Fraction(1)} for s in singles],
                           lambda v: [v.get(("W", s), Fraction(0)) for s in singles],
                           {("W", s) for s in singles}, [f"e{i}" for i in range(1, n + 1)])
    # y_J pieces: K_J inside W_J
    for size in range(1, n + 1):
        for J in combinations(range(1, n + 1), size):
            labs = _w_labels(J)
            cols = [phi_map(m, {lab: Fraction(1)}) for lab in labs]
            targets = sorted({t for c in cols for t in c})
            if targets:
                mat = QMatrix.from_rows([[c.get(t, Fraction(0)) for c in cols] for t in targets], len(labs))
                K = kernel(mat)
            else:
                K = Subspace.full(len(labs))
            if not K.dim:
                continue
            y = al.flat_of_span(Subspace.span([e(j) for j in J], n))
            basis = [{("K", lab): a for lab, a in zip(labs, vec) if a} for vec in K.basis]

            def coords(v, labs=labs, K=K):
                return K.coordinates([v.get(("K", lab), Fraction(0)) for lab in labs])

            pieces[y] = Piece(y, size, basis, coords, {("K", lab) for lab in labs},
                              [f"K[{''.join(map(str, J))}]#{t}" for t in range(K.dim)])
    # x_(I, eps) pieces: e_(I, eps) in the shifted copy of W
    for size in range(2, n + 1):
        for I in combinations(range(1, n + 1), size):
            for lab in _w_labels(I):
                eps = lab[1]
                vecs = [tuple(eps[0] * a - eps[t] * b for a, b in zip(e(I[0]), e(I[t]))) for t in range(1, size)]
                x = al.flat_of_span(Subspace.span(vecs, n))
                pieces[x] = Piece(x, size - 1, [{("W", lab): Fraction(1)}],
                                  (lambda lab: lambda v: [v.get(("W", lab), Fraction(0))])(lab),
                                  {("W", lab)}, ["e(" + ",".join(f"{i}{'+' if s > 0 else '-'}" for i, s in zip(I, eps)) + ")"])
    tag = f"B{n}" if m == n else (f"D{n}" if m == 0 else f"Phi({n},{m})")
    return AppendixComplex(tag, arr, al, pieces, boundary, homotopy)


# ---------------------------------------------------------------------------
# assembly and verification


def _assemble(app: AppendixComplex) -> None:
    L = app.lattice.lattice
    dims = [0] * len(L)
    for x, p in app.pieces.items():
        dims[x] = len(p.basis)
    failures = []
    boundary: dict[tuple[int, int], QMatrix] = {}
    hblocks: dict[tuple[int, int], QMatrix] = {}
    for x, p in sorted(app.pieces.items()):
        if p.degree == 0:
            continue
        cols: dict[int, list[list[Fraction]]] = {}
        for b in p.basis:
            parts = app.decompose(p.degree - 1, app.boundary_fn(p.degree, b))
            for y in parts:
                if y not in L.lower_covers(x):
                    failures.append({"check": "grading", "flat": x, "target": y})
            for y in L.lower_covers(x):
                if dims[y]:
                    cols.setdefault(y, []).append(parts.get(y, [Fraction(0)] * dims[y]))
        for y, cs in cols.items():
            boundary[(x, y)] = QMatrix.from_columns(cs, dims[y])
    for x, p in sorted(app.pieces.items()):
        if p.degree >= L.rank:
            continue
        cols = {}
        for b in p.basis:
            try:
                parts = app.decompose(p.degree + 1, app.homotopy_fn(p.degree, b))
            except ValueError as exc:
                failures.append({"check": "homotopy_range", "flat": x, "detail": str(exc)})
                continue
            for y in parts:
                if y not in L.upper_covers(x):
                    failures.append({"check": "homotopy_shape", "flat": x, "target": y})
            for y in L.upper_covers(x):
                if dims[y]:
                    cols.setdefault(y, []).append(parts.get(y, [Fraction(0)] * dims[y]))
        for y, cs in cols.items():
            if len(cs) == len(p.basis):
                hblocks[(x, y)] = QMatrix.from_columns(cs, dims[y])
    app.complex = GradedComplex(L, tuple(dims), boundary)
    app.homotopy_blocks = hblocks
    app.report["structure_failures"] = failures


def _global(app: AppendixComplex, blocks: dict, k_from: int, k_to: int) -> QMatrix:
    C = app.complex
    src = C.degree_flats(k_from)
    dst = C.degree_flats(k_to)
    rows = []
    for y in dst:
        row = []
        for x in src:
            m = blocks.get((x, y))
            row.append(m if m is not None else QMatrix.zeros(C.dims[y], C.dims[x]))
        rows.append(row)
    from .exactq import block_matrix

    if not src or not dst:
        return QMatrix.zeros(sum(C.dims[y] for y in dst), sum(C.dims[x] for x in src))
    return block_matrix(rows)


def verify_appendix(app: AppendixComplex) -> dict:
    C = app.complex
    L = C.lattice
    failures = list(app.report.get("structure_failures", []))
    # boundary squares to zero
    for k in range(2, L.rank + 1):
        a = _global(app, C.boundary, k - 1, k - 2)
        b = _global(app, C.boundary, k, k - 1)
        if a.rows and b.cols and not (a @ b).is_zero():
            failures.append({"check": "square_zero", "degree": k})
    # contracting homotopy: d0 on Im boundary_1 (all of V_0 here) and dd + dd = id above
    for k in range(0, L.rank + 1):
        n_k = C.degree_dim(k)
        if not n_k:
            continue
        total = QMatrix.zeros(n_k, n_k)
        if k < L.rank:
            total = total + _global(app, C.boundary, k + 1, k) @ _global(app, app.homotopy_blocks, k, k + 1)
        if k >= 1:
            total = total + _global(app, app.homotopy_blocks, k - 1, k) @ _global(app, C.boundary, k, k - 1)
        if k == 0:
            image = Subspace.span(_global(app, C.boundary, 1, 0).columns(), n_k)
            for v in image.basis:
                if total.apply(v) != tuple(v):
                    failures.append({"check": "identity", "degree": 0})
                    break
        elif total != QMatrix.identity(n_k):
            failures.append({"check": "identity", "degree": k})
    return {"passed": not failures, "failures": failures[:20]}


def dimension_formula_check(app: AppendixComplex, n: int, m: int) -> dict:
    """dim V_{y_J} = 2^{|J|-1} - |J & {m+1..n}| for every J that is a flat."""
    failures = []
    checked = 0
    al = app.lattice
    for size in range(1, n + 1):
        for J in combinations(range(1, n + 1), size):
            if size == 1 and J[0] > m:
                continue
            span = Subspace.span([tuple(1 if t == j - 1 else 0 for t in range(n)) for j in J], n)
            y = al.flat_of_span(span)
            expected = 2 ** (size - 1) - sum(1 for j in J if j > m)
            checked += 1
            if app.complex.dims[y] != expected:
                failures.append({"J": list(J), "dim": app.complex.dims[y], "expected": expected})
    return {"passed": not failures, "checked": checked, "failures": failures}


def appendix_complex(tag: str, variant: str = "standard") -> AppendixComplex:
    """Build and verify the closed-form complex for 'A n', 'B n', 'D n' or 'Phi n m'.

    Variants: type A takes 'standard' (multiplication by e_1) or 'equivariant';
    B_n takes 'cone', 'standard' (d^{W,1}) or 'equivariant' ((1/n) sum d^{W,k}).
    """
    t = tag.replace(" ", "")
    if (mt := re.fullmatch(r"A(\d+)", t)):
        n = int(mt.group(1))
        if n < 1:
            raise ValueError("A_n needs n >= 1")
        app = _appendix_a(n, "e1" if variant == "standard" else variant)
    elif (mt := re.fullmatch(r"B(\d+)", t)):
        n = int(mt.group(1))
        if n < 1:
            raise ValueError("B_n needs n >= 1")
        app = _appendix_phi(n, n, variant)
    elif (mt := re.fullmatch(r"D(\d+)", t)):
        app = _appendix_phi(int(mt.group(1)), 0, variant)
    elif (mt := re.fullmatch(r"Phi\(?(\d+),(\d+)\)?", t)):
        n, m = int(mt.group(1)), int(mt.group(2))
        if not 0 <= m <= n or n < 1:
            raise ValueError("Phi(n, m) needs 0 <= m <= n and n >= 1")
        if m == 0 and n < 2:
            raise ValueError("D_n needs n >= 2")
        app = _appendix_phi(n, m, variant)
    else:
        raise ValueError(f"unknown appendix tag {tag!r}")
    _assemble(app)
    app.report["homotopy"] = verify_appendix(app)
    if not t.startswith("A"):
        mt = re.search(r"(\d+)(?:,(\d+))?", t)
        n = int(mt.group(1))
        m = n if t.startswith("B") else (0 if t.startswith("D") else int(mt.group(2)))
        app.report["dimension_formula"] = dimension_formula_check(app, n, m)
    return app


# ---------------------------------------------------------------------------
# comparison with the recursive construction


def isomorphism_to_minimal(app: AppendixComplex, C: GradedComplex | None = None) -> dict[int, QMatrix]:
    """The unique graded isomorphism onto the minimal complex that is the identity on V_0."""
    L = app.complex.lattice
    C = C or minimal_complex(L, defining_datum(app.arrangement))
    iso = {L.bottom: QMatrix.identity(app.complex.dims[L.bottom])}
    for r in range(1, L.rank + 1):
        for x in L.by_rank[r]:
            if not app.complex.dims[x] and not C.dims[x]:
                continue
            if app.complex.dims[x] != C.dims[x]:
                raise ValueError(f"dimension mismatch at flat {x}")
            covers = [y for y in L.lower_covers(x) if C.dims[y]]
            rhs = QMatrix.zeros(0, app.complex.dims[x])
            for y in covers:
                rhs = rhs.vstack(iso[y] @ app.complex.block(x, y))
            sol = solve(C.boundary_of(x), rhs)
            if sol is None or sol.rank() != C.dims[x]:
                raise ValueError(f"no graded isomorphism at flat {x}")
            iso[x] = sol
    return iso


def _compare(app: AppendixComplex, C: GradedComplex, iso: dict, s) -> list:
    L = C.lattice
    hom = build_homotopy(C, s)
    h = s.coxeter_numbers[L.top]
    mismatches = []
    for (x, y), blk in app.homotopy_blocks.items():
        inv = solve(iso[x], QMatrix.identity(C.dims[x]))
        moved = iso[y] @ blk @ inv
        if L.ranks[x] == 0:
            ref = s.d0[L.atom_set(y)[0]].scale(1 / h)
        else:
            ref = hom.block(x, y).scale(1 / h)
        if moved != ref:
            mismatches.append([x, y])
    return mismatches


def compare_with_recursive(app: AppendixComplex) -> dict:
    """Transport the closed-form homotopy and compare it with (1/h) d from the recursion.

    ``equal`` uses the family section.  ``equal_own_section`` feeds the recursion the
    closed form's own degree-zero blocks, which form a section with top scalar 1.
    """
    arr, al = app.arrangement, app.lattice
    L = al.lattice
    C = minimal_complex(L, defining_datum(arr))
    iso = isomorphism_to_minimal(app, C)
    s = family_section(arr, al)
    mismatches = _compare(app, C, iso, s)
    own = {}
    for (x, y), blk in app.homotopy_blocks.items():
        if L.ranks[x] == 0:
            own[L.atom_set(y)[0]] = iso[y] @ blk
    s_own = verify_section(L, defining_datum(arr), own) if len(own) == len(arr.normals) else None
    if s_own is None or s_own.failures:
        own_mismatches = None
    else:
        try:
            own_mismatches = _compare(app, C, iso, s_own)
        except HomotopyError:
            own_mismatches = ["recursion fails"]
    return {"equal": not mismatches, "coxeter_number": q_str(s.coxeter_numbers[L.top]),
            "mismatches": mismatches[:20],
            "equal_own_section": own_mismatches is not None and not own_mismatches,
            "own_section_valid": own_mismatches is not None}
