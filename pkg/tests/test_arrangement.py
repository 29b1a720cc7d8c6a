from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given

from relspace.arrangement import (Arrangement, NotInGeneralPosition, build_lattice, coxeter_family, essentialize,
                                  localize, parse_family, phi_family, project, random_general_position, restrict,
                                  type_a, vandermonde_subspace)
from relspace.exactq import Subspace
from relspace.lattice import isomorphic, partition_lattice, verify_truncation

from conftest import arrangements


def brute_force_flats(arr):
    """Closed hyperplane sets with ranks, from all subsets."""
    out = {}
    m = len(arr)
    for r in range(m + 1):
        for sub in combinations(range(m), r):
            s = Subspace.span([arr.normals[i] for i in sub], arr.ambient_dim)
            closed = frozenset(i for i in range(m) if s.contains_vector(arr.normals[i]))
            out[closed] = s.dim
    return out


def lattice_flats(al):
    L = al.lattice
    return {frozenset(L.atom_set(x)): L.ranks[x] for x in L.elements}


def poly_product(roots):
    out = [1]
    for r in roots:
        out = [a + r * b for a, b in zip(out + [0], [0] + out)]
    return out


def exponents(tag):
    """Exponents of the reflection-like families: the roots of the characteristic polynomial."""
    if tag[0] == "A":
        return list(range(1, int(tag[1:]) + 1))
    if tag.startswith("Phi"):
        n, m = map(int, tag[4:-1].split(","))
    else:
        n = int(tag[1:])
        m = n if tag[0] == "B" else 0
    return [2 * i + 1 for i in range(n - 1)] + [n - 1 + m]


@pytest.mark.parametrize("tag", ["A2", "A3", "A4", "B2", "B3", "D4", "Phi(3,1)", "Phi(4,2)"])
def test_poincare_polynomial_factors(tag):
    from relspace.complex import os_ranks

    al = build_lattice(parse_family(tag))
    L = al.lattice
    mu = os_ranks(L)
    betti = [sum(mu[x] for x in L.by_rank[r]) for r in range(L.rank + 1)]
    assert betti == poly_product(exponents(tag))


@pytest.mark.parametrize("tag", ["A3", "B3", "Phi(3,1)", "D4"])
def test_family_lattice_matches_subset_oracle(tag):
    arr = parse_family(tag)
    assert lattice_flats(build_lattice(arr)) == brute_force_flats(arr)


@given(arrangements(3, 2, 6))
def test_lattice_matches_subset_oracle(vs):
    arr = Arrangement.from_vectors(vs, 3)
    assert lattice_flats(build_lattice(arr)) == brute_force_flats(arr)


def test_type_a_is_partition_lattice():
    al = build_lattice(type_a(3))
    assert isomorphic(al.lattice, partition_lattice(4))


def test_json_round_trip_and_errors():
    arr = Arrangement.from_json({"dim": 2, "normals": [["1/2", "0"], [0, 1]], "name": "x"})
    assert arr.normals[0] == (Fraction(1, 2), 0)
    assert Arrangement.from_json(arr.to_json()) == arr
    for bad in [{}, {"normals": 3}, {"dim": 2, "normals": [[0, 0]]}, {"dim": 2, "normals": [[1, 0], [2, 0]]},
                {"dim": 3, "normals": [[1, 0]]}, {"dim": -1, "normals": []}]:
        with pytest.raises(ValueError):
            Arrangement.from_json(bad)


def test_family_parsing_errors():
    for tag in ["E8", "A", "Phi(2)"]:
        with pytest.raises(ValueError):
            parse_family(tag)
    with pytest.raises(ValueError):
        coxeter_family("D", 1)


def test_essentialize_preserves_lattice():
    arr = type_a(3)
    assert not arr.is_essential()
    e = essentialize(arr)
    assert e.is_essential() and e.ambient_dim == 3
    assert lattice_flats(build_lattice(e)) == lattice_flats(build_lattice(arr))


def test_localize_and_restrict_a3():
    arr = type_a(3)
    al = build_lattice(arr)
    for x in al.lattice.by_rank[2]:
        loc = localize(arr, al, x)
        assert len(loc) == len(al.lattice.atom_set(x))
    # each hyperplane of A3 meets the others in three distinct lines
    r = restrict(arr, al, al.lattice.atoms[0])
    assert r.rank == 2
    assert len(r) == 3


def test_vandermonde_projection_requires_merging():
    arr = type_a(3)
    al = build_lattice(arr)
    P = vandermonde_subspace([1, 2, 3, 4], 1)
    with pytest.raises(NotInGeneralPosition) as exc:
        project(arr, P, al)
    assert exc.value.condition == "distinct_images"
    proj = project(arr, P, al, strict=False)
    assert verify_truncation(proj.truncation)["passed"]


def test_vandermonde_nodes_must_increase():
    with pytest.raises(ValueError):
        vandermonde_subspace([1, 1, 2], 1)


def test_random_general_position_is_deterministic():
    arr = coxeter_family("B", 3)
    a = random_general_position(arr, 1, seed=3)
    b = random_general_position(arr, 1, seed=3)
    assert a.P == b.P and a.projected == b.projected
    assert verify_truncation(a.truncation)["passed"]
    assert a.projected_lattice.lattice.rank == 2
    assert all(len(g) == 1 for g in a.hyperplane_flats)


def test_projection_with_k_zero_is_identity_lattice():
    arr = type_a(3)
    proj = project(arr, arr.span())
    assert proj.k == 0
    assert proj.projected_lattice.lattice.strata() == (1, 6, 7, 1)


def test_projection_rejects_bad_codimension():
    arr = type_a(2)
    with pytest.raises(ValueError):
        project(arr, Subspace.zero(3))
    with pytest.raises(ValueError):
        random_general_position(arr, 5)


def test_phi_endpoints_are_b_and_d():
    assert len(phi_family(3, 3)) == 9
    assert len(phi_family(4, 0)) == 12
