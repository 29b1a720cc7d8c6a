import json

import pytest
from hypothesis import given, settings

from relspace.arrangement import Arrangement, build_lattice, coxeter_family, essentialize, parse_family
from relspace.complex import os_ranks
from relspace.zonotope import (TooManyFaces, brute_force_covectors, chambers, enumerate_faces, ep_complex,
                               faces_of_type, fm_feasible, h_vector, projected_zonotope_faces, sign_string)

from conftest import arrangements


def essential(vs, dim):
    arr = Arrangement.from_vectors(vs, dim)
    return essentialize(arr) if not arr.is_essential() else arr


@given(arrangements(3, 2, 6))
def test_chamber_count_matches_betti_sum(vs):
    arr = essential(vs, 3)
    L = build_lattice(arr).lattice
    mu = os_ranks(L)
    assert len(chambers(arr.normals, arr.ambient_dim)) == sum(mu.values())


@given(arrangements(3, 2, 6))
def test_euler_relation_and_ep_exactness(vs):
    arr = essential(vs, 3)
    fl = enumerate_faces(arr)
    f = fl.f_vector()
    assert sum((-1) ** j * c for j, c in enumerate(f)) == 1
    ep = ep_complex(fl)
    assert ep["square_zero"] and ep["exact"]


@settings(max_examples=15)
@given(arrangements(3, 2, 4))
def test_covectors_match_brute_force(vs):
    arr = essential(vs, 3)
    fl = enumerate_faces(arr)
    assert {f.signs for f in fl.faces[1:]} == brute_force_covectors(arr)


@given(arrangements(3, 2, 6))
def test_face_dim_is_rank_of_type(vs):
    arr = essential(vs, 3)
    al = build_lattice(arr)
    fl = enumerate_faces(arr, al)
    for f in fl.faces[1:]:
        assert f.dim == al.lattice.ranks[f.type_flat]
        assert [i for i, s in enumerate(f.signs) if s == 0] == list(al.lattice.atom_set(f.type_flat))


@pytest.mark.parametrize("tag,f", [("A2", (6, 6, 1)), ("A3", (24, 36, 14, 1)), ("B3", (48, 72, 26, 1))])
def test_permutohedron_and_friends(tag, f):
    arr = essentialize(parse_family(tag))
    fl = enumerate_faces(arr)
    assert fl.f_vector() == f
    h = h_vector(fl)
    assert h == h[::-1]


def test_edges_join_vertices_differing_in_one_class():
    arr = coxeter_family("A", 3, essential=True)
    fl = enumerate_faces(arr)
    for a, b, x in fl.edges():
        sa, sb = fl.faces[a].signs, fl.faces[b].signs
        diff = [i for i, (s, t) in enumerate(zip(sa, sb)) if s != t]
        assert diff == list(fl.lattice.lattice.atom_set(x))


def test_projected_faces_biject():
    arr = essentialize(parse_family("B3"))
    al = build_lattice(arr)
    fl = enumerate_faces(arr, al)
    for x in al.lattice.by_rank[1] + al.lattice.by_rank[2]:
        _, rep = projected_zonotope_faces(arr, al, x, fl)
        assert rep["bijection"]
        assert rep["faces"] == len([i for i in range(1, len(fl.faces)) if al.lattice.leq(x, fl.faces[i].type_flat)])


def test_faces_of_type_top_is_single_point():
    arr = essentialize(parse_family("A3"))
    al = build_lattice(arr)
    fl = enumerate_faces(arr, al)
    assert len(faces_of_type(fl, al.lattice.top)) == 1


def test_face_cap_and_essential_requirement():
    with pytest.raises(TooManyFaces):
        enumerate_faces(essentialize(parse_family("B3")), cap=20)
    with pytest.raises(ValueError):
        enumerate_faces(parse_family("A3"))


def test_fm_feasibility():
    assert fm_feasible([], [[1, 0], [0, 1]], 2)
    assert not fm_feasible([], [[1, 0], [-1, 0]], 2)
    assert not fm_feasible([[1, 0]], [[1, 1], [1, -1]], 2)


def test_dump_format():
    fl = enumerate_faces(essentialize(parse_family("A2")))
    data = json.loads(json.dumps(fl.to_json()))
    assert data["f_vector"] == [6, 6, 1]
    signs = [f["signs"] for f in data["faces"] if f["signs"] is not None]
    assert all(set(s) <= set("+-0") for s in signs)
    assert sign_string((1, 0, -1)) == "+0-"
