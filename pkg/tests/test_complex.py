import json
import pytest
from hypothesis import given

from relspace.arrangement import Arrangement, build_lattice, parse_family, type_a
from relspace.complex import (SectionError, build_homotopy, check_composite_zero, check_exactness,
                              check_L_contractible_dims, coxeter_number_identity, coxeter_section, family_section,
                              generic_rank2_section, homology, os_homotopy_check, os_ranks, relation_complex,
                              relation_space_oracle, restricted_section, verify_homotopy)

from conftest import DATA, arrangements


def nonformal():
    return Arrangement.from_json(json.loads((DATA / "nonformal.json").read_text()))


@given(arrangements(3, 2, 6))
def test_relation_complex_squares_to_zero(vs):
    arr = Arrangement.from_vectors(vs, 3)
    C = relation_complex(arr)
    assert check_composite_zero(C)


@given(arrangements(3, 2, 6))
def test_first_homology_counts_nonlocal_relations(vs):
    arr = Arrangement.from_vectors(vs, 3)
    al = build_lattice(arr)
    C = relation_complex(arr, al)
    oracle = relation_space_oracle(arr, al)
    h = homology(C)
    assert h[0] == oracle["relations"] - oracle["local_relations"]


@given(arrangements(2, 2, 6))
def test_rank_two_complexes_are_acyclic(vs):
    arr = Arrangement.from_vectors(vs, 2)
    C = relation_complex(arr)
    if C.lattice.rank == 2:
        assert check_exactness(C)["acyclic"]


@given(arrangements(2, 3, 6))
def test_generic_rank_two_section_gives_homotopy(vs):
    arr = Arrangement.from_vectors(vs, 2)
    al = build_lattice(arr)
    if al.lattice.rank != 2:
        return
    s = generic_rank2_section(arr, al)
    hom = build_homotopy(relation_complex(arr, al), s)
    assert verify_homotopy(hom)["passed"]


def test_essential_relation_complex_has_zero_euler_characteristic():
    arr = parse_family("B3")
    C = relation_complex(arr)
    total = sum((-1) ** i * C.degree_dim(i) for i in range(C.lattice.rank + 1))
    assert total == 0
    assert C.degree_dim(1) == len(arr)


@pytest.mark.parametrize("tag", ["A3", "B3", "D4", "Phi(3,2)"])
def test_family_homotopies(tag):
    arr = parse_family(tag)
    al = build_lattice(arr)
    C = relation_complex(arr, al)
    s = family_section(arr, al)
    assert coxeter_number_identity(s)["passed"]
    hom = build_homotopy(C, s)
    assert verify_homotopy(hom)["passed"]
    assert check_L_contractible_dims(C, hom)["passed"]


def test_coxeter_numbers_of_a3():
    arr = type_a(3)
    al = build_lattice(arr)
    s = coxeter_section(arr, al)
    L = al.lattice
    assert s.coxeter_numbers[L.top] == 4
    for x in L.by_rank[2]:
        if L.is_indecomposable(x):
            assert s.coxeter_numbers[x] == 3
        else:
            assert x not in s.coxeter_numbers


def test_coxeter_section_rejects_phi_without_transport():
    arr = parse_family("Phi(3,1)")
    with pytest.raises(SectionError):
        coxeter_section(arr)


def test_restricted_sections_of_b3():
    arr = parse_family("B3")
    al = build_lattice(arr)
    for x in al.lattice.by_rank[1]:
        rs = restricted_section(arr, al, x)
        assert rs.section.valid


def test_nonformal_fixture():
    arr = nonformal()
    al = build_lattice(arr)
    C = relation_complex(arr, al)
    rep = check_L_contractible_dims(C)
    assert not rep["passed"]
    assert rep["failing_flats"] == [al.lattice.top]
    assert rep["per_flat_homology"][al.lattice.top] == [1, 0, 0]
    assert relation_space_oracle(arr, al) == {"relations": 1, "local_relations": 0, "two_formal": False}


def test_os_homotopy_and_mobius():
    L = build_lattice(type_a(3)).lattice
    mu = os_ranks(L)
    assert mu[L.top] == 6
    assert os_homotopy_check(L)["passed"]


def test_complex_json_is_serializable():
    C = relation_complex(type_a(2))
    json.dumps(C.to_json())
