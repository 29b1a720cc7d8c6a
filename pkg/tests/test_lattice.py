from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from relspace.lattice import (GeomLattice, UnknownFlat, boolean_lattice, isomorphic, partition_lattice,
                              partition_of)

BELL = [1, 1, 2, 5, 15, 52]
STIRLING2 = {4: [1, 6, 7, 1], 5: [1, 10, 25, 15, 1]}


def test_boolean_lattice_counts():
    L = boolean_lattice(4)
    assert len(L) == 16
    assert L.strata() == (1, 4, 6, 4, 1)
    assert L.indecomposables() == list(L.atoms)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_partition_lattice_counts(n):
    L = partition_lattice(n)
    assert len(L) == BELL[n]
    if n in STIRLING2:
        assert list(L.strata()) == STIRLING2[n]
    # partition lattices are indecomposable at the top
    assert L.is_indecomposable(L.top)


def test_partition_of_top_and_bottom():
    L = partition_lattice(4)
    assert partition_of(L, L.top, 4) == [(0, 1, 2, 3)]
    assert partition_of(L, L.bottom, 4) == [(0,), (1,), (2,), (3,)]


def test_non_closed_singleton_rejected():
    with pytest.raises(ValueError):
        GeomLattice([[0, 1]], 2)


def test_unknown_flat_raises():
    L = boolean_lattice(2)
    with pytest.raises(UnknownFlat):
        L.upper_covers(99)
    with pytest.raises(ValueError):
        L.decompose(L.bottom)
    with pytest.raises(ValueError):
        L.dependent([])


def test_decomposition_of_boolean_top_is_atoms():
    L = boolean_lattice(3)
    assert L.decompose(L.top) == tuple(sorted(L.atoms))


def _lattices():
    return st.sampled_from([boolean_lattice(3), partition_lattice(4), partition_lattice(5)])


@given(_lattices(), st.data())
def test_join_meet_laws(L, data):
    x = data.draw(st.sampled_from(list(L.elements)))
    y = data.draw(st.sampled_from(list(L.elements)))
    j, m = L.join(x, y), L.meet(x, y)
    assert L.leq(x, j) and L.leq(y, j)
    assert L.leq(m, x) and L.leq(m, y)
    assert L.join(x, y) == L.join(y, x)
    # semimodularity
    assert L.ranks[j] + L.ranks[m] <= L.ranks[x] + L.ranks[y]
    # least upper bound
    for z in L.elements:
        if L.leq(x, z) and L.leq(y, z):
            assert L.leq(j, z)


@given(_lattices(), st.data())
def test_indecomposable_parts_join_to_x(L, data):
    x = data.draw(st.sampled_from([z for z in L.elements if z != L.bottom]))
    parts = L.decompose(x)
    assert L.join_all(parts) == x
    assert sum(L.ranks[p] for p in parts) == L.ranks[x]
    assert all(L.is_indecomposable(p) for p in parts)


@given(_lattices(), st.data())
def test_interval_below_is_geometric_lattice(L, data):
    x = data.draw(st.sampled_from(list(L.elements)))
    sub = L.interval_below(x)
    assert len(sub) == len(L.below(x))
    assert sub.rank == L.ranks[x]
    assert sorted(sub.origin) == sorted(L.below(x))


def test_covers_are_consistent():
    L = partition_lattice(4)
    for x in L.elements:
        for y in L.upper_covers(x):
            assert x in L.lower_covers(y)
            assert L.ranks[y] == L.ranks[x] + 1


def test_isomorphic_detects_relabelling():
    a = partition_lattice(4)
    b = partition_lattice(4)
    assert isomorphic(a, b)
    assert not isomorphic(a, boolean_lattice(3))


def test_dependent_triples_in_partition_lattice():
    L = partition_lattice(3)
    atoms = list(L.atoms)
    assert L.dependent(atoms)
    for pair in combinations(atoms, 2):
        assert not L.dependent(list(pair))
