from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relspace.arrangement import (NotInGeneralPosition, build_lattice, coxeter_family, essentialize,
                                  type_a, vandermonde_subspace)
from relspace.exactq import QMatrix, Subspace, kernel
from relspace.osalg import LinearIdeal, PolyDegreewise
from relspace.relalg import (GraphicalDatum, InsufficientDegrees, bruhat_checks, bruhat_data,
                             bruhat_relation_algebra, build_relation_algebra, consistent_sets, generation_check,
                             graphical_module, hilbert_numerator, modified_ep, piecewise_linear_check,
                             relation_algebra_setup, series_prefix, subalgebra_dims, weak_order)

from conftest import integer_vectors


def dense_module_dim(datum, d):
    """dim of {(f_v) in R_d^V : f_i - f_j in (M_e)_d for every edge}, by a dense kernel."""
    ring = datum.ring
    size = ring.slice_dim(d)
    nv = len(datum.vertices)
    rows = []
    for i, j, lab in datum.edges:
        ideal = datum.edge_ideals[lab].slice(d)
        for a in ideal.annihilator().basis:
            row = [Fraction(0)] * (nv * size)
            for t, c in enumerate(a):
                row[i * size + t] += c
                row[j * size + t] -= c
            rows.append(row)
    if not rows:
        return nv * size
    return kernel(QMatrix.from_rows(rows, nv * size)).dim


@st.composite
def graphical_data(draw):
    n = draw(st.integers(1, 3))
    nv = draw(st.integers(1, 4))
    ring = PolyDegreewise(n)
    pairs = [(i, j) for i in range(nv) for j in range(i + 1, nv)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs))) if pairs else []
    ideals, edges = {}, []
    for t, (i, j) in enumerate(chosen):
        gens = draw(st.lists(integer_vectors(n), max_size=2))
        ideals[t] = LinearIdeal(ring, Subspace.span(gens, n))
        edges.append((i, j, t) if draw(st.booleans()) else (j, i, t))
    return GraphicalDatum(list(range(nv)), edges, ring, ideals)


@settings(max_examples=30)
@given(graphical_data())
def test_graphical_module_matches_dense_oracle(datum):
    M = graphical_module(datum, 3)
    for d in range(4):
        assert M.hilbert[d] == dense_module_dim(datum, d)
        for b in M.bases[d]:
            assert M.contains_values(M.values(b, d), d)


@settings(max_examples=20)
@given(graphical_data())
def test_module_closed_under_linear_forms(datum):
    M = graphical_module(datum, 3)
    for d in range(1, 4):
        assert 0 <= M.generation[d] <= M.hilbert[d]
        # R_1 M_{d-1} lies in M_d, so its dimension is at most dim M_d
        assert M.hilbert[d] - M.generation[d] <= M.hilbert[d]


def test_two_vertex_closed_form():
    ring = PolyDegreewise(2)
    datum = GraphicalDatum([0, 1], [(0, 1, "x")], ring, {"x": LinearIdeal(ring, Subspace.span([[1, 0]], 2))})
    M = graphical_module(datum, 5)
    # pairs (f, g) with f - g divisible by x
    assert M.hilbert_list() == [(d + 1) + d for d in range(6)]


def test_edge_orientation_does_not_matter():
    setup = relation_algebra_setup(type_a(3), vandermonde_subspace([1, 2, 3, 4], 1))
    datum = setup.datum
    flipped = GraphicalDatum(datum.vertices, [(j, i, lab) for i, j, lab in datum.edges], datum.ring,
                             datum.edge_ideals)
    assert graphical_module(datum, 2).hilbert_list() == graphical_module(flipped, 2).hilbert_list()


def test_bad_edges_rejected():
    ring = PolyDegreewise(1)
    with pytest.raises(ValueError):
        GraphicalDatum([0], [(0, 0, "a")], ring, {"a": LinearIdeal(ring, Subspace.zero(1))})
    with pytest.raises(ValueError):
        GraphicalDatum([0, 1], [(0, 1, "b")], ring, {})


def test_a3_vandermonde_relation_algebra():
    M = build_relation_algebra(type_a(3), vandermonde_subspace([1, 2, 3, 4], 1), 4)
    assert M.hilbert_list() == [1, 11, 54, 178, 463]
    assert M.generation_list() == [1, 5, 3, 0, 0]
    assert generation_check(M, 2)["passed"]
    assert hilbert_numerator(M, 6, 4) == [1, 5, 3, -1]


def test_a2_hexagon():
    arr = essentialize(type_a(2))
    M = build_relation_algebra(arr, arr.span(), 4)
    assert M.hilbert_list() == [1, 6, 12, 18, 24]
    assert M.generation_list() == [1, 4, 1, 0, 0]
    assert hilbert_numerator(M, 2) == [1, 4, 1, 0, 0]
    ep = modified_ep(arr, arr.span(), M=M)
    assert ep["exact"] and ep["euler_zero"] and ep["first_two_places_exact"]


def test_modified_ep_a3_vandermonde():
    arr = type_a(3)
    P = vandermonde_subspace([1, 2, 3, 4], 1)
    ep = modified_ep(arr, P, 3)
    assert ep["exact"] and ep["euler_zero"]
    for r in ep["per_degree"].values():
        assert r["square_zero"] and r["maps_land_in_terms"]


def test_full_codimension_is_a_single_vertex():
    arr = type_a(2)
    M = build_relation_algebra(arr, Subspace.zero(3), 3)
    nk = M.datum.ring.n
    assert len(M.datum.vertices) == 1
    assert M.hilbert_list() == [comb(nk + d - 1, d) for d in range(4)]


@pytest.mark.parametrize("case", ["A3_vandermonde", "A2_essential", "A2", "A3_essential"])
def test_piecewise_linear_identity(case):
    from relspace.arrangement import random_general_position

    if case == "A3_vandermonde":
        arr, P = type_a(3), vandermonde_subspace([1, 2, 3, 4], 1)
    else:
        arr = {"A2_essential": essentialize(type_a(2)), "A2": type_a(2), "A3_essential": essentialize(type_a(3))}[case]
        P = random_general_position(arr, 1, seed=0).P
    r = piecewise_linear_check(arr, P)
    assert r["passed"], r


def test_piecewise_linear_identity_needs_codimension_one():
    arr = type_a(2)
    with pytest.raises(ValueError):
        piecewise_linear_check(arr, arr.span())


def test_merged_images_with_two_carrying_flats_are_refused():
    arr = coxeter_family("B", 3)
    al = build_lattice(arr)
    # a hyperplane through two rank-two flats carrying relations merges their images
    P = Subspace.span([[1, 0, 0], [0, 1, -1]], 3)
    with pytest.raises(NotInGeneralPosition):
        relation_algebra_setup(arr, P, al)


@given(st.lists(st.integers(-3, 5), min_size=1, max_size=5), st.integers(0, 4))
def test_numerator_round_trip(num, p):
    length = 8
    h = series_prefix(num, p, length)
    assert hilbert_numerator(h, p)[: len(num)] == num
    assert all(c == 0 for c in hilbert_numerator(h, p)[len(num):])


def test_numerator_needs_enough_degrees():
    with pytest.raises(InsufficientDegrees):
        hilbert_numerator([1, 2, 3], 2, 5)


def test_subalgebra_dims_are_bounded_by_module():
    M = build_relation_algebra(type_a(3), vandermonde_subspace([1, 2, 3, 4], 1), 3)
    sub = subalgebra_dims(M, 3)
    assert sub[0] == 1 and sub[1] == M.hilbert[1]
    assert all(sub[d] <= M.hilbert[d] for d in sub)


@pytest.mark.parametrize("n,k,count", [(3, 0, 6), (4, 0, 24), (4, 1, 8), (5, 2, 10), (5, 3, 2)])
def test_bruhat_vertex_counts(n, k, count):
    bd = bruhat_data(n, k, list(range(1, n + 1)))
    assert len(bd.vertices) == count
    chk = bruhat_checks(bd)
    assert chk["passed"], chk


def test_bruhat_vertices_are_all_consistent_sets():
    bd = bruhat_data(4, 1, [1, 2, 3, 4])
    assert set(bd.vertices) == set(consistent_sets(4, 1))


def test_weak_order_sizes():
    sets, covers = weak_order(4)
    assert len(sets) == 24
    assert len(covers) == 24 * 3 // 2


def test_bruhat_algebra_matches_geometric_pipeline():
    bd = bruhat_data(4, 1, [1, 2, 3, 4])
    assert bruhat_relation_algebra(bd, 3).hilbert_list() == [1, 11, 54, 178]
    bd0 = bruhat_data(3, 0, [1, 2, 3])
    geo = build_relation_algebra(type_a(2), type_a(2).span(), 3)
    assert bruhat_relation_algebra(bd0, 3).hilbert_list() == geo.hilbert_list()


def test_bruhat_argument_errors():
    with pytest.raises(ValueError):
        bruhat_data(4, 1, [1, 2, 3])
    with pytest.raises(ValueError):
        bruhat_data(4, 1, [1, 3, 2, 4])
    with pytest.raises(ValueError):
        bruhat_data(4, 3, [1, 2, 3, 4])
