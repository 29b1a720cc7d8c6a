from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from relspace.exactq import (QMatrix, Subspace, contains, intersect, kernel, line_representative, q, q_str,
                             rank_of_rows, rref, rref_reference, solve, subspace_sum)

from conftest import matrices, small_q


def test_q_parses_strings_and_rejects_floats():
    assert q("3/4") == Fraction(3, 4)
    assert q(-2) == Fraction(-2)
    assert q_str(Fraction(-6, 4)) == "-3/2"
    assert q_str(Fraction(5)) == "5"
    with pytest.raises((TypeError, ValueError)):
        q(0.5)


@given(matrices())
def test_rref_matches_pure_python_reference(rows):
    ncols = len(rows[0])
    assert rref(rows, ncols) == rref_reference(rows, ncols)


@given(matrices())
def test_rank_nullity(rows):
    m = QMatrix.from_rows(rows)
    k = kernel(m)
    assert m.rank() + k.dim == m.cols
    for v in k.basis:
        assert not any(m.apply(v))


@given(matrices())
def test_rank_invariant_under_transpose(rows):
    m = QMatrix.from_rows(rows)
    assert m.rank() == m.T.rank() == rank_of_rows(rows, m.cols)


@given(matrices(4, 4), st.lists(small_q, min_size=1, max_size=4))
def test_solve_returns_exact_solution_when_consistent(rows, x):
    m = QMatrix.from_rows(rows)
    x = (x * m.cols)[: m.cols]
    rhs = QMatrix.from_columns([m.apply(x)], m.rows)
    sol = solve(m, rhs)
    assert sol is not None
    assert m @ sol == rhs


def test_solve_detects_inconsistency():
    m = QMatrix.from_rows([[1, 1], [2, 2]])
    assert solve(m, QMatrix.from_rows([[1], [3]])) is None


@given(matrices(4, 4), matrices(4, 4))
def test_subspace_lattice_laws(a_rows, b_rows):
    n = 4
    pad = lambda rs: [list(r) + [0] * (n - len(r)) for r in rs]
    a = Subspace.span(pad(a_rows), n)
    b = Subspace.span(pad(b_rows), n)
    s = subspace_sum(a, b)
    i = intersect(a, b)
    assert s.dim + i.dim == a.dim + b.dim
    assert contains(s, a) and contains(s, b)
    assert contains(a, i) and contains(b, i)
    assert a.annihilator().dim == n - a.dim


@given(matrices(3, 4))
def test_subspace_canonical_form_ignores_generators(rows):
    n = len(rows[0])
    a = Subspace.span(rows, n)
    scaled = [[2 * x for x in r] for r in rows] + [[x + y for x, y in zip(rows[0], rows[-1])]]
    assert Subspace.span(scaled, n) == a


def test_line_representative_scales_first_nonzero_to_one():
    assert line_representative((Fraction(0), Fraction(-2), Fraction(4))) == (0, 1, -2)


def test_ambient_mismatch_raises():
    with pytest.raises(ValueError):
        subspace_sum(Subspace.full(2), Subspace.full(3))
