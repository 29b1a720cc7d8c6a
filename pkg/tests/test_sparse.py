from hypothesis import given

from relspace.exactq import rank_of_rows
from relspace.sparse import Echelon, dense, sparse, sparse_kernel, sparse_rank

from conftest import matrices


@given(matrices(6, 6))
def test_sparse_rank_matches_dense(rows):
    assert sparse_rank(sparse(r) for r in rows) == rank_of_rows(rows, len(rows[0]))


@given(matrices(6, 6))
def test_sparse_kernel_is_kernel(rows):
    n = len(rows[0])
    ker = sparse_kernel([sparse(r) for r in rows], n)
    assert len(ker) == n - rank_of_rows(rows, n)
    for v in ker:
        x = dense(v, n)
        assert all(sum(a * b for a, b in zip(r, x)) == 0 for r in rows)
    assert sparse_rank(ker) == len(ker)


@given(matrices(6, 6))
def test_echelon_membership(rows):
    e = Echelon()
    for r in rows:
        e.add(sparse(r))
    for r in rows:
        assert e.contains(sparse(r))
    red = e.fully_reduced()
    for p, row in red.items():
        assert row[p] == 1
        assert all(j not in red for j in row if j != p)
