from fractions import Fraction

import sympy
from hypothesis import given, settings, strategies as st

from distchaos import exact

small = st.integers(min_value=-4, max_value=4)


def matrices(max_rows=5, max_cols=6):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)))


@settings(max_examples=80, deadline=None)
@given(matrices())
def test_rank_matches_sympy(rows):
    assert exact.rank(rows, len(rows[0])) == sympy.Matrix(rows).rank()


@settings(max_examples=80, deadline=None)
@given(matrices())
def test_nullspace_vectors_are_annihilated(rows):
    ncols = len(rows[0])
    basis = exact.nullspace(rows, ncols)
    assert len(basis) == ncols - sympy.Matrix(rows).rank()
    for v in basis:
        for row in rows:
            assert sum(Fraction(a) * b for a, b in zip(row, v)) == 0


@settings(max_examples=60, deadline=None)
@given(matrices(), st.lists(small, min_size=5, max_size=5))
def test_solve_consistent_or_none(rows, rhs):
    ncols = len(rows[0])
    rhs = rhs[:len(rows)]
    x = exact.solve(rows, rhs, ncols)
    M = sympy.Matrix(rows)
    consistent = M.rank() == M.row_join(sympy.Matrix(rhs)).rank()
    if x is None:
        assert not consistent
    else:
        for row, b in zip(rows, rhs):
            assert sum(Fraction(a) * xi for a, xi in zip(row, x)) == b


def test_echelon_is_reduced():
    red, piv = exact.echelon([[2, 4, 6], [1, 1, 1]], 3)
    assert piv == [0, 1]
    assert red[0] == {0: 1, 2: -1}
    assert red[1] == {1: 1, 2: 2}


def test_matmul_and_transpose():
    a = [[1, 2], [0, 1]]
    assert exact.matmul(a, exact.transpose(a)) == [[5, 2], [2, 1]]
