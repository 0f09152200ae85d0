from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from yangvir.errors import NoSolutionError
from yangvir.linalg import RationalMatrix, echelon, in_span, nullspace, rank, solve

entry = st.fractions(min_value=-6, max_value=6, max_denominator=4)


@st.composite
def matrices(draw, max_rows=5, max_cols=6):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    rows = draw(st.lists(st.lists(entry, min_size=c, max_size=c), min_size=r, max_size=r))
    # sprinkle in dependent rows so the nullspace is often nontrivial
    if draw(st.booleans()) and r > 1:
        k = draw(st.fractions(min_value=-3, max_value=3, max_denominator=2))
        rows[-1] = [x * k for x in rows[0]]
    return RationalMatrix.of(rows, c)


def to_sympy(m):
    return sp.Matrix([[sp.Rational(x.numerator, x.denominator) for x in r] for r in m.rows])


def test_examples():
    assert nullspace(RationalMatrix.of([[1, 0, 0], [0, 1, 0], [0, 0, 1]])) == []
    assert len(nullspace(RationalMatrix.of([[0, 0, 0], [0, 0, 0]]))) == 3
    assert nullspace(RationalMatrix.of([[1, -1]])) == [(Fraction(1), Fraction(1))]


def test_exact_division():
    rows, pivots = echelon(RationalMatrix.of([[2, 4, 6], [1, 3, 5], [Fraction(1, 2), 7, 1]]))
    assert pivots == [0, 1, 2]
    assert all(isinstance(x, int) for r in rows for x in r)


@given(matrices())
def test_nullspace_matches_sympy(m):
    ours = nullspace(m)
    theirs = [tuple(Fraction(int(x.p), int(x.q)) for x in v) for v in to_sympy(m).nullspace()]
    assert ours == theirs


@given(matrices())
def test_rank_matches_sympy(m):
    assert rank(m) == to_sympy(m).rank()


@given(matrices())
def test_nullspace_vectors_are_annihilated(m):
    for v in nullspace(m):
        assert not any(m.apply(v))
    assert len(nullspace(m)) == m.ncols - rank(m)


@given(matrices(), st.data())
def test_solve_consistent(m, data):
    x = data.draw(st.lists(entry, min_size=m.ncols, max_size=m.ncols))
    rhs = m.apply(x)
    particular, homogeneous = solve(m, rhs)
    assert m.apply(particular) == rhs
    assert homogeneous == nullspace(m)


def test_solve_inconsistent():
    with pytest.raises(NoSolutionError):
        solve(RationalMatrix.of([[1, 1], [2, 2]]), [1, 3])


def test_in_span():
    assert in_span([(1, 2, 3), (1, 8, 27)], (0, 6, 24))
    assert not in_span([(1, 2, 3)], (1, 4, 9))
    assert in_span([], (0, 0))


def test_ragged_rows_rejected():
    with pytest.raises(ValueError):
        RationalMatrix.of([[1, 2], [3]])
