import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CHART, polynomials
from kontact.errors import RankComputationOverflow, SingularSolve
from kontact.expr import Expr, parse
from kontact.linalg import (
    echelon,
    independent_over_reals,
    inverse,
    nullspace,
    rank,
    solve,
    span_coefficients,
)

P = settings(max_examples=200, deadline=None)


def M(*rows):
    return [[parse(str(e), CHART) for e in r] for r in rows]


def sym_matrix(rows):
    return sympy.Matrix([[e.to_sympy() for e in r] for r in rows])


def test_rank_over_function_field():
    # dependent over Q(x, y, z) though no constant combination exists
    A = M(["x", "y"], ["x^2", "x*y"])
    assert rank(A) == 1
    assert independent_over_reals(A) == [0, 1]


def test_nullspace_is_polynomial_and_annihilates():
    A = M(["x", "y", "1"], ["1", "0", "z"])
    (v,) = nullspace(A)
    for row in A:
        assert sum((a * b for a, b in zip(row, v)), Expr(0)).is_zero()
    assert all(e.denominator == Expr(1) for e in v)


def test_solve_and_inverse():
    A = M(["1", "x"], ["0", "1"])
    Ainv = inverse(A)
    assert Ainv == M(["1", "-x"], ["0", "1"])
    with pytest.raises(SingularSolve):
        solve(M(["x", "y"], ["x", "y"]), M(["1"], ["0"]))


def test_span_coefficients():
    basis = [[parse("x", CHART), Expr(0)], [Expr(0), parse("y", CHART)]]
    target = [parse("2*x", CHART), parse("-y/3", CHART)]
    assert span_coefficients(target, basis) == [2, Fraction(-1, 3)]
    assert span_coefficients([parse("x^2", CHART), Expr(0)], basis) is None


def test_growth_guard():
    A = M(["x^5", "y"], ["1", "z^7"])
    with pytest.raises(RankComputationOverflow):
        echelon(A, max_degree=3)


@P
@given(st.lists(st.lists(polynomials(max_terms=2, max_exp=1), min_size=3, max_size=3), min_size=1, max_size=3))
def test_rank_matches_sympy(rows):
    assert rank(rows) == sym_matrix(rows).rank(simplify=True)


@P
@given(st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=3, max_size=3),
       st.integers(0, 2**32))
def test_real_span_matches_rational_rank(rows, seed):
    # constant vectors: dependence over R equals dependence over Q
    vecs = [[Expr(c) for c in r] for r in rows]
    kept = independent_over_reals(vecs, random.Random(seed))
    assert len(kept) == sympy.Matrix(rows).rank()
