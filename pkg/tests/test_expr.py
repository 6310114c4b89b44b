from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CHART, VARS, polynomials, rational_functions
from kontact.errors import (
    ExprSyntaxError,
    PoleAtPoint,
    UnboundSymbol,
    UnknownSymbol,
    ZeroDenominator,
)
from kontact.expr import Chart, Expr, parse

P = settings(max_examples=200, deadline=None)
x, y, z = (CHART.coordinate(v) for v in VARS)


def sym(e: Expr):
    return e.to_sympy()


class TestParse:
    def test_precedence_and_powers(self):
        assert parse("1 + 2*x^2", CHART) == 1 + 2 * x * x
        assert parse("-x^2", CHART) == -(x * x)
        assert parse("x**3", CHART) == x * x * x
        assert parse("x^-1", CHART) == 1 / x

    def test_decimals_are_exact(self):
        assert parse("0.25*x", CHART) == x / 4
        assert parse("1.5").constant_value() == Fraction(3, 2)

    def test_canonical_form_is_unique(self):
        a = parse("(x^2 - y^2)/(x - y)", CHART)
        assert a == x + y
        assert str(a) == str(parse("y + x", CHART))

    def test_constants_are_symbols(self):
        e = parse("f1*x + f2", CHART, ["f1", "f2"])
        assert e.diff("f1") == x

    def test_implicit_multiplication_rejected(self):
        with pytest.raises(ExprSyntaxError) as info:
            parse("2x", CHART)
        assert info.value.position == 1

    @pytest.mark.parametrize("text", ["", "x +", "(x", "x)", "x ^ y", "x $ 2"])
    def test_syntax_errors(self, text):
        with pytest.raises(ExprSyntaxError):
            parse(text, CHART)

    def test_unknown_symbol(self):
        with pytest.raises(UnknownSymbol):
            parse("w + 1", CHART)

    def test_division_by_zero(self):
        with pytest.raises(ZeroDenominator):
            parse("x/(y - y)", CHART)


class TestOperations:
    def test_diff_of_quotient(self):
        e = parse("x/(1 + x^2)", CHART)
        assert e.diff("x") == parse("(1 - x^2)/(1 + x^2)^2", CHART)
        assert e.diff("y").is_zero()

    def test_subs(self):
        e = parse("x*y + z", CHART)
        assert e.subs({"y": 2}) == 2 * x + z
        assert e.subs({"x": y}) == y * y + z

    def test_subs_into_pole(self):
        with pytest.raises(ZeroDenominator):
            parse("1/(x - y)", CHART).subs({"x": y})

    def test_eval_and_exact(self):
        e = parse("(x + 1)/(y - 2)", CHART)
        assert e.eval({"x": 1.0, "y": 3.0}) == pytest.approx(2.0)
        assert e.eval_exact({"x": 1, "y": Fraction(5, 2)}) == 4
        with pytest.raises(PoleAtPoint):
            e.eval({"x": 0.0, "y": 2.0})
        with pytest.raises(UnboundSymbol):
            e.eval({"x": 1.0})

    def test_compile(self):
        e = parse("x^2/(y + 1)", CHART)
        fn = e.compile(["x", "y"])
        num, den = fn(3.0, 1.0)
        assert num / den == pytest.approx(4.5)

    def test_constant_queries(self):
        assert parse("3/4").is_constant()
        assert not parse("x", CHART).is_constant()
        assert parse("x - x", CHART).is_zero()
        assert parse("x*y/(z^2 + 1)", CHART).free_symbols() == ("x", "y", "z")


@P
@given(rational_functions(), rational_functions(), rational_functions())
def test_field_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert (a - a).is_zero()
    if not a.is_zero():
        assert (b / a) * a == b


@P
@given(rational_functions(), st.sampled_from(VARS))
def test_diff_matches_sympy(e, v):
    ours = sym(e.diff(v))
    theirs = sympy.diff(sym(e), sympy.Symbol(v))
    assert sympy.simplify(ours - theirs) == 0


@P
@given(rational_functions(), rational_functions(), st.sampled_from(VARS))
def test_leibniz(a, b, v):
    assert (a * b).diff(v) == a.diff(v) * b + a * b.diff(v)


@P
@given(polynomials(), st.lists(st.integers(-5, 5), min_size=3, max_size=3))
def test_round_trip_through_text(e, point):
    again = parse(str(e), CHART)
    assert again == e
    pt = dict(zip(VARS, point))
    assert again.eval_exact(pt) == Fraction(sympy.Rational(sym(e).subs({sympy.Symbol(k): v for k, v in pt.items()})))


def test_promotion_between_charts():
    a = parse("u + 1", Chart(["u"]))
    b = parse("x", CHART)
    assert set((a * b).free_symbols()) == {"u", "x"}
