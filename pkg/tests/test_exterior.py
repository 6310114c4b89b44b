import pytest
import sympy
from hypothesis import given, settings

from conftest import CHART, VARS, forms, polynomials, rational_functions, vector_fields
from kontact.errors import ChartMismatch, DegreeZero, LengthMismatch
from kontact.expr import Chart, parse
from kontact.exterior import (
    DiffForm,
    KFunction,
    VectorField,
    VectorForm,
    apply_field,
    ext_deriv,
    interior,
    lie_bracket,
    lie_derivative,
    pairing,
    wedge,
)

P = settings(max_examples=200, deadline=None)


def field(*texts):
    return VectorField.parse(CHART, list(texts))


def one(*texts):
    return DiffForm.one_form(CHART, [parse(t, CHART) for t in texts])


class TestFields:
    def test_bracket_of_heisenberg_fields(self):
        X = field("1", "0", "-y/2")
        Y = field("0", "1", "x/2")
        assert lie_bracket(X, Y) == field("0", "0", "1")

    def test_bracket_against_sympy(self):
        X = field("x*y", "z^2", "1/(1 + x^2)")
        Y = field("y", "x*z", "x")
        xs = sympy.symbols(VARS)
        a = [c.to_sympy() for c in X.coeffs]
        b = [c.to_sympy() for c in Y.coeffs]
        want = [sum(a[j] * sympy.diff(b[i], xs[j]) - b[j] * sympy.diff(a[i], xs[j]) for j in range(3))
                for i in range(3)]
        got = lie_bracket(X, Y)
        for g, w in zip(got.coeffs, want):
            assert sympy.simplify(g.to_sympy() - w) == 0

    def test_apply_field(self):
        X = field("y", "-x", "0")
        assert apply_field(X, parse("x^2 + y^2", CHART)).is_zero()

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            VectorField(CHART, [1, 2])


class TestForms:
    def test_ordering_and_signs(self):
        w = DiffForm(CHART, 2, {(1, 0): 1})
        assert w.as_dict() == {(0, 1): -1}
        assert DiffForm(CHART, 2, {(1, 1): 5}).is_zero()

    def test_wedge_anticommutes_on_one_forms(self):
        a, b = one("x", "1", "0"), one("0", "y", "z")
        assert wedge(a, b) == -wedge(b, a)
        assert wedge(a, a).is_zero()

    def test_exterior_derivative_of_contact_form(self):
        eta = one("-y", "0", "1")
        assert ext_deriv(eta) == DiffForm(CHART, 2, {(0, 1): 1})

    def test_interior(self):
        w = DiffForm(CHART, 2, {(0, 1): 1})
        X = field("1", "0", "0")
        assert interior(X, w) == DiffForm.differential(CHART, "y")
        with pytest.raises(DegreeZero):
            interior(X, DiffForm.function(CHART, 1))

    def test_evaluation_on_fields(self):
        w = DiffForm(CHART, 2, {(0, 1): parse("x", CHART)})
        X, Y = field("1", "0", "0"), field("0", "1", "0")
        assert w(X, Y) == parse("x", CHART)
        assert w(Y, X) == -parse("x", CHART)

    def test_chart_mismatch(self):
        other = Chart(["u", "v", "w"])
        with pytest.raises(ChartMismatch):
            wedge(one("1", "0", "0"), DiffForm.differential(other, "u"))


class TestVectorValued:
    def test_pairing_and_functions(self):
        h = KFunction([parse("x", CHART), 2])
        assert pairing(h, [1, 3]) == parse("x + 6", CHART)
        with pytest.raises(LengthMismatch):
            pairing(h, [1])

    def test_vector_form_contraction(self):
        eta = VectorForm(CHART, [one("1", "0", "0"), one("0", "x", "0")])
        X = field("2", "1", "0")
        assert interior(X, eta).functions() == KFunction([2, parse("x", CHART)])


@P
@given(vector_fields(), vector_fields(), vector_fields())
def test_jacobi_identity(X, Y, Z):
    total = lie_bracket(X, lie_bracket(Y, Z)) + lie_bracket(Y, lie_bracket(Z, X)) + lie_bracket(Z, lie_bracket(X, Y))
    assert total.is_zero()


@P
@given(forms(coeffs=rational_functions()))
def test_d_squared_vanishes(w):
    assert ext_deriv(ext_deriv(w)).is_zero()


@P
@given(vector_fields(), forms())
def test_cartan_formula(X, w):
    # independent route for L_X w: derivative of coefficients plus pulled-back basis
    names = CHART.vars
    acc = DiffForm.zero(CHART, w.degree)
    for idx, c in w.terms:
        term = DiffForm.function(CHART, apply_field(X, c))
        for slot in range(len(idx)):
            piece = DiffForm.function(CHART, c)
            for s, i in enumerate(idx):
                if s == slot:
                    piece = wedge(piece, ext_deriv(DiffForm.function(CHART, X.coeffs[i])))
                else:
                    piece = wedge(piece, DiffForm.differential(CHART, names[i]))
            acc = acc + piece
        basis = term
        for i in idx:
            basis = wedge(basis, DiffForm.differential(CHART, names[i]))
        acc = acc + basis
    assert lie_derivative(X, w) == acc


@P
@given(forms(), forms(), vector_fields())
def test_interior_is_antiderivation(a, b, X):
    if a.degree + b.degree > 3 or a.degree == 0 and b.degree == 0:
        return
    lhs = interior(X, wedge(a, b))
    sign = -1 if a.degree % 2 else 1
    rhs = DiffForm.zero(CHART, a.degree + b.degree - 1)
    if a.degree:
        rhs = rhs + wedge(interior(X, a), b)
    if b.degree:
        rhs = rhs + wedge(a, interior(X, b)) * sign
    assert lhs == rhs


@P
@given(forms(degree=1), forms(degree=1))
def test_d_is_antiderivation(a, b):
    assert ext_deriv(wedge(a, b)) == wedge(ext_deriv(a), b) - wedge(a, ext_deriv(b))


@P
@given(vector_fields(), vector_fields(), polynomials())
def test_bracket_acts_as_commutator(X, Y, f):
    assert apply_field(lie_bracket(X, Y), f) == apply_field(X, apply_field(Y, f)) - apply_field(Y, apply_field(X, f))
