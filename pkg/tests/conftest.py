import json
from pathlib import Path

import pytest
from hypothesis import strategies as st

from kontact.expr import Chart, Expr
from kontact.exterior import DiffForm, VectorField

ROOT = Path(__file__).resolve().parent.parent
INPUTS = ROOT / "demos" / "inputs"

CHART = Chart(["x", "y", "z"])
VARS = CHART.vars

small_int = st.integers(min_value=-4, max_value=4)


@st.composite
def polynomials(draw, max_terms=3, max_exp=2):
    """Small integer polynomials in x, y, z."""
    n = draw(st.integers(min_value=0, max_value=max_terms))
    acc = Expr(0)
    for _ in range(n):
        c = draw(small_int)
        term = Expr(c)
        for v in VARS:
            e = draw(st.integers(min_value=0, max_value=max_exp))
            if e:
                term = term * CHART.coordinate(v) ** e
        acc = acc + term
    return acc


@st.composite
def rational_functions(draw):
    """Polynomial over a denominator that never vanishes identically."""
    num = draw(polynomials())
    if draw(st.booleans()):
        return num
    v = draw(st.sampled_from(VARS))
    shift = draw(st.integers(min_value=1, max_value=3))
    return num / (CHART.coordinate(v) ** 2 + shift)


@st.composite
def vector_fields(draw, coeffs=None):
    coeffs = polynomials() if coeffs is None else coeffs
    return VectorField(CHART, [draw(coeffs) for _ in VARS])


@st.composite
def forms(draw, degree=None, coeffs=None):
    coeffs = polynomials() if coeffs is None else coeffs
    if degree is None:
        degree = draw(st.integers(min_value=0, max_value=3))
    from itertools import combinations

    terms = {}
    for idx in combinations(range(len(VARS)), degree):
        if draw(st.booleans()):
            terms[idx] = draw(coeffs)
    return DiffForm(CHART, degree, terms)


@pytest.fixture
def inputs_dir() -> Path:
    return INPUTS


def load_input(name: str) -> dict:
    return json.loads((INPUTS / name).read_text())
