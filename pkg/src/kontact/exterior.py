"""Vector fields, differential forms and R^k-valued forms on a coordinate chart.

Forms are sparse: a p-form is a map from strictly increasing index tuples
to coefficients.  Interior products contract the first slot, so
``form(X, Y) == interior(Y, interior(X, form))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .errors import ChartMismatch, DegreeZero, LengthMismatch
from .expr import Chart, Expr, parse

Scalar = Union[Expr, int, Fraction]

__all__ = [
    "VectorField",
    "DiffForm",
    "KFunction",
    "VectorForm",
    "lie_bracket",
    "ext_deriv",
    "wedge",
    "interior",
    "lie_derivative",
    "pairing",
    "apply_field",
]


def _same_chart(a: Chart, b: Chart) -> None:
    if a != b:
        raise ChartMismatch(f"{a} vs {b}")


def _scalar(s: Scalar) -> Expr:
    return s if isinstance(s, Expr) else Expr(s)


@dataclass(frozen=True)
class VectorField:
    chart: Chart
    coeffs: tuple[Expr, ...]

    def __init__(self, chart: Chart, coeffs: Iterable[Scalar]):
        cs = tuple(_scalar(c) for c in coeffs)
        if len(cs) != chart.dim:
            raise LengthMismatch(f"{len(cs)} coefficients on a {chart.dim}-dimensional chart")
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def parse(cls, chart: Chart, texts: Sequence[str], constants: Sequence[str] = ()) -> "VectorField":
        return cls(chart, [parse(t, chart, constants) for t in texts])

    @classmethod
    def zero(cls, chart: Chart) -> "VectorField":
        return cls(chart, [0] * chart.dim)

    @classmethod
    def coordinate(cls, chart: Chart, name: str) -> "VectorField":
        i = chart.index(name)
        return cls(chart, [1 if j == i else 0 for j in range(chart.dim)])

    def __call__(self, f: Scalar) -> Expr:
        return apply_field(self, f)

    def __getitem__(self, i: int) -> Expr:
        return self.coeffs[i]

    def __add__(self, other: "VectorField") -> "VectorField":
        _same_chart(self.chart, other.chart)
        return VectorField(self.chart, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "VectorField") -> "VectorField":
        _same_chart(self.chart, other.chart)
        return VectorField(self.chart, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "VectorField":
        return VectorField(self.chart, [-a for a in self.coeffs])

    def __mul__(self, s: Scalar) -> "VectorField":
        s = _scalar(s)
        return VectorField(self.chart, [s * a for a in self.coeffs])

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __str__(self) -> str:
        parts = [f"({c})*d/d{n}" for c, n in zip(self.coeffs, self.chart.vars) if not c.is_zero()]
        return " + ".join(parts) if parts else "0"


def apply_field(X: VectorField, f: Scalar) -> Expr:
    """Directional derivative X(f)."""
    f = _scalar(f)
    out = Expr(0)
    for c, n in zip(X.coeffs, X.chart.vars):
        if not c.is_zero():
            df = f.diff(n)
            if not df.is_zero():
                out = out + c * df
    return out


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    """[X, Y]^i = X(Y^i) - Y(X^i)."""
    _same_chart(X.chart, Y.chart)
    return VectorField(X.chart, [apply_field(X, b) - apply_field(Y, a) for a, b in zip(X.coeffs, Y.coeffs)])


def _insert_sign(index: tuple[int, ...], j: int) -> tuple[int, tuple[int, ...]]:
    """Sign and sorted tuple for dx_j ^ dx_index; sign 0 if j repeats."""
    if j in index:
        return 0, index
    before = sum(1 for i in index if i < j)
    return (-1) ** before, tuple(sorted(index + (j,)))


@dataclass(frozen=True)
class DiffForm:
    chart: Chart
    degree: int
    terms: tuple[tuple[tuple[int, ...], Expr], ...]

    def __init__(self, chart: Chart, degree: int, terms: Union[Mapping, Iterable] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[tuple[int, ...], Expr] = {}
        for idx, c in items:
            idx = tuple(idx)
            if len(idx) != degree:
                raise ValueError(f"index {idx} in a {degree}-form")
            if any(i < 0 or i >= chart.dim for i in idx):
                raise ValueError(f"index {idx} out of range for {chart}")
            sign = 1
            if list(idx) != sorted(idx):
                if len(set(idx)) != len(idx):
                    continue
                sign = _perm_sign(idx)
                idx = tuple(sorted(idx))
            elif len(set(idx)) != len(idx):
                continue
            c = _scalar(c)
            acc[idx] = acc[idx] + c * sign if idx in acc else c * sign
        frozen = tuple(sorted((k, v) for k, v in acc.items() if not v.is_zero()))
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "terms", frozen)

    @classmethod
    def function(cls, chart: Chart, f: Scalar) -> "DiffForm":
        return cls(chart, 0, {(): f})

    @classmethod
    def one_form(cls, chart: Chart, coeffs: Sequence[Scalar]) -> "DiffForm":
        if len(coeffs) != chart.dim:
            raise LengthMismatch(f"{len(coeffs)} coefficients on a {chart.dim}-dimensional chart")
        return cls(chart, 1, {(i,): c for i, c in enumerate(coeffs)})

    @classmethod
    def differential(cls, chart: Chart, name: str) -> "DiffForm":
        return cls(chart, 1, {(chart.index(name),): 1})

    @classmethod
    def zero(cls, chart: Chart, degree: int) -> "DiffForm":
        return cls(chart, degree, {})

    def as_dict(self) -> dict[tuple[int, ...], Expr]:
        return dict(self.terms)

    def component(self, index: Sequence[int]) -> Expr:
        idx = tuple(index)
        sign = 1
        if list(idx) != sorted(idx):
            if len(set(idx)) != len(idx):
                return Expr(0)
            sign = _perm_sign(idx)
            idx = tuple(sorted(idx))
        return self.as_dict().get(idx, Expr(0)) * sign

    def coefficients(self) -> list[Expr]:
        """Dense coefficient list of a 1-form."""
        if self.degree != 1:
            raise ValueError("dense coefficients only for 1-forms")
        d = self.as_dict()
        return [d.get((i,), Expr(0)) for i in range(self.chart.dim)]

    def function_value(self) -> Expr:
        if self.degree != 0:
            raise ValueError("not a 0-form")
        return self.as_dict().get((), Expr(0))

    def is_zero(self) -> bool:
        return not self.terms

    def _combine(self, other: "DiffForm", sign: int) -> "DiffForm":
        _same_chart(self.chart, other.chart)
        if self.degree != other.degree:
            raise ValueError(f"adding a {self.degree}-form and a {other.degree}-form")
        acc = self.as_dict()
        for k, v in other.terms:
            acc[k] = acc[k] + v * sign if k in acc else v * sign
        return DiffForm(self.chart, self.degree, acc)

    def __add__(self, other: "DiffForm") -> "DiffForm":
        return self._combine(other, 1)

    def __sub__(self, other: "DiffForm") -> "DiffForm":
        return self._combine(other, -1)

    def __neg__(self) -> "DiffForm":
        return DiffForm(self.chart, self.degree, [(k, -v) for k, v in self.terms])

    def __mul__(self, s: Scalar) -> "DiffForm":
        s = _scalar(s)
        return DiffForm(self.chart, self.degree, [(k, s * v) for k, v in self.terms])

    __rmul__ = __mul__

    def __xor__(self, other: "DiffForm") -> "DiffForm":
        return wedge(self, other)

    def __call__(self, *fields: VectorField) -> Expr:
        if len(fields) != self.degree:
            raise ValueError(f"a {self.degree}-form takes {self.degree} fields")
        out = self
        for X in fields:
            out = interior(X, out)
        return out.function_value()

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        names = self.chart.vars
        parts = []
        for idx, c in self.terms:
            basis = "^".join(f"d{names[i]}" for i in idx)
            parts.append(f"({c})*{basis}" if basis else f"({c})")
        return " + ".join(parts)


def _perm_sign(idx: Sequence[int]) -> int:
    inv = sum(1 for a in range(len(idx)) for b in range(a + 1, len(idx)) if idx[a] > idx[b])
    return -1 if inv % 2 else 1


def wedge(a: DiffForm, b: DiffForm) -> DiffForm:
    _same_chart(a.chart, b.chart)
    acc: dict[tuple[int, ...], Expr] = {}
    for I, ca in a.terms:
        for J, cb in b.terms:
            if set(I) & set(J):
                continue
            merged = I + J
            sign = _perm_sign(merged)
            key = tuple(sorted(merged))
            val = ca * cb * sign
            acc[key] = acc[key] + val if key in acc else val
    return DiffForm(a.chart, a.degree + b.degree, acc)


def ext_deriv(w: Union[DiffForm, "VectorForm"]):
    if isinstance(w, VectorForm):
        return VectorForm(w.chart, [ext_deriv(c) for c in w.components])
    names = w.chart.vars
    acc: dict[tuple[int, ...], Expr] = {}
    for I, c in w.terms:
        for j, n in enumerate(names):
            dc = c.diff(n)
            if dc.is_zero():
                continue
            sign, key = _insert_sign(I, j)
            if sign == 0:
                continue
            val = dc * sign
            acc[key] = acc[key] + val if key in acc else val
    return DiffForm(w.chart, w.degree + 1, acc)


def interior(X: VectorField, w: Union[DiffForm, "VectorForm"]):
    """Contraction of X into the first slot."""
    if isinstance(w, VectorForm):
        return VectorForm(w.chart, [interior(X, c) for c in w.components])
    _same_chart(X.chart, w.chart)
    if w.degree == 0:
        raise DegreeZero("interior product of a 0-form")
    acc: dict[tuple[int, ...], Expr] = {}
    for I, c in w.terms:
        for s, i in enumerate(I):
            xi = X.coeffs[i]
            if xi.is_zero():
                continue
            key = I[:s] + I[s + 1:]
            val = c * xi if s % 2 == 0 else -(c * xi)
            acc[key] = acc[key] + val if key in acc else val
    return DiffForm(w.chart, w.degree - 1, acc)


def lie_derivative(X: VectorField, w):
    """Cartan's formula; on functions and R^k-valued objects it acts componentwise."""
    if isinstance(w, VectorForm):
        return VectorForm(w.chart, [lie_derivative(X, c) for c in w.components])
    if isinstance(w, KFunction):
        return KFunction([apply_field(X, c) for c in w.components])
    if isinstance(w, VectorField):
        return lie_bracket(X, w)
    if not isinstance(w, DiffForm):
        return apply_field(X, w)
    _same_chart(X.chart, w.chart)
    if w.degree == 0:
        return DiffForm.function(w.chart, apply_field(X, w.function_value()))
    return interior(X, ext_deriv(w)) + ext_deriv(interior(X, w))


@dataclass(frozen=True)
class KFunction:
    """An R^k-valued function, components in the order e_1, ..., e_k."""

    components: tuple[Expr, ...]

    def __init__(self, components: Iterable[Scalar]):
        object.__setattr__(self, "components", tuple(_scalar(c) for c in components))

    @property
    def k(self) -> int:
        return len(self.components)

    def _check(self, other: "KFunction") -> None:
        if self.k != other.k:
            raise LengthMismatch(f"{self.k} vs {other.k} components")

    def __getitem__(self, i: int) -> Expr:
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __add__(self, other: "KFunction") -> "KFunction":
        self._check(other)
        return KFunction([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "KFunction") -> "KFunction":
        self._check(other)
        return KFunction([a - b for a, b in zip(self.components, other.components)])

    def __neg__(self) -> "KFunction":
        return KFunction([-a for a in self.components])

    def __mul__(self, s: Scalar) -> "KFunction":
        s = _scalar(s)
        return KFunction([s * a for a in self.components])

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    @classmethod
    def basis(cls, k: int, alpha: int, scale: Scalar = 1) -> "KFunction":
        return cls([scale if i == alpha else 0 for i in range(k)])

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.components) + ")"


@dataclass(frozen=True)
class VectorForm:
    """An R^k-valued differential form given by k scalar forms of equal degree."""

    chart: Chart
    components: tuple[DiffForm, ...]

    def __init__(self, chart: Chart, components: Iterable[DiffForm]):
        comps = tuple(components)
        for c in comps:
            _same_chart(chart, c.chart)
        if comps and len({c.degree for c in comps}) != 1:
            raise ValueError("components have different degrees")
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "components", comps)

    @property
    def k(self) -> int:
        return len(self.components)

    @property
    def degree(self) -> int:
        return self.components[0].degree if self.components else 1

    def __getitem__(self, i: int) -> DiffForm:
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __add__(self, other: "VectorForm") -> "VectorForm":
        if self.k != other.k:
            raise LengthMismatch(f"{self.k} vs {other.k} components")
        return VectorForm(self.chart, [a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "VectorForm") -> "VectorForm":
        if self.k != other.k:
            raise LengthMismatch(f"{self.k} vs {other.k} components")
        return VectorForm(self.chart, [a - b for a, b in zip(self.components, other.components)])

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def functions(self) -> KFunction:
        """Component values of an R^k-valued 0-form."""
        return KFunction([c.function_value() for c in self.components])

    def __call__(self, *fields: VectorField) -> KFunction:
        return KFunction([c(*fields) for c in self.components])

    def __str__(self) -> str:
        return "; ".join(f"[{i + 1}] {c}" for i, c in enumerate(self.components))


def pairing(h: KFunction, theta: Sequence[Scalar]) -> Expr:
    """<h, theta> for a dual vector theta in (R^k)*."""
    if len(theta) != h.k:
        raise LengthMismatch(f"dual vector of length {len(theta)} against {h.k} components")
    out = Expr(0)
    for c, t in zip(h.components, theta):
        t = _scalar(t)
        if not t.is_zero() and not c.is_zero():
            out = out + c * t
    return out
