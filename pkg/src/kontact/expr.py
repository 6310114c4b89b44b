"""Exact multivariate rational functions over Q.

Values are backed by sympy's sparse fraction fields (gcd-cancelled on every
operation).  Each :class:`Expr` carries the field it was built in; binary
operations promote both operands to the union of their generators.  The
denominator is kept with leading coefficient 1 in the field's ordering so
that numerator and denominator are canonical for a given generator order.

The text grammar (no implicit multiplication)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := ('+' | '-') factor | base (('^' | '**') int)?
    base   := ident | number | '(' expr ')'
    int    := '-'? digits
    number := digits ('.' digits)?
"""

from __future__ import annotations

import re
import zlib
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence, Union

from sympy import Symbol
from sympy.polys.domains import QQ
from sympy.polys.fields import FracField
from sympy.polys.orderings import grlex

from .errors import (
    ExprSyntaxError,
    PoleAtPoint,
    UnboundSymbol,
    UnknownSymbol,
    ZeroDenominator,
)

__all__ = [
    "Chart",
    "Expr",
    "parse",
    "evaluate",
    "substitute",
    "diff",
    "POLE_TOL",
]

POLE_TOL = 1e-12

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_HASH_PRIME = (1 << 61) - 1

Number = Union[int, Fraction]


@lru_cache(maxsize=None)
def _field(names: tuple[str, ...]) -> FracField:
    return FracField([Symbol(n) for n in names], QQ, grlex)


def _names(field: FracField) -> tuple[str, ...]:
    return tuple(s.name for s in field.symbols)


def _q(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


@dataclass(frozen=True)
class Chart:
    """Ordered coordinate names of a local chart."""

    vars: tuple[str, ...]

    def __init__(self, vars: Iterable[str]):
        names = tuple(vars)
        for n in names:
            if not isinstance(n, str) or not _IDENT.match(n):
                raise UnknownSymbol(f"invalid coordinate name {n!r}")
        if len(set(names)) != len(names):
            raise UnknownSymbol(f"duplicate coordinate in {names}")
        object.__setattr__(self, "vars", names)

    @property
    def dim(self) -> int:
        return len(self.vars)

    def index(self, name: str) -> int:
        try:
            return self.vars.index(name)
        except ValueError:
            raise UnknownSymbol(f"{name!r} is not a coordinate of {self.vars}") from None

    def coordinate(self, name: str) -> "Expr":
        self.index(name)
        return Expr.symbol(name, self.vars)

    def __iter__(self):
        return iter(self.vars)

    def __len__(self) -> int:
        return len(self.vars)

    def __repr__(self) -> str:
        return f"Chart({list(self.vars)!r})"


def _monic(f):
    den = f.denom
    lc = den.LC
    if lc == 1:
        return f
    return f.field.raw_new(f.numer.quo_ground(lc), den.quo_ground(lc))


class Expr:
    """An immutable element of Q(x_1, ..., x_n)."""

    __slots__ = ("_f",)

    def __init__(self, value: Union["Expr", Number] = 0):
        if isinstance(value, Expr):
            self._f = value._f
        elif isinstance(value, (int, Fraction)):
            K = _field(())
            self._f = _monic(K(QQ(value.numerator, value.denominator)) if isinstance(value, Fraction) else K(value))
        else:
            raise TypeError(f"cannot build Expr from {type(value).__name__}")

    @classmethod
    def _wrap(cls, f) -> "Expr":
        obj = cls.__new__(cls)
        obj._f = _monic(f)
        return obj

    @classmethod
    def symbol(cls, name: str, context: Sequence[str] = ()) -> "Expr":
        names = tuple(context) if name in context else tuple(context) + (name,)
        K = _field(names)
        return cls._wrap(K.gens[names.index(name)])

    @classmethod
    def const(cls, value: Number) -> "Expr":
        return cls(Fraction(value))

    # ---- field plumbing -------------------------------------------------
    @property
    def generators(self) -> tuple[str, ...]:
        return _names(self._f.field)

    def _in(self, field: FracField):
        if self._f.field is field:
            return self._f
        return self._f.set_field(field)

    def extend(self, names: Sequence[str]) -> "Expr":
        """Same value, re-expressed over ``names`` followed by any extra generators."""
        mine = self.generators
        merged = tuple(names) + tuple(n for n in mine if n not in names)
        if merged == mine:
            return self
        return Expr._wrap(self._in(_field(merged)))

    @staticmethod
    def _common(a: "Expr", b: "Expr"):
        fa, fb = a._f.field, b._f.field
        if fa is fb:
            return a._f, b._f
        na, nb = _names(fa), _names(fb)
        if set(nb) <= set(na):
            return a._f, b._in(fa)
        if set(na) <= set(nb):
            return a._in(fb), b._f
        K = _field(na + tuple(n for n in nb if n not in na))
        return a._in(K), b._in(K)

    @staticmethod
    def _coerce(other) -> "Expr":
        if isinstance(other, Expr):
            return other
        if isinstance(other, (int, Fraction)):
            return Expr(other)
        return NotImplemented

    # ---- arithmetic ----------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._common(self, other)
        return Expr._wrap(a + b)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._common(self, other)
        return Expr._wrap(a - b)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._common(self, other)
        return Expr._wrap(a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            raise ZeroDenominator(f"division of {self} by zero")
        a, b = self._common(self, other)
        return Expr._wrap(a / b)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __neg__(self):
        return Expr._wrap(-self._f)

    def __pos__(self):
        return self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            if self.is_zero():
                raise ZeroDenominator("negative power of zero")
            return Expr._wrap((1 / self._f) ** (-n))
        return Expr._wrap(self._f ** n)

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._common(self, other)
        if a.field is self._f.field and b.field is other._f.field:
            return a.numer == b.numer and a.denom == b.denom
        return a.numer * b.denom == b.numer * a.denom

    def __ne__(self, other) -> bool:
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self) -> int:
        # Modular image at a name-keyed point: independent of generator order.
        names = self.generators
        point = [zlib.crc32(n.encode()) % _HASH_PRIME + 2 for n in names]
        num = _mod_eval(self._f.numer, point)
        den = _mod_eval(self._f.denom, point)
        if den == 0:
            return 0
        return hash(num * pow(den, _HASH_PRIME - 2, _HASH_PRIME) % _HASH_PRIME)

    def __bool__(self) -> bool:
        return not self.is_zero()

    # ---- predicates and parts -----------------------------------------
    def is_zero(self) -> bool:
        return not self._f.numer

    def is_constant(self) -> bool:
        return self._f.numer.is_ground and self._f.denom.is_ground

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return _q(self._f.numer.LC) / _q(self._f.denom.LC) if self._f.numer else Fraction(0)

    @property
    def numerator(self) -> "Expr":
        return Expr._wrap(self._f.field(self._f.numer))

    @property
    def denominator(self) -> "Expr":
        return Expr._wrap(self._f.field(self._f.denom))

    def free_symbols(self) -> tuple[str, ...]:
        names = self.generators
        used = [False] * len(names)
        for poly in (self._f.numer, self._f.denom):
            for monom in poly.monoms():
                for i, e in enumerate(monom):
                    if e:
                        used[i] = True
        return tuple(n for n, u in zip(names, used) if u)

    def total_degree(self) -> int:
        """Max total degree of numerator and denominator."""
        return max(_tdeg(self._f.numer), _tdeg(self._f.denom))

    def term_count(self) -> int:
        return len(self._f.numer) + len(self._f.denom)

    # ---- calculus -----------------------------------------------------
    def diff(self, name: str) -> "Expr":
        names = self.generators
        if name not in names:
            return Expr._wrap(self._f.field(0))
        return Expr._wrap(self._f.diff(self._f.field.gens[names.index(name)]))

    def subs(self, bindings: Mapping[str, Union["Expr", Number]]) -> "Expr":
        names = self.generators
        if not any(n in bindings for n in names):
            return self
        images = []
        for n in names:
            if n in bindings:
                images.append(Expr._coerce(bindings[n]))
            else:
                images.append(Expr.symbol(n, names))
        num = _poly_image(self._f.numer, images)
        den = _poly_image(self._f.denom, images)
        if den.is_zero():
            raise ZeroDenominator(f"substitution makes the denominator of {self} vanish")
        return num / den

    # ---- evaluation ---------------------------------------------------
    def _values(self, point: Mapping[str, object]) -> list:
        names = self.generators
        free = set(self.free_symbols())
        vals = []
        for n in names:
            if n in point:
                vals.append(point[n])
            elif n in free:
                raise UnboundSymbol(f"no value for {n!r} in {self}")
            else:
                vals.append(0)
        return vals

    def eval(self, point: Mapping[str, float]) -> float:
        vals = [float(v) for v in self._values(point)]
        den = _float_eval(self._f.denom, vals)
        if abs(den) < POLE_TOL:
            raise PoleAtPoint(f"denominator of {self} vanishes at {dict(point)}")
        return _float_eval(self._f.numer, vals) / den

    def eval_exact(self, point: Mapping[str, Number]) -> Fraction:
        vals = [Fraction(v) for v in self._values(point)]
        den = _exact_eval(self._f.denom, vals)
        if den == 0:
            raise PoleAtPoint(f"denominator of {self} vanishes at {dict(point)}")
        return _exact_eval(self._f.numer, vals) / den

    def compile(self, names: Sequence[str]) -> Callable[..., tuple[float, float]]:
        """Return ``f(*values) -> (numerator, denominator)`` as floats, positional in ``names``."""
        free = self.free_symbols()
        for n in free:
            if n not in names:
                raise UnboundSymbol(f"{n!r} is not among {tuple(names)}")
        gens = self.generators
        slot = {n: f"a{names.index(n)}" for n in free}
        num = _poly_source(self._f.numer, gens, slot)
        den = _poly_source(self._f.denom, gens, slot)
        args = ", ".join(f"a{i}" for i in range(len(names)))
        src = f"def _f({args}):\n    return ({num}, {den})\n"
        scope: dict = {}
        exec(compile(src, "<kontact-expr>", "exec"), scope)
        return scope["_f"]

    # ---- printing -----------------------------------------------------
    def __str__(self) -> str:
        gens = self.generators
        num = _poly_text(self._f.numer, gens)
        den_poly = self._f.denom
        if den_poly == 1:
            return num
        den = _poly_text(den_poly, gens)
        if len(self._f.numer) > 1:
            num = f"({num})"
        terms = den_poly.terms()
        simple = len(terms) == 1 and terms[0][1] == 1 and sum(1 for e in terms[0][0] if e) == 1
        if not simple:
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self) -> str:
        return f"Expr({str(self)!r})"

    def to_sympy(self):
        return self._f.as_expr()


def _tdeg(poly) -> int:
    return max((sum(m) for m in poly.monoms()), default=0)


def _mod_eval(poly, point) -> int:
    total = 0
    for monom, c in poly.terms():
        q = _q(c)
        den = q.denominator % _HASH_PRIME
        if den == 0:
            return 0
        term = q.numerator * pow(den, _HASH_PRIME - 2, _HASH_PRIME)
        for v, e in zip(point, monom):
            if e:
                term = term * pow(v, e, _HASH_PRIME) % _HASH_PRIME
        total = (total + term) % _HASH_PRIME
    return total


def _float_eval(poly, vals: list[float]) -> float:
    total = 0.0
    for monom, c in poly.terms():
        term = float(_q(c))
        for v, e in zip(vals, monom):
            if e:
                term *= v ** e
        total += term
    return total


def _exact_eval(poly, vals: list[Fraction]) -> Fraction:
    total = Fraction(0)
    for monom, c in poly.terms():
        term = _q(c)
        for v, e in zip(vals, monom):
            if e:
                term *= v ** e
        total += term
    return total


def _poly_image(poly, images: list[Expr]) -> Expr:
    total = Expr(0)
    powers: dict[tuple[int, int], Expr] = {}
    for monom, c in poly.terms():
        term = Expr(_q(c))
        for i, e in enumerate(monom):
            if e:
                key = (i, e)
                if key not in powers:
                    powers[key] = images[i] ** e
                term = term * powers[key]
        total = total + term
    return total


def _monomial_text(monom, gens, sep="*", pow_op="^") -> str:
    parts = []
    for n, e in zip(gens, monom):
        if e == 1:
            parts.append(n)
        elif e:
            parts.append(f"{n}{pow_op}{e}")
    return sep.join(parts)


def _poly_text(poly, gens) -> str:
    if not poly:
        return "0"
    chunks = []
    for monom, c in poly.terms():
        q = _q(c)
        mono = _monomial_text(monom, gens)
        mag = abs(q)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        chunks.append((q < 0, body))
    neg, body = chunks[0]
    out = ("-" if neg else "") + body
    for neg, body in chunks[1:]:
        out += (" - " if neg else " + ") + body
    return out


def _poly_source(poly, gens, slot) -> str:
    if not poly:
        return "0.0"
    pieces = []
    for monom, c in poly.terms():
        factors = [repr(float(_q(c)))]
        for n, e in zip(gens, monom):
            if e == 1:
                factors.append(slot[n])
            elif e:
                factors.append(f"{slot[n]}**{e}")
        pieces.append("*".join(factors))
    return " + ".join(pieces)


# ---- parser -----------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>\*\*|[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            col = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ExprSyntaxError(f"unexpected character {text[col]!r}", text, col)
        kind = m.lastgroup
        value = m.group(kind)
        tokens.append((kind, "^" if value == "**" else value, m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, names: tuple[str, ...], known: frozenset):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.names = names
        self.known = known
        self.field = _field(names)

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, msg: str, tok=None):
        tok = tok or self.peek()
        raise ExprSyntaxError(msg, self.text, tok[2])

    def parse(self) -> Expr:
        if self.peek()[0] == "end":
            self.fail("empty expression")
        value = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return value

    def expr(self) -> Expr:
        value = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> Expr:
        value = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            op = self.take()
            rhs = self.factor()
            if op[1] == "*":
                value = value * rhs
            else:
                if rhs.is_zero():
                    raise ZeroDenominator(f"division by zero at column {op[2]}: {self.text!r}")
                value = value / rhs
        if self.peek()[0] in ("num", "id") or self.peek()[1] == "(":
            self.fail("missing operator (implicit multiplication is not accepted)")
        return value

    def factor(self) -> Expr:
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("+", "-"):
            self.take()
            inner = self.factor()
            return -inner if tok[1] == "-" else inner
        value = self.base()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            caret = self.take()
            sign = 1
            if self.peek()[1] == "-":
                self.take()
                sign = -1
            tok = self.take()
            if tok[0] != "num" or "." in tok[1]:
                self.fail("exponent must be an integer", tok)
            n = sign * int(tok[1])
            if n < 0 and value.is_zero():
                raise ZeroDenominator(f"negative power of zero at column {caret[2]}: {self.text!r}")
            value = value ** n
        return value

    def base(self) -> Expr:
        tok = self.take()
        kind, val, pos = tok
        if kind == "num":
            return Expr._wrap(self.field(QQ(Fraction(val).numerator, Fraction(val).denominator)))
        if kind == "id":
            if val not in self.known:
                raise UnknownSymbol(f"unknown symbol {val!r} at column {pos}: {self.text!r}")
            return Expr._wrap(self.field.gens[self.names.index(val)])
        if val == "(":
            inner = self.expr()
            if self.peek()[1] != ")":
                self.fail("expected ')'")
            self.take()
            return inner
        self.fail(f"unexpected {val or 'end of input'!r}", tok)


def _context(chart, constants) -> tuple[str, ...]:
    vars_ = tuple(chart.vars if isinstance(chart, Chart) else chart)
    consts = tuple(c for c in constants if c not in vars_)
    for c in consts:
        if not _IDENT.match(c):
            raise UnknownSymbol(f"invalid constant name {c!r}")
    return vars_ + consts


def parse(text: str, chart: Union[Chart, Sequence[str]] = (), constants: Sequence[str] = ()) -> Expr:
    """Parse ``text`` into an :class:`Expr` over the chart variables and opaque constants."""
    if not isinstance(text, str):
        raise ExprSyntaxError(f"expected a string, got {type(text).__name__}", repr(text), 0)
    names = _context(chart, constants)
    return _Parser(text, names, frozenset(names)).parse()


def evaluate(e: Expr, point: Mapping[str, float]) -> float:
    return e.eval(point)


def substitute(e: Expr, bindings: Mapping[str, Union[Expr, Number]]) -> Expr:
    return e.subs(bindings)


def diff(e: Expr, var: str, chart: Union[Chart, Sequence[str], None] = None) -> Expr:
    if chart is not None:
        vars_ = chart.vars if isinstance(chart, Chart) else tuple(chart)
        if var not in vars_:
            raise UnknownSymbol(f"{var!r} is not a chart variable")
    return e.diff(var)
