"""Exact linear algebra over Q(x): fraction-free elimination and real-span tests.

Matrices are lists of rows of :class:`Expr`.  Rows are cleared of
denominators and reduced with Bareiss' fraction-free scheme over the
polynomial ring, so every intermediate entry is a minor of the input.
Ranks are generic ranks: valid on the open dense set where the returned
pivots do not vanish.

Linear dependence over R (as opposed to over Q(x)) is decided by
evaluate-then-verify: candidate coefficients are read off at seeded random
rational points, then the relation is checked symbolically.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from .errors import PoleAtPoint, RankComputationOverflow, SingularSolve
from .expr import Expr, _field, _names, _tdeg

DEFAULT_SEED = 0xC0FFEE
MAX_DEGREE = 400
MAX_TERMS = 40000


@dataclass(frozen=True)
class Echelon:
    """Fraction-free row echelon form.

    ``rows`` are polynomial rows (in ``field.ring``), ``pivots`` the pivot
    columns and ``row_order`` the original index of each echelon row.
    """

    field: object
    rows: tuple
    pivots: tuple[int, ...]
    ncols: int

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def pivot_values(self) -> list[Expr]:
        return [Expr._wrap(self.field(self.rows[i][c])) for i, c in enumerate(self.pivots)]


def _common_field(rows: Sequence[Sequence[Expr]]):
    names: list[str] = []
    seen = set()
    for row in rows:
        for e in row:
            for n in e.generators:
                if n not in seen:
                    seen.add(n)
                    names.append(n)
    return _field(tuple(names))


def _clear_row(row, field):
    ring = field.ring
    fs = [e._in(field) for e in row]
    lcm = ring.one
    for f in fs:
        if f.denom != 1:
            lcm = lcm.lcm(f.denom)
    return [f.numer * lcm.exquo(f.denom) if f.numer else ring.zero for f in fs]


def _guard(p, max_degree: int, max_terms: int):
    if len(p) > max_terms or _tdeg(p) > max_degree:
        raise RankComputationOverflow(
            f"intermediate entry has {len(p)} terms and degree {_tdeg(p)}"
        )


def echelon(
    rows: Sequence[Sequence[Expr]],
    pivot_cols: Optional[int] = None,
    max_degree: int = MAX_DEGREE,
    max_terms: int = MAX_TERMS,
) -> Echelon:
    """Bareiss elimination; pivots are searched only in the first ``pivot_cols`` columns."""
    rows = [list(r) for r in rows]
    ncols = len(rows[0]) if rows else 0
    if any(len(r) != ncols for r in rows):
        raise ValueError("ragged matrix")
    field = _common_field(rows)
    ring = field.ring
    M = [_clear_row(r, field) for r in rows]
    m = len(M)
    limit = ncols if pivot_cols is None else pivot_cols
    prev = ring.one
    r = 0
    pivots = []
    for c in range(limit):
        if r == m:
            break
        cand = [i for i in range(r, m) if M[i][c]]
        if not cand:
            continue
        # lowest total degree keeps the minors small
        p = min(cand, key=lambda i: (_tdeg(M[i][c]), len(M[i][c]), i))
        M[r], M[p] = M[p], M[r]
        piv = M[r][c]
        for i in range(r + 1, m):
            a = M[i][c]
            row_i, row_r = M[i], M[r]
            for j in range(c + 1, ncols):
                v = piv * row_i[j]
                if a and row_r[j]:
                    v = v - a * row_r[j]
                if v and prev != 1:
                    v = v.exquo(prev)
                if v:
                    _guard(v, max_degree, max_terms)
                row_i[j] = v
            row_i[c] = ring.zero
        prev = piv
        pivots.append(c)
        r += 1
    return Echelon(field, tuple(tuple(row) for row in M), tuple(pivots), ncols)


def rank(rows: Sequence[Sequence[Expr]]) -> int:
    if not rows or not rows[0]:
        return 0
    return echelon(rows).rank


def _back_substitute(E: Echelon, rhs_cols: Sequence[int], free: dict[int, object], n: int):
    """Solve the first ``n`` columns given fixed values of the free unknowns."""
    field = E.field
    x = dict(free)
    for k in range(E.rank - 1, -1, -1):
        c = E.pivots[k]
        row = E.rows[k]
        acc = field(0)
        for col in rhs_cols:
            if row[col]:
                acc = acc + field(row[col])
        for j in range(c + 1, n):
            if row[j] and x.get(j):
                acc = acc - field(row[j]) * x[j]
        x[c] = acc / field(row[c])
    return [x.get(j, field(0)) for j in range(n)]


def nullspace(rows: Sequence[Sequence[Expr]], clear: bool = True) -> list[list[Expr]]:
    """Basis of {v : A v = 0} over Q(x); vectors are made polynomial when ``clear``."""
    if not rows:
        raise ValueError("empty matrix")
    n = len(rows[0])
    E = echelon(rows)
    field = E.field
    basis = []
    for f in range(n):
        if f in E.pivots:
            continue
        free = {j: field(0) for j in range(n) if j not in E.pivots}
        free[f] = field(1)
        vec = _back_substitute(E, (), free, n)
        if clear:
            lcm = field.ring.one
            for v in vec:
                if v.denom != 1:
                    lcm = lcm.lcm(v.denom)
            vec = [v * field(lcm) for v in vec]
        basis.append([Expr._wrap(v) for v in vec])
    return basis


def solve(A: Sequence[Sequence[Expr]], B: Sequence[Sequence[Expr]]) -> list[list[Expr]]:
    """Unique solution X (n x s) of A X = B, else :class:`SingularSolve`."""
    m = len(A)
    if m == 0 or len(B) != m:
        raise ValueError("shape mismatch")
    n = len(A[0])
    s = len(B[0])
    E = echelon([list(A[i]) + list(B[i]) for i in range(m)], pivot_cols=n)
    if E.rank < n:
        raise SingularSolve(f"coefficient matrix has generic rank {E.rank} < {n}")
    for k in range(E.rank, m):
        if any(E.rows[k][n + t] for t in range(s)):
            raise SingularSolve("system is inconsistent")
    cols = []
    for t in range(s):
        vec = _back_substitute(E, (n + t,), {}, n)
        cols.append([Expr._wrap(v) for v in vec])
    return [[cols[t][i] for t in range(s)] for i in range(n)]


def inverse(A: Sequence[Sequence[Expr]]) -> list[list[Expr]]:
    n = len(A)
    eye = [[Expr(1 if i == j else 0) for j in range(n)] for i in range(n)]
    return solve(A, eye)


# ---- dependence over R --------------------------------------------------


def _free_names(vectors: Sequence[Sequence[Expr]]) -> list[str]:
    names: list[str] = []
    for vec in vectors:
        for e in vec:
            for n in e.free_symbols():
                if n not in names:
                    names.append(n)
    return names


def _sample_rows(vectors, names, count, rng) -> list[list[list[Fraction]]]:
    """Exact values of every vector at ``count`` random integer points."""
    out = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 50 * count + 100:
            raise PoleAtPoint("could not find sample points off the pole set")
        point = {n: rng.randint(-7, 7) for n in names}
        try:
            out.append([[e.eval_exact(point) for e in vec] for vec in vectors])
        except PoleAtPoint:
            continue
    return out


def span_coefficients(
    target: Sequence[Expr],
    basis: Sequence[Sequence[Expr]],
    rng: Optional[random.Random] = None,
    seed: int = DEFAULT_SEED,
) -> Optional[list[Fraction]]:
    """Rational c with target == sum c_j basis_j identically, or None.

    ``basis`` must be linearly independent over R.
    """
    target = list(target)
    if not basis:
        return [] if all(e.is_zero() for e in target) else None
    if rng is None:
        rng = random.Random(seed)
    r = len(basis)
    vectors = [target] + [list(b) for b in basis]
    names = _free_names(vectors)
    dim = len(target)
    count = 2 * len(names) + r
    for _ in range(8):
        samples = _sample_rows(vectors, names, count, rng)
        rows = []
        for values in samples:
            for i in range(dim):
                rows.append([QQ(v.numerator, v.denominator) for v in (values[j + 1][i] for j in range(r))]
                            + [QQ(values[0][i].numerator, values[0][i].denominator)])
        M = DomainMatrix(rows, (len(rows), r + 1), QQ)
        red, piv = M.rref()
        if r in piv:
            return None
        if len(piv) == r:
            coeffs = [Fraction(int(red[i, r].element.numerator), int(red[i, r].element.denominator))
                      for i in range(r)]
            for i in range(dim):
                combo = Expr(0)
                for j, c in enumerate(coeffs):
                    if c:
                        combo = combo + basis[j][i] * c
                if combo != target[i]:
                    return None
            return coeffs
        count *= 2
    raise SingularSolve("basis vectors appear to be dependent over R")


def independent_over_reals(
    vectors: Sequence[Sequence[Expr]],
    rng: Optional[random.Random] = None,
    seed: int = DEFAULT_SEED,
) -> list[int]:
    """Indices of a maximal R-independent subfamily, scanning left to right."""
    if rng is None:
        rng = random.Random(seed)
    kept: list[int] = []
    for i, v in enumerate(vectors):
        if all(e.is_zero() for e in v):
            continue
        if span_coefficients(v, [vectors[j] for j in kept], rng) is None:
            kept.append(i)
    return kept
