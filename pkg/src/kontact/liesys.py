"""Lie systems: bracket closure, frames, prolongations and companion equations."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

from .errors import (
    DegenerateFrame,
    DependentProjections,
    LambdaNotConstant,
    NotClosed,
    SampleNotOnZeroSet,
    SingularSolve,
)
from .exterior import (
    DiffForm,
    KFunction,
    VectorField,
    VectorForm,
    apply_field,
    ext_deriv,
    lie_bracket,
    pairing,
    wedge,
)
from .expr import Chart, Expr
from .kcontact import (
    InconsistentResult,
    KContactStructure,
    hamiltonian_check,
    kcontact_bracket,
    kcontact_structure,
    reeb_derivation,
)
from .linalg import DEFAULT_SEED, independent_over_reals, rank, solve, span_coefficients

__all__ = [
    "LieClosure",
    "bracket_closure",
    "structure_constants",
    "is_locally_automorphic",
    "dual_coframe",
    "maurer_cartan_check",
    "projectability_check",
    "diagonal_prolongation",
    "CompanionSystem",
    "companion_system",
    "nilpotency_index",
    "time_derivative",
    "momentum_invariance",
    "pde_integrability",
]

Table = dict[tuple[int, int], dict[int, Fraction]]


def _vec(X: VectorField) -> list[Expr]:
    return list(X.coeffs)


@dataclass(frozen=True)
class LieClosure:
    """A basis of a finite-dimensional Lie algebra of vector fields over R."""

    basis: tuple[VectorField, ...]
    labels: tuple[str, ...]
    constants: tuple[tuple[tuple[Fraction, ...], ...], ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def bracket(self, a: int, b: int) -> tuple[Fraction, ...]:
        return self.constants[a][b]

    def table(self) -> Table:
        """Nonzero brackets [X_a, X_b] for a < b as {(a, b): {c: coefficient}}."""
        out: Table = {}
        for a in range(self.dim):
            for b in range(a + 1, self.dim):
                row = {g: c for g, c in enumerate(self.constants[a][b]) if c}
                if row:
                    out[(a, b)] = row
        return out

    def jacobi_ok(self) -> bool:
        c = self.constants
        n = self.dim
        for a in range(n):
            for b in range(n):
                for d in range(n):
                    for e in range(n):
                        s = sum(
                            c[a][b][m] * c[m][d][e] + c[b][d][m] * c[m][a][e] + c[d][a][m] * c[m][b][e]
                            for m in range(n)
                        )
                        if s:
                            return False
        return True


def _fill(n: int, known: dict[tuple[int, int], list[Fraction]]) -> tuple:
    zero = tuple(Fraction(0) for _ in range(n))
    rows = []
    for a in range(n):
        row = []
        for b in range(n):
            if a == b:
                row.append(zero)
            elif a < b:
                v = known[(a, b)]
                row.append(tuple(list(v) + [Fraction(0)] * (n - len(v))))
            else:
                v = known[(b, a)]
                row.append(tuple(-x for x in list(v) + [Fraction(0)] * (n - len(v))))
        rows.append(tuple(row))
    return tuple(rows)


def bracket_closure(
    generators: Sequence[VectorField],
    names: Optional[Sequence[str]] = None,
    max_dim: int = 64,
    max_depth: int = 16,
    seed: int = DEFAULT_SEED,
) -> LieClosure:
    """Smallest real Lie algebra containing the generators, with structure constants."""
    if not generators:
        raise ValueError("no generators")
    if max_dim > 64:
        raise ValueError("max_dim is capped at 64")
    rng = random.Random(seed)
    names = list(names) if names is not None else [f"X{i + 1}" for i in range(len(generators))]
    basis: list[VectorField] = []
    labels: list[str] = []
    depth: list[int] = []
    for g, nm in zip(generators, names):
        if g.is_zero():
            continue
        if span_coefficients(_vec(g), [_vec(b) for b in basis], rng) is None:
            basis.append(g)
            labels.append(nm)
            depth.append(1)
    known: dict[tuple[int, int], list[Fraction]] = {}
    pairs = [(a, b) for b in range(len(basis)) for a in range(b)]
    pairs.sort()
    queue = list(pairs)
    while queue:
        a, b = queue.pop(0)
        br = lie_bracket(basis[a], basis[b])
        if br.is_zero():
            known[(a, b)] = []
            continue
        coeffs = span_coefficients(_vec(br), [_vec(x) for x in basis], rng)
        if coeffs is not None:
            known[(a, b)] = coeffs
            continue
        d = depth[a] + depth[b]
        if len(basis) >= max_dim or d > max_depth:
            raise NotClosed(f"closure exceeds dimension {max_dim} or depth {max_depth}",
                            dim=len(basis), labels=labels)
        basis.append(br)
        labels.append(f"[{labels[a]},{labels[b]}]")
        depth.append(d)
        new = len(basis) - 1
        known[(a, b)] = [Fraction(0)] * new + [Fraction(1)]
        queue.extend((i, new) for i in range(new))
    return LieClosure(tuple(basis), tuple(labels), _fill(len(basis), known))


def structure_constants(
    fields: Sequence[VectorField], names: Optional[Sequence[str]] = None, seed: int = DEFAULT_SEED
) -> LieClosure:
    """Structure constants of a given basis; NotClosed if a bracket leaves the span."""
    rng = random.Random(seed)
    vecs = [_vec(x) for x in fields]
    if len(independent_over_reals(vecs, rng)) != len(fields):
        raise ValueError("fields are linearly dependent over R")
    known = {}
    for b in range(len(fields)):
        for a in range(b):
            coeffs = span_coefficients(_vec(lie_bracket(fields[a], fields[b])), vecs, rng)
            if coeffs is None:
                raise NotClosed(f"[{a + 1},{b + 1}] is not in the span")
            known[(a, b)] = coeffs
    labels = tuple(names) if names is not None else tuple(f"X{i + 1}" for i in range(len(fields)))
    return LieClosure(tuple(fields), labels, _fill(len(fields), known))


def is_locally_automorphic(fields: Sequence[VectorField]) -> bool:
    """As many fields as dimensions and generically independent at a point."""
    if not fields:
        return False
    n = fields[0].chart.dim
    return len(fields) == n and rank([_vec(x) for x in fields]) == n


def dual_coframe(frame: Sequence[VectorField]) -> list[DiffForm]:
    """1-forms Y^i with Y^i(Y_j) = delta_ij."""
    if not frame:
        raise DegenerateFrame("empty frame")
    chart = frame[0].chart
    n = chart.dim
    if len(frame) != n:
        raise DegenerateFrame(f"{len(frame)} fields on a {n}-manifold")
    FT = [[frame[j].coeffs[i] for i in range(n)] for j in range(n)]
    eye = [[Expr(1 if i == j else 0) for j in range(n)] for i in range(n)]
    try:
        UT = solve(FT, eye)
    except SingularSolve as exc:
        raise DegenerateFrame(str(exc)) from exc
    return [DiffForm.one_form(chart, [UT[i][a] for i in range(n)]) for a in range(n)]


@dataclass(frozen=True)
class MaurerCartan:
    ok: bool
    residuals: tuple[DiffForm, ...]

    @property
    def failing(self) -> list[int]:
        return [i for i, r in enumerate(self.residuals) if not r.is_zero()]


def maurer_cartan_check(coframe: Sequence[DiffForm], closure: LieClosure) -> MaurerCartan:
    """d Y^i == -sum_{j<k} c_jk^i Y^j ^ Y^k, with c the frame's own constants."""
    n = len(coframe)
    if closure.dim != n:
        raise ValueError("coframe and structure constants have different sizes")
    res = []
    for i in range(n):
        r = ext_deriv(coframe[i])
        for j in range(n):
            for k in range(j + 1, n):
                c = closure.constants[j][k][i]
                if c:
                    r = r + wedge(coframe[j], coframe[k]) * c
        res.append(r)
    return MaurerCartan(all(r.is_zero() for r in res), tuple(res))


@dataclass(frozen=True)
class Projectability:
    ok: bool
    flags: tuple[tuple[bool, ...], ...]


def projectability_check(
    fields: Sequence[VectorField], eta: Union[VectorForm, KContactStructure]
) -> Projectability:
    """Every R_b annihilates every h_a; cross-checked against [R_b, X_a] == 0."""
    s = kcontact_structure(eta)
    flags = []
    for X in fields:
        chk = hamiltonian_check(X, s)
        if not chk.ok:
            raise InconsistentResult("field is not Hamiltonian")
        row = []
        for R in s.reeb:
            invariant = all(apply_field(R, c).is_zero() for c in chk.hamiltonian)
            if invariant != lie_bracket(R, X).is_zero():
                raise InconsistentResult("Reeb invariance disagrees with commutation")
            row.append(invariant)
        flags.append(tuple(row))
    return Projectability(all(all(r) for r in flags), tuple(flags))


@dataclass(frozen=True)
class Prolongation:
    chart: Chart
    fields: tuple[VectorField, ...]
    eta: VectorForm


def _rename(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    return e.subs(mapping)


def diagonal_prolongation(
    fields: Sequence[VectorField], eta: VectorForm, ell: int
) -> Prolongation:
    """Diagonal prolongation to ell+1 copies; copy c of e_b becomes e_{c*k+b}."""
    if ell < 0:
        raise ValueError("ell must be nonnegative")
    chart = eta.chart
    if ell == 0:
        return Prolongation(chart, tuple(fields), eta)
    n, k = chart.dim, eta.k
    copies = ell + 1
    big = Chart(tuple(f"{v}_{c}" for c in range(copies) for v in chart.vars))
    maps = [{v: big.coordinate(f"{v}_{c}") for v in chart.vars} for c in range(copies)]
    new_fields = []
    for X in fields:
        coeffs = []
        for c in range(copies):
            coeffs.extend(_rename(x, maps[c]) for x in X.coeffs)
        new_fields.append(VectorField(big, coeffs))
    comps = []
    for c in range(copies):
        for w in eta.components:
            terms = [(tuple(i + c * n for i in idx), _rename(v, maps[c])) for idx, v in w.terms]
            comps.append(DiffForm(big, 1, terms))
    return Prolongation(big, tuple(new_fields), VectorForm(big, comps))


@dataclass(frozen=True)
class CompanionSystem:
    """df/dt = M(t) f on the retained projected functions.

    ``kept`` indexes the Hamiltonians whose projection is nonzero; ``matrix``
    is over those, with entries linear in the coefficient symbols.
    """

    kept: tuple[int, ...]
    projections: tuple[Expr, ...]
    structure: dict
    lambdas: dict
    matrix: tuple[tuple[Expr, ...], ...]
    coefficients: tuple[str, ...]
    nilpotency: Optional[int]

    def rhs(self, values: Mapping[str, float]) -> list[list[float]]:
        return [[e.eval(values) if not e.is_zero() else 0.0 for e in row] for row in self.matrix]


def _projected_coeffs(value: Expr, basis: list[Expr], rng, what: str) -> list[Fraction]:
    coeffs = span_coefficients([value], [[p] for p in basis], rng)
    if coeffs is None:
        raise LambdaNotConstant(f"{what} = {value} is not a constant combination of the projections")
    return coeffs


def nilpotency_index(M: Sequence[Sequence[Expr]], limit: int) -> Optional[int]:
    """Least m <= limit with M^m == 0, or None."""
    n = len(M)
    P = [list(row) for row in M]
    for m in range(1, limit + 1):
        if all(e.is_zero() for row in P for e in row):
            return m
        P = [[sum((P[i][t] * M[t][j] for t in range(n) if not P[i][t].is_zero() and not M[t][j].is_zero()),
                  Expr(0)) for j in range(n)] for i in range(n)]
    return None


def companion_system(
    hams: Sequence[KFunction],
    fields: Sequence[VectorField],
    eta: Union[VectorForm, KContactStructure],
    theta: Sequence,
    coefficients: Optional[Sequence[str]] = None,
    seed: int = DEFAULT_SEED,
) -> CompanionSystem:
    """Linear equations on f(t) making sum f^a <h_a, theta> a constant of motion of sum b_b X_b."""
    s = kcontact_structure(eta)
    rng = random.Random(seed)
    r = len(hams)
    if len(fields) != r:
        raise ValueError("one field per Hamiltonian")
    names = tuple(coefficients) if coefficients is not None else tuple(f"b{i + 1}" for i in range(r))
    if len(names) != r:
        raise ValueError("one coefficient name per field")
    proj = [pairing(h, theta) for h in hams]
    kept = [i for i, p in enumerate(proj) if not p.is_zero()]
    basis = [proj[i] for i in kept]
    if len(independent_over_reals([[p] for p in basis], rng)) != len(basis):
        raise DependentProjections("projections <h_a, theta> are linearly dependent")
    reeb = [reeb_derivation(h, s) for h in hams]
    cs: dict[tuple[int, int], list[Fraction]] = {}
    ls: dict[tuple[int, int], list[Fraction]] = {}
    for ai, a in enumerate(kept):
        for b in range(r):
            br = kcontact_bracket(hams[a], fields[a], hams[b], fields[b], s)
            cs[(a, b)] = _projected_coeffs(pairing(br, theta), basis, rng, f"<{{h{a + 1},h{b + 1}}}, theta>")
            rh = KFunction([apply_field(reeb[a], c) for c in hams[b]])
            ls[(a, b)] = _projected_coeffs(pairing(rh, theta), basis, rng, f"<R_h{a + 1} h{b + 1}, theta>")
            # X_b <h_a, theta> must equal sum (c - lambda) projections
            direct = apply_field(fields[b], proj[a])
            combo = sum((p * (c - l) for p, c, l in zip(basis, cs[(a, b)], ls[(a, b)])), Expr(0))
            if direct != combo:
                raise InconsistentResult(f"X_{b + 1} acting on projection {a + 1} disagrees")
    bsyms = [Expr.symbol(nm) for nm in names]
    m = len(kept)
    M = [[Expr(0)] * m for _ in range(m)]
    for row, alpha in enumerate(range(m)):
        for col, nu in enumerate(kept):
            acc = Expr(0)
            for b in range(r):
                diff_ = cs[(nu, b)][alpha] - ls[(nu, b)][alpha]
                if diff_:
                    acc = acc - bsyms[b] * diff_
            M[row][col] = acc
    structure = {key: {kept[g]: c for g, c in enumerate(v) if c} for key, v in cs.items()}
    lambdas = {key: {kept[g]: c for g, c in enumerate(v) if c} for key, v in ls.items()}
    return CompanionSystem(
        tuple(kept),
        tuple(basis),
        structure,
        lambdas,
        tuple(tuple(row) for row in M),
        names,
        nilpotency_index(M, m + 1),
    )


def time_derivative(
    I: Expr, fields: Sequence[VectorField], coefficients: Optional[Sequence[str]] = None
) -> Expr:
    """dI/dt = sum b_b X_b(I) along the system, for I without explicit time dependence."""
    names = coefficients if coefficients is not None else [f"b{i + 1}" for i in range(len(fields))]
    out = Expr(0)
    for nm, X in zip(names, fields):
        v = apply_field(X, I)
        if not v.is_zero():
            out = out + Expr.symbol(nm) * v
    return out


@dataclass(frozen=True)
class MomentumReport:
    ok: bool
    points: int
    max_reeb_residual: float
    max_tangency_residual: float
    exact: bool


def momentum_invariance(
    hams: Sequence[KFunction],
    fields: Sequence[VectorField],
    eta: Union[VectorForm, KContactStructure],
    theta: Sequence,
    points: Sequence[Mapping[str, Union[int, Fraction, float]]],
    tol: float = 1e-9,
) -> MomentumReport:
    """On the zero set of <h_a, theta>: R_{h_b} and X_b leave every projection at zero."""
    s = kcontact_structure(eta)
    proj = [pairing(h, theta) for h in hams]
    reeb = [reeb_derivation(h, s) for h in hams]
    reeb_res = [apply_field(R, p) for R in reeb for p in proj]
    tang_res = [apply_field(X, p) for X in fields for p in proj]
    exact = all(isinstance(v, (int, Fraction)) for pt in points for v in pt.values())
    worst_r = worst_t = 0.0

    def value(e: Expr, pt):
        return e.eval_exact(pt) if exact else e.eval(pt)

    for pt in points:
        for p in proj:
            if abs(value(p, pt)) > (0 if exact else tol):
                raise SampleNotOnZeroSet(f"projection {p} does not vanish at {dict(pt)}")
        worst_r = max([worst_r] + [abs(float(value(e, pt))) for e in reeb_res])
        worst_t = max([worst_t] + [abs(float(value(e, pt))) for e in tang_res])
    limit = 0.0 if exact else tol
    return MomentumReport(worst_r <= limit and worst_t <= limit, len(points), worst_r, worst_t, exact)


def _total_dt(e: Expr, t: str, deps: Mapping[str, Mapping[str, Optional[Expr]]]) -> Expr:
    out = e.diff(t)
    for const, by_time in deps.items():
        if t not in by_time:
            continue
        de = e.diff(const)
        if de.is_zero():
            continue
        rate = by_time[t]
        if rate is None:
            rate = Expr.symbol(f"{const}_d{t}")
        out = out + de * rate
    return out


def pde_integrability(
    fields: Sequence[VectorField],
    times: Sequence[str],
    dependence: Optional[Mapping[str, Mapping[str, Optional[Expr]]]] = None,
) -> dict[tuple[int, int], VectorField]:
    """Residual [d_ta + X_a, d_tb + X_b] for a < b; the system is integrable iff all vanish.

    ``dependence[c][t]`` is the derivative of opaque constant c in time t, or
    None to introduce a fresh symbol ``c_dt``.
    """
    if len(fields) != len(times):
        raise ValueError("one time variable per field")
    deps = dependence or {}
    out = {}
    for a in range(len(fields)):
        for b in range(a + 1, len(fields)):
            Xa, Xb = fields[a], fields[b]
            coeffs = [
                _total_dt(yb, times[a], deps) - _total_dt(ya, times[b], deps) + br
                for ya, yb, br in zip(Xa.coeffs, Xb.coeffs, lie_bracket(Xa, Xb).coeffs)
            ]
            out[(a, b)] = VectorField(Xa.chart, coeffs)
    return out
