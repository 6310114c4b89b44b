"""k-contact forms: verification, Reeb fields, Hamiltonian fields and brackets.

A k-contact form is an R^k-valued 1-form eta on an n-manifold with
ker eta of corank k, ker d(eta) of rank k and the two kernels meeting only
in zero.  All rank statements are generic: they hold on the open dense set
where the pivots of the fraction-free elimination do not vanish.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import (
    KontactError,
    NoAnnihilator,
    NotHamiltonianInput,
    NotKContact,
    NotMaxNonintegrable,
    NotProjectable,
    SingularSolve,
    SpanFailure,
    SymmetryFailure,
)
from .exterior import (
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
from .expr import Chart, Expr
from .linalg import DEFAULT_SEED, echelon, nullspace, rank, solve, span_coefficients

__all__ = [
    "KContactReport",
    "KContactStructure",
    "verify_kcontact",
    "kcontact_structure",
    "reeb_fields",
    "hamiltonian_function",
    "hamiltonian_residual",
    "hamiltonian_check",
    "hamiltonian_field",
    "reeb_derivation",
    "kcontact_bracket",
    "bracket_table",
    "is_dissipated",
    "max_nonintegrable",
    "build_kcontact",
    "combine_hamiltonians",
    "verify_hdw",
    "presymplectic_project",
    "presymplectic_extend",
]


class InconsistentResult(KontactError):
    """Two independent computations of the same quantity disagree."""

    code = "InconsistentResult"


def _form_matrix(w: DiffForm) -> list[list[Expr]]:
    """Rows i, columns j: w(d_j, d_i), so that (i_v w)_i = sum_j M[i][j] v_j."""
    n = w.chart.dim
    d = w.as_dict()
    M = [[Expr(0)] * n for _ in range(n)]
    for (a, b), c in d.items():
        M[b][a] = c
        M[a][b] = -c
    return M


def _eta_rows(eta: VectorForm) -> list[list[Expr]]:
    return [list(c.coefficients()) for c in eta.components]


def _deta_rows(deta: VectorForm) -> list[list[Expr]]:
    rows = []
    for c in deta.components:
        rows.extend(_form_matrix(c))
    return rows


@dataclass(frozen=True)
class KContactReport:
    ok: bool
    k: int
    dim: int
    rank_eta: int
    kernel_deta: int
    intersection: int
    reason: Optional[str] = None

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "k": self.k,
            "dim": self.dim,
            "corank_ker_eta": self.rank_eta,
            "rank_ker_deta": self.kernel_deta,
            "intersection_dim": self.intersection,
            "reason": self.reason,
        }


def verify_kcontact(eta: VectorForm) -> KContactReport:
    if eta.degree != 1:
        raise ValueError("a k-contact form is a 1-form")
    n, k = eta.chart.dim, eta.k
    deta = ext_deriv(eta)
    er = _eta_rows(eta)
    dr = _deta_rows(deta)
    rank_eta = rank(er)
    kernel_deta = n - rank(dr)
    inter = n - rank(er + dr)
    reason = None
    if rank_eta != k:
        reason = "CorankMismatch"
    elif kernel_deta != k:
        reason = "ReebRankMismatch"
    elif inter != 0:
        reason = "NontrivialIntersection"
    return KContactReport(reason is None, k, n, rank_eta, kernel_deta, inter, reason)


@dataclass(frozen=True)
class KContactStructure:
    """A verified k-contact form together with its differential and Reeb fields."""

    eta: VectorForm
    deta: VectorForm
    reeb: tuple[VectorField, ...]

    @property
    def chart(self) -> Chart:
        return self.eta.chart

    @property
    def k(self) -> int:
        return self.eta.k


def kcontact_structure(eta: Union[VectorForm, KContactStructure]) -> KContactStructure:
    if isinstance(eta, KContactStructure):
        return eta
    report = verify_kcontact(eta)
    if not report.ok:
        raise NotKContact(report.reason or "", report=report.as_dict())
    return KContactStructure(eta, ext_deriv(eta), _solve_reeb(eta))


def _solve_reeb(eta: VectorForm) -> tuple[VectorField, ...]:
    n, k = eta.chart.dim, eta.k
    deta = ext_deriv(eta)
    A = _eta_rows(eta) + _deta_rows(deta)
    B = [[Expr(1 if a == b else 0) for b in range(k)] for a in range(k)]
    B += [[Expr(0)] * k for _ in range(k * n)]
    try:
        X = solve(A, B)
    except SingularSolve as exc:
        raise NotKContact(f"Reeb system has no unique solution ({exc})") from exc
    return tuple(VectorField(eta.chart, [X[i][a] for i in range(n)]) for a in range(k))


def reeb_fields(eta: Union[VectorForm, KContactStructure]) -> tuple[VectorField, ...]:
    """Fields R_a with eta^b(R_a) = delta_ab and i_{R_a} d(eta^b) = 0."""
    return kcontact_structure(eta).reeb


def hamiltonian_function(X: VectorField, eta: Union[VectorForm, KContactStructure]) -> KFunction:
    """h = -i_X eta."""
    form = eta.eta if isinstance(eta, KContactStructure) else eta
    return -interior(X, form).functions()


def reeb_derivation(h: KFunction, eta: Union[VectorForm, KContactStructure]) -> VectorField:
    """R_h = sum_a h^a R_a."""
    s = kcontact_structure(eta)
    if h.k != s.k:
        raise ValueError(f"{h.k}-valued function on a {s.k}-contact manifold")
    out = VectorField.zero(s.chart)
    for c, R in zip(h.components, s.reeb):
        if not c.is_zero():
            out = out + R * c
    return out


def _reeb_correction(h: KFunction, s: KContactStructure, alpha: int) -> DiffForm:
    out = DiffForm.zero(s.chart, 1)
    for R, e in zip(s.reeb, s.eta.components):
        coeff = apply_field(R, h[alpha])
        if not coeff.is_zero():
            out = out + e * coeff
    return out


def hamiltonian_residual(X: VectorField, eta: Union[VectorForm, KContactStructure]) -> VectorForm:
    """Components i_X d(eta^a) - dh^a + sum_b (R_b h^a) eta^b with h = -i_X eta."""
    s = kcontact_structure(eta)
    h = hamiltonian_function(X, s)
    comps = []
    for a in range(s.k):
        dh = ext_deriv(DiffForm.function(s.chart, h[a]))
        comps.append(interior(X, s.deta[a]) - dh + _reeb_correction(h, s, a))
    return VectorForm(s.chart, comps)


@dataclass(frozen=True)
class HamiltonianCheck:
    ok: bool
    hamiltonian: KFunction
    residual: VectorForm


def hamiltonian_check(X: VectorField, eta: Union[VectorForm, KContactStructure]) -> HamiltonianCheck:
    s = kcontact_structure(eta)
    res = hamiltonian_residual(X, s)
    return HamiltonianCheck(res.is_zero(), hamiltonian_function(X, s), res)


def hamiltonian_field(h: KFunction, eta: Union[VectorForm, KContactStructure]) -> VectorField:
    """The unique X with -i_X eta = h and vanishing residual; NotHamiltonianInput if none."""
    s = kcontact_structure(eta)
    n = s.chart.dim
    A = _eta_rows(s.eta) + _deta_rows(s.deta)
    B = [[-h[a]] for a in range(s.k)]
    for a in range(s.k):
        target = ext_deriv(DiffForm.function(s.chart, h[a])) - _reeb_correction(h, s, a)
        coeffs = target.coefficients()
        B.extend([[c] for c in coeffs])
    try:
        X = solve(A, B)
    except SingularSolve as exc:
        raise NotHamiltonianInput(f"{h} has no Hamiltonian field ({exc})") from exc
    return VectorField(s.chart, [X[i][0] for i in range(n)])


def _require_hamiltonian(f: KFunction, Xf: VectorField, s: KContactStructure, label: str) -> None:
    chk = hamiltonian_check(Xf, s)
    if not chk.ok:
        raise NotHamiltonianInput(f"{label}: field is not Hamiltonian")
    if chk.hamiltonian != f:
        raise NotHamiltonianInput(f"{label}: -i_X eta = {chk.hamiltonian}, not {f}")


def kcontact_bracket(
    f: KFunction,
    Xf: VectorField,
    g: KFunction,
    Xg: VectorField,
    eta: Union[VectorForm, KContactStructure],
    check: bool = True,
) -> KFunction:
    """{f, g} = eta([X_f, X_g]), cross-checked against -X_f g - R_g f."""
    s = kcontact_structure(eta)
    if check:
        _require_hamiltonian(f, Xf, s, "f")
        _require_hamiltonian(g, Xg, s, "g")
    value = interior(lie_bracket(Xf, Xg), s.eta).functions()
    if check:
        Rg = reeb_derivation(g, s)
        other = KFunction([-apply_field(Xf, gc) - apply_field(Rg, fc) for fc, gc in zip(f, g)])
        if other != value:
            raise InconsistentResult(f"bracket {value} differs from its derivation form {other}")
    return value


def _flat(h: KFunction) -> list[Expr]:
    return list(h.components)


def bracket_table(
    hams: Sequence[KFunction],
    fields: Sequence[VectorField],
    eta: Union[VectorForm, KContactStructure],
    rng: Optional[random.Random] = None,
    seed: int = DEFAULT_SEED,
) -> dict[tuple[int, int], Optional[dict[int, Fraction]]]:
    """{h_a, h_b} for a < b written in the basis h; None where it leaves the span."""
    s = kcontact_structure(eta)
    if rng is None:
        rng = random.Random(seed)
    basis = [_flat(h) for h in hams]
    table: dict[tuple[int, int], Optional[dict[int, Fraction]]] = {}
    for a in range(len(hams)):
        for b in range(a + 1, len(hams)):
            value = kcontact_bracket(hams[a], fields[a], hams[b], fields[b], s)
            coeffs = span_coefficients(_flat(value), basis, rng)
            table[(a, b)] = None if coeffs is None else {g: c for g, c in enumerate(coeffs) if c}
    return table


def is_dissipated(
    f: KFunction,
    Xf: VectorField,
    h: KFunction,
    Xh: VectorField,
    eta: Union[VectorForm, KContactStructure],
) -> bool:
    """X_h f == -R_f h, cross-checked against {h, f} == 0."""
    s = kcontact_structure(eta)
    _require_hamiltonian(f, Xf, s, "f")
    _require_hamiltonian(h, Xh, s, "h")
    Rf = reeb_derivation(f, s)
    direct = all(
        apply_field(Xh, fc) == -apply_field(Rf, hc) for fc, hc in zip(f, h)
    )
    via_bracket = kcontact_bracket(h, Xh, f, Xf, s, check=False).is_zero()
    if direct != via_bracket:
        raise InconsistentResult("dissipation test disagrees with the bracket")
    return direct


def _independent_fields(fields: Sequence[VectorField]) -> list[int]:
    """Indices of a maximal Q(x)-independent subfamily (pivot columns of the transpose)."""
    n = fields[0].chart.dim
    cols = [[f.coeffs[i] for f in fields] for i in range(n)]
    return list(echelon(cols).pivots)


@dataclass(frozen=True)
class NonintegrabilityReport:
    ok: bool
    rank_distribution: int
    rank_curvature: int
    annihilator: tuple[tuple[Expr, ...], ...]


def max_nonintegrable(D: Sequence[VectorField]) -> NonintegrabilityReport:
    """Generic nondegeneracy of rho(Y_i, Y_j) = zeta([Y_i, Y_j]) over an annihilating coframe zeta."""
    if not D:
        raise ValueError("empty distribution")
    chart = D[0].chart
    idx = _independent_fields(D)
    Y = [D[i] for i in idx]
    r = len(Y)
    if r == chart.dim:
        raise NoAnnihilator("distribution is the whole tangent bundle")
    zetas = nullspace([list(y.coeffs) for y in Y])
    brackets = {(i, j): lie_bracket(Y[i], Y[j]) for i in range(r) for j in range(r) if i < j}
    rows = []
    for z in zetas:
        for j in range(r):
            row = []
            for i in range(r):
                if i == j:
                    row.append(Expr(0))
                    continue
                br = brackets[(min(i, j), max(i, j))]
                val = sum((a * b for a, b in zip(z, br.coeffs)), Expr(0))
                row.append(val if i < j else -val)
            rows.append(row)
    rc = rank(rows)
    return NonintegrabilityReport(rc == r, r, rc, tuple(tuple(z) for z in zetas))


def build_kcontact(D: Sequence[VectorField], S: Sequence[VectorField]) -> VectorForm:
    """The R^k-valued form annihilating D with eta^a(S_b) = delta_ab."""
    if not D or not S:
        raise SpanFailure("need a nonempty distribution and at least one symmetry")
    chart = D[0].chart
    n = chart.dim
    idx = _independent_fields(D)
    Y = [D[i] for i in idx]
    r = len(Y)
    if r + len(S) != n or rank([list(f.coeffs) for f in list(Y) + list(S)]) != n:
        raise SpanFailure(f"rank {r} distribution and {len(S)} symmetries on a {n}-manifold")
    for a in range(len(S)):
        for b in range(a + 1, len(S)):
            if not lie_bracket(S[a], S[b]).is_zero():
                raise SymmetryFailure(f"symmetries {a + 1} and {b + 1} do not commute")
    base = [list(y.coeffs) for y in Y]
    for a, s in enumerate(S):
        for y in Y:
            br = lie_bracket(s, y)
            if not br.is_zero() and rank(base + [list(br.coeffs)]) != r:
                raise SymmetryFailure(f"symmetry {a + 1} does not preserve the distribution")
    report = max_nonintegrable(Y)
    if not report.ok:
        raise NotMaxNonintegrable(
            f"curvature rank {report.rank_curvature} < distribution rank {r}"
        )
    frame = list(Y) + list(S)
    Fm = [[frame[b].coeffs[i] for b in range(n)] for i in range(n)]
    eye = [[Expr(1 if i == j else 0) for j in range(n)] for i in range(n)]
    # U Fm = I  <=>  Fm^T U^T = I
    FmT = [[Fm[j][i] for j in range(n)] for i in range(n)]
    UT = solve(FmT, eye)
    comps = [DiffForm.one_form(chart, [UT[i][r + a] for i in range(n)]) for a in range(len(S))]
    eta = VectorForm(chart, comps)
    report = verify_kcontact(eta)
    if not report.ok:
        raise NotKContact(report.reason or "", report=report.as_dict())
    return eta


def combine_hamiltonians(
    fields: Sequence[VectorField], eta: Union[VectorForm, KContactStructure]
) -> tuple[Expr, list[KFunction]]:
    """h = sum_a <h_a, e^a> for k Hamiltonian fields X_1..X_k."""
    s = kcontact_structure(eta)
    if len(fields) != s.k:
        raise ValueError(f"need {s.k} fields, got {len(fields)}")
    hams = []
    h = Expr(0)
    for a, X in enumerate(fields):
        chk = hamiltonian_check(X, s)
        if not chk.ok:
            raise NotHamiltonianInput(f"field {a + 1} is not Hamiltonian")
        hams.append(chk.hamiltonian)
        h = h + chk.hamiltonian[a]
    if not verify_hdw(fields, h, s):
        raise InconsistentResult("combined Hamiltonian fails the field equations")
    return h, hams


def verify_hdw(fields: Sequence[VectorField], h: Expr, eta: Union[VectorForm, KContactStructure]) -> bool:
    """sum i_{X_a} d(eta^a) == dh - sum (R_a h) eta^a and sum i_{X_a} eta^a == -h."""
    s = kcontact_structure(eta)
    if len(fields) != s.k:
        raise ValueError(f"need {s.k} fields, got {len(fields)}")
    lhs = DiffForm.zero(s.chart, 1)
    total = Expr(0)
    for X, w, dw in zip(fields, s.eta.components, s.deta.components):
        lhs = lhs + interior(X, dw)
        total = total + interior(X, w).function_value()
    rhs = ext_deriv(DiffForm.function(s.chart, h))
    for R, w in zip(s.reeb, s.eta.components):
        c = apply_field(R, h)
        if not c.is_zero():
            rhs = rhs - w * c
    return lhs == rhs and total == -h


@dataclass(frozen=True)
class Presymplectic:
    omega: DiffForm
    function: Expr


def presymplectic_project(
    f: KFunction,
    Xf: VectorField,
    theta: Sequence,
    eta: Union[VectorForm, KContactStructure],
) -> Presymplectic:
    """omega_theta = sum theta_a d(eta^a) and f^theta = <f, theta> for a Reeb-invariant f."""
    s = kcontact_structure(eta)
    for b, R in enumerate(s.reeb):
        if not all(apply_field(R, c).is_zero() for c in f):
            raise NotProjectable(f"R_{b + 1} does not annihilate {f}")
    _require_hamiltonian(f, Xf, s, "f")
    omega = DiffForm.zero(s.chart, 2)
    for t, dw in zip(theta, s.deta.components):
        t = t if isinstance(t, Expr) else Expr(Fraction(t))
        if not t.is_zero():
            omega = omega + dw * t
    ftheta = pairing(f, theta)
    if interior(Xf, omega) != ext_deriv(DiffForm.function(s.chart, ftheta)):
        raise InconsistentResult("projected field is not Hamiltonian for omega_theta")
    return Presymplectic(omega, ftheta)


@dataclass(frozen=True)
class Extension:
    chart: Chart
    omega: DiffForm
    field: VectorField
    hamiltonian: Expr
    names: tuple[str, ...]


def _fresh(prefix: str, k: int, taken: Sequence[str]) -> tuple[str, ...]:
    p = prefix
    while any(f"{p}{a + 1}" in taken for a in range(k)):
        p = p + "_"
    return tuple(f"{p}{a + 1}" for a in range(k))


def _lift_form(w: DiffForm, chart: Chart) -> DiffForm:
    return DiffForm(chart, w.degree, w.terms)


def _lift_field(X: VectorField, chart: Chart) -> VectorField:
    return VectorField(chart, list(X.coeffs) + [0] * (chart.dim - X.chart.dim))


def presymplectic_extend(
    h: KFunction,
    Xh: VectorField,
    eta: Union[VectorForm, KContactStructure],
    prefix: str = "z",
) -> Extension:
    """Presymplectic form d(sum z_a eta^a) on M x R^k and the field preserving it."""
    s = kcontact_structure(eta)
    _require_hamiltonian(h, Xh, s, "h")
    names = _fresh(prefix, s.k, s.chart.vars)
    big = Chart(s.chart.vars + names)
    zs = [big.coordinate(n) for n in names]
    theta = DiffForm.zero(big, 1)
    for z, w in zip(zs, s.eta.components):
        theta = theta + _lift_form(w, big) * z
    omega = ext_deriv(theta)
    drift = []
    for b, R in enumerate(s.reeb):
        c = Expr(0)
        for a, z in enumerate(zs):
            rh = apply_field(R, h[a])
            if not rh.is_zero():
                c = c + z * rh
        drift.append(c)
    Y = VectorField(big, list(Xh.coeffs) + drift)
    H = sum((z * hc for z, hc in zip(zs, h)), Expr(0))
    if not lie_derivative(Y, omega).is_zero():
        raise InconsistentResult("extended field does not preserve the presymplectic form")
    if interior(Y, omega) != ext_deriv(DiffForm.function(big, H)):
        raise InconsistentResult("extended field is not Hamiltonian for the presymplectic form")
    return Extension(big, omega, Y, H, names)
