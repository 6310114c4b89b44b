"""Check handlers for corpus documents.

Each handler receives the run context and one check descriptor and calls
``ctx.record`` once per comparable entry.  Entry ids are ``<check id>`` or
``<check id>:<detail>``; the print-suspect list in a data file refers to them.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from ..document import Document, parse_field, parse_form
from ..errors import InputError
from ..exterior import (
    DiffForm,
    KFunction,
    VectorField,
    VectorForm,
    apply_field,
    ext_deriv,
    interior,
    lie_bracket,
    pairing,
    wedge,
)
from ..expr import Expr, parse
from ..kcontact import (
    KContactStructure,
    bracket_table,
    build_kcontact,
    combine_hamiltonians,
    hamiltonian_check,
    hamiltonian_function,
    is_dissipated,
    kcontact_structure,
    presymplectic_extend,
    presymplectic_project,
    reeb_derivation,
    verify_kcontact,
)
from ..liesys import (
    bracket_closure,
    companion_system,
    diagonal_prolongation,
    dual_coframe,
    is_locally_automorphic,
    maurer_cartan_check,
    momentum_invariance,
    nilpotency_index,
    projectability_check,
    structure_constants,
    time_derivative,
)
from ..linalg import span_coefficients
from .. import numeric


class Context:
    """Mutable state of one document run: named objects plus recorded entries."""

    def __init__(self, doc: Document, seed: int, record: Callable[[str, bool, str], None]):
        self.doc = doc
        self.seed = seed
        self.record = record
        self.fields: dict[str, VectorField] = dict(doc.fields)
        self.forms: dict[str, DiffForm] = dict(doc.forms)
        self.kforms: dict[str, VectorForm] = dict(doc.kforms)
        self.labels: dict[str, tuple[str, ...]] = dict(doc.kform_labels)
        self._structures: dict[str, KContactStructure] = {}
        self._hams: dict[tuple[str, str], KFunction] = {}

    @property
    def chart(self):
        return self.doc.chart

    def rng(self) -> random.Random:
        return random.Random(self.seed)

    def field(self, spec) -> VectorField:
        if isinstance(spec, str):
            if spec not in self.fields:
                raise InputError(f"unknown field {spec!r}")
            return self.fields[spec]
        return parse_field(self.chart, self.doc.constants, spec)

    def form(self, spec) -> DiffForm:
        if isinstance(spec, str):
            if spec not in self.forms:
                raise InputError(f"unknown form {spec!r}")
            return self.forms[spec]
        return parse_form(self.chart, self.doc.constants, spec)

    def expr(self, text) -> Expr:
        return parse(str(text), self.chart, self.doc.constants)

    def kfunction(self, spec) -> KFunction:
        if isinstance(spec, str):
            value = self.doc.get_function(spec)
            if not isinstance(value, KFunction):
                raise InputError(f"{spec} is not a k-function")
            return value
        return KFunction([self.expr(t) for t in spec])

    def structure(self, name: str) -> KContactStructure:
        if name not in self._structures:
            if name not in self.kforms:
                raise InputError(f"unknown k-form {name!r}")
            self._structures[name] = kcontact_structure(self.kforms[name])
        return self._structures[name]

    def labels_of(self, name: str) -> tuple[str, ...]:
        return self.labels.get(name) or tuple(str(a + 1) for a in range(self.kforms[name].k))

    def hamiltonian(self, eta: str, field: str) -> KFunction:
        key = (eta, field)
        if key not in self._hams:
            self._hams[key] = hamiltonian_function(self.field(field), self.structure(eta))
        return self._hams[key]


def _q(text) -> Fraction:
    return Fraction(str(text))


def _pair(key: str) -> tuple[str, str]:
    parts = [p.strip() for p in key.split(",")]
    if len(parts) != 2:
        raise InputError(f"bad pair key {key!r}")
    return parts[0], parts[1]


def _fmt_combo(row: Mapping[str, Fraction]) -> str:
    if not row:
        return "0"
    return " + ".join(f"{c}*{n}" for n, c in row.items())


def _compare_table(ctx: Context, cid: str, names: Sequence[str],
                   computed: Mapping[tuple[int, int], Optional[Mapping[int, Fraction]]],
                   expected: Mapping[str, Mapping[str, str]], bracket: str = "[{},{}]") -> None:
    want: dict[tuple[int, int], dict[str, Fraction]] = {}
    index = {n: i for i, n in enumerate(names)}
    for key, row in expected.items():
        a, b = _pair(key)
        if a not in index or b not in index:
            raise InputError(f"{cid}: table key {key!r} uses unknown names")
        i, j = index[a], index[b]
        parsed = {n: _q(c) for n, c in row.items() if _q(c)}
        if i > j:
            i, j = j, i
            parsed = {n: -c for n, c in parsed.items()}
        want[(i, j)] = parsed
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            got = computed.get((i, j), {})
            if got is None:
                ok, text = False, "outside the span"
            else:
                got_named = {names[g]: c for g, c in sorted(got.items())}
                exp = want.get((i, j), {})
                ok = got_named == exp
                text = _fmt_combo(got_named)
            exp_text = _fmt_combo(want.get((i, j), {}))
            if got == {} and (i, j) not in want:
                continue
            label = bracket.format(names[i], names[j])
            ctx.record(f"{cid}:{label}", ok, f"computed {text}, expected {exp_text}")


# ---- Lie algebra checks ------------------------------------------------------


def check_closure(ctx: Context, c: dict) -> None:
    """Closure of generators spans the named basis; the basis has the stated table."""
    cid = c["id"]
    basis_names = list(c["basis"])
    basis = [ctx.field(n) for n in basis_names]
    if "generators" in c:
        gens = [ctx.field(n) for n in c["generators"]]
        closure = bracket_closure(gens, list(c["generators"]), seed=ctx.seed)
        dim = c.get("dim", len(basis_names))
        ctx.record(f"{cid}:dim", closure.dim == dim, f"closure dimension {closure.dim}, expected {dim}")
        rng = ctx.rng()
        vecs = [list(x.coeffs) for x in closure.basis]
        outside = [n for n, f in zip(basis_names, basis) if span_coefficients(list(f.coeffs), vecs, rng) is None]
        ctx.record(f"{cid}:span", not outside,
                   "basis lies in the closure" if not outside else f"not in the closure: {outside}")
    _structure(ctx, cid, basis_names, basis, c)


def check_structure(ctx: Context, c: dict) -> None:
    names = list(c["fields"])
    _structure(ctx, c["id"], names, [ctx.field(n) for n in names], c)


def _structure(ctx: Context, cid: str, names, fields, c: dict) -> None:
    if "table" not in c:
        return
    lie = structure_constants(fields, names, seed=ctx.seed)
    ctx.record(f"{cid}:jacobi", lie.jacobi_ok(), "Jacobi identity on the structure constants")
    _compare_table(ctx, cid, names, lie.table(), c["table"])


def check_automorphic(ctx: Context, c: dict) -> None:
    got = is_locally_automorphic([ctx.field(n) for n in c["fields"]])
    want = bool(c.get("expected", True))
    ctx.record(c["id"], got == want, f"locally automorphic: {got}")


def check_field_equal(ctx: Context, c: dict) -> None:
    for left, right in c["pairs"]:
        a, b = ctx.field(left), ctx.field(right)
        diff = a - b
        ctx.record(f"{c['id']}:{left}", diff.is_zero(),
                   "identical" if diff.is_zero() else f"{left} - {right} = {diff}")


def check_commute(ctx: Context, c: dict) -> None:
    rights = list(c["right"])
    for left in c["left"]:
        L = ctx.field(left)
        bad = [r for r in rights if not lie_bracket(L, ctx.field(r)).is_zero()]
        ctx.record(f"{c['id']}:{left}", not bad,
                   "commutes with all" if not bad else f"does not commute with {', '.join(bad)}")


# ---- forms ---------------------------------------------------------------------


def check_coframe(ctx: Context, c: dict) -> None:
    frame = [ctx.field(n) for n in c["frame"]]
    forms = dual_coframe(frame)
    for name, w in zip(c.get("store", []), forms):
        ctx.forms[name] = w
    for i, want in enumerate(c.get("expected", [])):
        if want is None:
            continue
        diff = forms[i] - ctx.form(want)
        label = want if isinstance(want, str) else str(i + 1)
        ctx.record(f"{c['id']}:{label}", diff.is_zero(),
                   "matches" if diff.is_zero() else f"computed {forms[i]}")


def _wedge_terms(ctx: Context, terms: Mapping[str, str]) -> DiffForm:
    out: Optional[DiffForm] = None
    for key, coeff in terms.items():
        parts = [p.strip() for p in key.split("^")]
        w = ctx.form(parts[0])
        for p in parts[1:]:
            w = wedge(w, ctx.form(p))
        w = w * ctx.expr(coeff)
        out = w if out is None else out + w
    return out if out is not None else DiffForm.zero(ctx.chart, 2)


def check_maurer_cartan(ctx: Context, c: dict) -> None:
    cid = c["id"]
    names = list(c["coframe"])
    coframe = [ctx.form(n) for n in names]
    lie = structure_constants([ctx.field(n) for n in c["frame"]], list(c["frame"]), seed=ctx.seed)
    mc = maurer_cartan_check(coframe, lie)
    for n, r in zip(names, mc.residuals):
        ctx.record(f"{cid}:identity:{n}", r.is_zero(), "holds" if r.is_zero() else f"residual {r}")
    for n, terms in c.get("displays", {}).items():
        lhs = ext_deriv(ctx.form(n))
        rhs = _wedge_terms(ctx, terms)
        diff = lhs - rhs
        ctx.record(f"{cid}:display:{n}", diff.is_zero(),
                   "matches" if diff.is_zero() else f"d{n} - display = {diff}")


def check_kform(ctx: Context, c: dict) -> None:
    name = c.get("store", "eta")
    comps = [ctx.form(n) for n in c["components"]]
    ctx.kforms[name] = VectorForm(ctx.chart, comps)
    ctx.labels[name] = tuple(str(x) for x in c.get("labels", range(1, len(comps) + 1)))
    ctx.record(c["id"], True, f"registered {name} with {len(comps)} components")


def check_build(ctx: Context, c: dict) -> None:
    cid = c["id"]
    D = [ctx.field(n) for n in c["distribution"]]
    S = [ctx.field(n) for n in c["symmetries"]]
    eta = build_kcontact(D, S)
    name = c.get("store", "eta")
    ctx.kforms[name] = eta
    ctx.labels[name] = tuple(str(x) for x in c.get("labels", range(1, eta.k + 1)))
    ctx.record(f"{cid}:kcontact", True, f"{eta.k}-contact form on a {ctx.chart.dim}-manifold")
    for label, w in zip(ctx.labels[name], eta.components):
        ctx.forms[f"{name}.{label}"] = w
    for label, want in c.get("expected", {}).items():
        got = ctx.forms[f"{name}.{label}"]
        diff = got - ctx.form(want)
        ctx.record(f"{cid}:{name}.{label}", diff.is_zero(),
                   "matches" if diff.is_zero() else f"computed {got}")


def check_kcontact(ctx: Context, c: dict) -> None:
    cid = c["id"]
    name = c.get("eta", "eta")
    eta = ctx.kforms[name]
    report = verify_kcontact(eta)
    want_k = c.get("k")
    ok = report.ok and (want_k is None or report.k == want_k)
    ctx.record(f"{cid}:verify", ok,
               f"ok={report.ok} k={report.k} dim={report.dim} reason={report.reason}")
    if not report.ok:
        return
    s = ctx.structure(name)
    for i, want in enumerate(c.get("reeb", [])):
        diff = s.reeb[i] - ctx.field(want)
        label = want if isinstance(want, str) else str(i + 1)
        ctx.record(f"{cid}:reeb:{label}", diff.is_zero(),
                   "matches" if diff.is_zero() else f"computed {s.reeb[i]}")
    dual = all(
        interior(R, eta[b]).function_value() == Expr(1 if a == b else 0)
        for a, R in enumerate(s.reeb) for b in range(s.k)
    )
    flat = all(interior(R, dw).is_zero() for R in s.reeb for dw in s.deta)
    commute = all(
        lie_bracket(s.reeb[a], s.reeb[b]).is_zero() for a in range(s.k) for b in range(a + 1, s.k)
    )
    ctx.record(f"{cid}:reeb-duality", dual and flat and commute,
               f"duality={dual} kernel={flat} commuting={commute}")
    if "printed_k" in c:
        ctx.record(f"{cid}:label", c["printed_k"] == report.k,
                   f"computed k={report.k}, printed k={c['printed_k']}")


def check_differential(ctx: Context, c: dict) -> None:
    name = c.get("eta", "eta")
    eta = ctx.kforms[name]
    labels = ctx.labels_of(name)
    deta = ext_deriv(eta)
    for label, want in c["expected"].items():
        got = deta[labels.index(str(label))]
        diff = got - ctx.form(want)
        ctx.record(f"{c['id']}:d{name}^{label}", diff.is_zero(),
                   "matches" if diff.is_zero() else f"computed {got}")


# ---- Hamiltonian data ------------------------------------------------------------


def _compare_kfunction(ctx: Context, entry: str, labels, got: KFunction, want: KFunction) -> None:
    if want.k != got.k:
        raise InputError(f"{entry}: expected {want.k} components, form has {got.k}")
    for label, g, w in zip(labels, got, want):
        same = g == w
        ctx.record(f"{entry}:e{label}", same, "matches" if same else f"computed {g}, printed {w}")


def check_hamiltonians(ctx: Context, c: dict) -> None:
    """Defining equations always; printed components individually."""
    cid = c["id"]
    name = c.get("eta", "eta")
    s = ctx.structure(name)
    labels = ctx.labels_of(name)
    expected = c.get("expected", {})
    names = list(c.get("fields", expected.keys()))
    for X in names:
        chk = hamiltonian_check(ctx.field(X), s)
        ctx.record(f"{cid}:{X}:defining", chk.ok,
                   "residual vanishes" if chk.ok else f"residual {chk.residual}")
        if X in expected:
            _compare_kfunction(ctx, f"{cid}:{X}", labels, chk.hamiltonian, ctx.kfunction(expected[X]))


def check_brackets(ctx: Context, c: dict) -> None:
    name = c.get("eta", "eta")
    fields = list(c["fields"])
    labels = list(c.get("names", [f"h{i + 1}" for i in range(len(fields))]))
    hams = [ctx.hamiltonian(name, X) for X in fields]
    table = bracket_table(hams, [ctx.field(X) for X in fields], ctx.structure(name), seed=ctx.seed)
    _compare_table(ctx, c["id"], labels, table, c["table"], bracket="{{{},{}}}")


def check_hdw(ctx: Context, c: dict) -> None:
    """k Hamiltonian fields combine into a solution of the field equations."""
    name = c.get("eta", "eta")
    h, _ = combine_hamiltonians([ctx.field(X) for X in c["fields"]], ctx.structure(name))
    ctx.record(c["id"], True, f"combined Hamiltonian {h}")


def check_projectable(ctx: Context, c: dict) -> None:
    name = c.get("eta", "eta")
    res = projectability_check([ctx.field(X) for X in c["fields"]], ctx.structure(name))
    want = bool(c["expected"])
    ctx.record(c["id"], res.ok == want, f"projectable: {res.ok}")


def check_dissipated(ctx: Context, c: dict) -> None:
    name = c.get("eta", "eta")
    s = ctx.structure(name)
    want = bool(c.get("expected", True))
    for f, h in c["pairs"]:
        got = is_dissipated(ctx.hamiltonian(name, f), ctx.field(f), ctx.hamiltonian(name, h), ctx.field(h), s)
        ctx.record(f"{c['id']}:{f}:{h}", got == want, f"h_{f} dissipated along X_{h}: {got}")


def check_field_action(ctx: Context, c: dict) -> None:
    name = c.get("eta", "eta")
    X = ctx.field(c["field"])
    h = ctx.hamiltonian(name, c["of"])
    got = KFunction([apply_field(X, comp) for comp in h])
    want = ctx.kfunction(c["expected"])
    same = got == want
    ctx.record(c["id"], same, "matches" if same else f"computed {got}, printed {want}")


def check_reeb_derivation(ctx: Context, c: dict) -> None:
    name = c.get("eta", "eta")
    s = ctx.structure(name)
    for X, want in c["expected"].items():
        got = reeb_derivation(ctx.hamiltonian(name, X), s)
        diff = got - ctx.field(want)
        ctx.record(f"{c['id']}:{X}", diff.is_zero(), "matches" if diff.is_zero() else f"computed {got}")


def check_presymplectic(ctx: Context, c: dict) -> None:
    name = c.get("eta", "eta")
    s = ctx.structure(name)
    theta = [_q(t) for t in c["theta"]]
    for X in c["fields"]:
        h = ctx.hamiltonian(name, X)
        proj = presymplectic_project(h, ctx.field(X), theta, s)
        ctx.record(f"{c['id']}:{X}", True, f"<h, theta> = {proj.function}")
        ext = presymplectic_extend(h, ctx.field(X), s)
        ctx.record(f"{c['id']}:extend:{X}", True, f"extended Hamiltonian {ext.hamiltonian}")


def check_pullback(ctx: Context, c: dict) -> None:
    subs = {k: ctx.expr(v) for k, v in c["substitution"].items()}
    for src, target in c["expected"].items():
        got = KFunction([e.subs(subs) for e in ctx.kfunction(src)])
        want = ctx.kfunction(target)
        same = got == want
        ctx.record(f"{c['id']}:{src}", same, "matches" if same else f"pullback {got}, expected {want}")


def check_momentum(ctx: Context, c: dict) -> None:
    cid = c["id"]
    name = c.get("eta", "eta")
    s = ctx.structure(name)
    fields = list(c["fields"])
    theta = [_q(t) for t in c["theta"]]
    hams = [ctx.hamiltonian(name, X) for X in fields]
    for X, want in c.get("expected", {}).items():
        got = pairing(ctx.hamiltonian(name, X), theta)
        same = got == ctx.expr(want)
        ctx.record(f"{cid}:J:{X}", same, "matches" if same else f"computed {got}")
    fixed = {k: _q(v) for k, v in c["zero_set"].items()}
    free = [v for v in ctx.chart.vars if v not in fixed]
    rng = ctx.rng()
    points = []
    for _ in range(int(c.get("samples", 20))):
        pt = {v: Fraction(rng.randint(-7, 7)) for v in free}
        pt.update(fixed)
        points.append(pt)
    rep = momentum_invariance(hams, [ctx.field(X) for X in fields], s, theta, points)
    ctx.record(f"{cid}:invariance", rep.ok and rep.exact,
               f"{rep.points} exact points, max Reeb residual {rep.max_reeb_residual}, "
               f"max tangency residual {rep.max_tangency_residual}")


def check_prolongation(ctx: Context, c: dict) -> None:
    cid = c["id"]
    name = c.get("eta", "eta")
    names = list(c["fields"])
    fields = [ctx.field(n) for n in names]
    ell = int(c.get("ell", 1))
    pro = diagonal_prolongation(fields, ctx.kforms[name], ell)
    report = verify_kcontact(pro.eta)
    want_k, want_dim = c.get("k"), c.get("dim")
    ok = report.ok and (want_k is None or report.k == want_k) and (want_dim is None or report.dim == want_dim)
    ctx.record(f"{cid}:kcontact", ok, f"ok={report.ok} k={report.k} dim={report.dim}")
    base = structure_constants(fields, names, seed=ctx.seed)
    big = structure_constants(list(pro.fields), names, seed=ctx.seed)
    ctx.record(f"{cid}:constants", base.constants == big.constants, "structure constants preserved")
    if not report.ok:
        return
    s_base = ctx.structure(name)
    s_big = kcontact_structure(pro.eta)
    hb = [hamiltonian_function(X, s_base) for X in fields]
    hp = [hamiltonian_function(X, s_big) for X in pro.fields]
    ham_ok = all(hamiltonian_check(X, s_big).ok for X in pro.fields)
    ctx.record(f"{cid}:hamiltonian", ham_ok, "prolonged fields are Hamiltonian")
    t_base = bracket_table(hb, fields, s_base, seed=ctx.seed)
    t_big = bracket_table(hp, list(pro.fields), s_big, seed=ctx.seed)
    ctx.record(f"{cid}:brackets", t_base == t_big, "bracket table preserved")


# ---- constants of motion ------------------------------------------------------------


def _quantities(ctx: Context, c: dict) -> list[tuple[str, Expr]]:
    out = []
    name = c.get("eta", "eta")
    labels = ctx.labels_of(name) if c.get("of") else ()
    for X in c.get("of", []):
        for label, comp in zip(labels, ctx.hamiltonian(name, X)):
            if not comp.is_zero() and not comp.is_constant():
                out.append((f"{X}:e{label}", comp))
    for key, text in c.get("quantities", {}).items():
        out.append((key, ctx.expr(text)))
    return out


def check_time_derivative(ctx: Context, c: dict) -> None:
    fields = [ctx.field(n) for n in c["fields"]]
    coeffs = list(c.get("coefficients", [f"b{i + 1}" for i in range(len(fields))]))
    order = int(c["order"])
    for key, I in _quantities(ctx, c):
        d = I
        first_zero = None
        for m in range(1, order + 1):
            d = time_derivative(d, fields, coeffs)
            if d.is_zero():
                first_zero = m
                break
        ok = first_zero is not None
        ctx.record(f"{c['id']}:{key}", ok,
                   f"vanishes at order {first_zero}" if ok else f"order-{order} derivative {d}")


def check_companion(ctx: Context, c: dict) -> None:
    cid = c["id"]
    name = c.get("eta", "eta")
    s = ctx.structure(name)
    names = list(c["fields"])
    active = set(c.get("active", names))
    coeffs = [f"b_{n}" for n in names]
    theta = [_q(t) for t in c["theta"]]
    hams = [ctx.hamiltonian(name, X) for X in names]
    comp = companion_system(hams, [ctx.field(X) for X in names], s, theta, coeffs, seed=ctx.seed)
    zero = {f"b_{n}": 0 for n in names if n not in active}
    M = [[e.subs(zero) for e in row] for row in comp.matrix]
    order = nilpotency_index(M, len(M) + 1)
    bound = int(c["max_order"])
    ctx.record(f"{cid}:nilpotency", order is not None and order <= bound,
               f"nilpotent of order {order} on {len(comp.kept)} projections (bound {bound})")


def _profiles(c: dict) -> list[dict[str, numeric.Profile]]:
    raw = c["profiles"] if "profiles" in c else [c["profile"]]
    return [{k: numeric.Profile.from_json(v) for k, v in p.items()} for p in raw]


def _numeric_chart_symbols(ctx: Context, coeffs) -> tuple[str, ...]:
    return numeric.trajectory_symbols(coeffs, ctx.doc.constants)


def check_conserved(ctx: Context, c: dict) -> None:
    fields = [ctx.field(n) for n in c["fields"]]
    coeffs = list(c["coefficients"])
    system = numeric.TDepSystem(fields, coeffs)
    quantity = parse(str(c["quantity"]), ctx.chart, _numeric_chart_symbols(ctx, coeffs))
    tol = float(c.get("tol", numeric.CONSERVATION_TOL))
    for i, prof in enumerate(_profiles(c)):
        traj = numeric.integrate(system, prof, c["x0"], tuple(c["t_span"]), float(c["step"]))
        rep = numeric.check_constant(traj, quantity, tol)
        ctx.record(f"{c['id']}:{i}", rep.ok, f"max drift {rep.max_drift:.3e} (tol {tol:g})")


def check_superposition(ctx: Context, c: dict) -> None:
    prof = _profiles(c)[0]
    tol = float(c.get("tol", numeric.CONSERVATION_TOL))
    rep = numeric.riccati_superposition_check(
        prof, c["seeds"], float(c["k"]), tuple(c.get("t_span", (0.0, 1.0))), float(c.get("step", 1e-3)), tol
    )
    ctx.record(c["id"], rep.ok, f"max deviation {rep.max_deviation:.3e} (tol {tol:g})")


def check_third_differences(ctx: Context, c: dict) -> None:
    fields = [ctx.field(n) for n in c["fields"]]
    coeffs = list(c.get("coefficients", [f"b{i + 1}" for i in range(len(fields))]))
    system = numeric.TDepSystem(fields, coeffs)
    tol = float(c.get("tol", 1e-4))
    order = int(c.get("order", 3))
    quantities = _quantities(ctx, c)
    for i, prof in enumerate(_profiles(c)):
        traj = numeric.integrate(system, prof, c["x0"], tuple(c["t_span"]), float(c["step"]))
        worst = 0.0
        for _, I in quantities:
            vals = numeric.evaluate_along(traj, I)
            fd = numeric.finite_differences(vals, traj.step, order)
            worst = max(worst, float(np.max(np.abs(fd))) if fd.size else 0.0)
        ctx.record(f"{c['id']}:{i}", worst < tol,
                   f"max |order-{order} difference| {worst:.3e} over {len(quantities)} quantities (tol {tol:g})")


HANDLERS: dict[str, Callable[[Context, dict], None]] = {
    "closure": check_closure,
    "structure": check_structure,
    "automorphic": check_automorphic,
    "field_equal": check_field_equal,
    "commute": check_commute,
    "coframe": check_coframe,
    "maurer_cartan": check_maurer_cartan,
    "kform": check_kform,
    "build": check_build,
    "kcontact": check_kcontact,
    "differential": check_differential,
    "hamiltonians": check_hamiltonians,
    "brackets": check_brackets,
    "hdw": check_hdw,
    "projectable": check_projectable,
    "dissipated": check_dissipated,
    "field_action": check_field_action,
    "reeb_derivation": check_reeb_derivation,
    "presymplectic": check_presymplectic,
    "pullback": check_pullback,
    "momentum": check_momentum,
    "prolongation": check_prolongation,
    "time_derivative": check_time_derivative,
    "companion": check_companion,
    "conserved": check_conserved,
    "superposition": check_superposition,
    "third_differences": check_third_differences,
}
