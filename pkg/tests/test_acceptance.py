"""One pass/fail line per acceptance criterion; run with ``pytest tests/test_acceptance.py -s``."""
import random
import time
from fractions import Fraction

import numpy as np
import pytest

import test_exterior
from kontact.corpus import load_example, load_raw, registry, run_example
from kontact.expr import Expr, parse
from kontact.exterior import VectorField, VectorForm, lie_bracket
from kontact.kcontact import (
    bracket_table,
    build_kcontact,
    hamiltonian_function,
    kcontact_structure,
    verify_kcontact,
)
from kontact.liesys import (
    bracket_closure,
    companion_system,
    diagonal_prolongation,
    dual_coframe,
    momentum_invariance,
    projectability_check,
    structure_constants,
)
from kontact.numeric import (
    Profile,
    TDepSystem,
    check_constant,
    evaluate_along,
    finite_differences,
    integrate,
    riccati_superposition_check,
)

SYMBOLIC_BUDGET = 60.0
NUMERIC_BUDGET = 10.0


def verdict(number: int, ok: bool, detail: str) -> None:
    print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


def names(prefix: str, n: int) -> list[str]:
    return [f"{prefix}{i}" for i in range(1, n + 1)]


def nonzero(table: dict) -> dict:
    return {k: v for k, v in table.items() if v}


def entries_match(report, prefix: str) -> bool:
    hits = [e for e in report.entries if e.id.startswith(prefix)]
    return bool(hits) and all(e.status == "match" for e in hits)


def criterion_1():
    doc = load_example("control")
    X = doc.field_list(names("X", 5))
    closure = structure_constants(X, names("X", 5))
    table_ok = closure.table() == {(0, 1): {2: 1}, (0, 2): {3: 2}, (1, 2): {4: 2}}
    built = build_kcontact(doc.field_list(["Y1", "Y2", "Y3"]), doc.field_list(["X4", "X5"]))
    build_ok = built[0] == doc.get_form("U4") and built[1] == doc.get_form("U5")
    eta = doc.get_kform()
    s = kcontact_structure(eta)
    reeb_ok = verify_kcontact(eta).ok and s.reeb == (
        VectorField.coordinate(doc.chart, "x4"), VectorField.coordinate(doc.chart, "x5"))
    hams_ok = all(hamiltonian_function(Xi, s) == doc.get_function(f"h{i + 1}") for i, Xi in enumerate(X))
    return table_ok and build_ok and reeb_ok and hams_ok, (
        f"table={table_ok} build={build_ok} verify+reeb={reeb_ok} five hamiltonians={hams_ok}")


def criterion_2():
    doc = load_example("frontwheel")
    eta = build_kcontact(doc.field_list(["Y1", "Y2"]), doc.field_list(["X3", "X4"]))
    forms_ok = eta[0] == doc.get_form("E3") and eta[1] == doc.get_form("E4")
    s = kcontact_structure(eta)
    X = doc.field_list(names("X", 4))
    hams = [hamiltonian_function(Xi, s) for Xi in X]
    table = nonzero(bracket_table(hams, X, s))
    table_ok = table == {(0, 1): {2: -1}, (0, 2): {3: -1}}
    system = TDepSystem(doc.field_list(["X1", "X2"]), ["b1", "b2"])
    quantity = parse("int_b2 - x2", doc.chart, ["int_b2"])
    drifts = []
    start = time.perf_counter()
    for b2 in (Profile.constant(0.0), Profile.constant(0.5), Profile.polynomial([0, 0, 1])):
        traj = integrate(system, {"b1": Profile.constant(1.0), "b2": b2}, [0.1, 0.2, -0.3, 0.4], (0.0, 1.0), 1e-3)
        drifts.append(check_constant(traj, quantity).max_drift)
    elapsed = time.perf_counter() - start
    drift_ok = max(drifts) < 1e-6 and elapsed < NUMERIC_BUDGET
    return forms_ok and table_ok and drift_ok, (
        f"eta rebuilt={forms_ok} table={table_ok} max drift={max(drifts):.1e} (<1e-6) in {elapsed:.2f}s")


def criterion_3():
    doc = load_example("isotropic")
    s = kcontact_structure(doc.get_kform())
    reeb_ok = s.reeb == tuple(doc.field_list(["Y2", "Y4"]))
    X = doc.field_list(names("X", 4))
    hams = [hamiltonian_function(Xi, s) for Xi in X]
    table_ok = nonzero(bracket_table(hams[:3], X[:3], s)) == {(0, 1): {0: -1}, (0, 2): {1: -2}, (1, 2): {2: -1}}
    invariant = hams[0][0] * hams[2][0] - hams[1][0] ** 2
    system = TDepSystem([X[0], X[2]], ["b1", "nu2"])
    start = time.perf_counter()
    traj = integrate(system, {"b1": Profile.constant(1.0), "nu2": Profile.constant(1.0)},
                     [1.0, 0.2, 0.3, 0.9], (0.0, 1.0), 1e-3)
    rep = check_constant(traj, invariant)
    elapsed = time.perf_counter() - start
    return reeb_ok and table_ok and rep.ok and elapsed < NUMERIC_BUDGET, (
        f"reeb=(Y2,Y4) {reeb_ok} table={table_ok} invariant drift={rep.max_drift:.1e} (<1e-6)")


def criterion_4():
    doc = load_example("jet")
    eta = doc.get_kform()
    verify_ok = verify_kcontact(eta).ok
    s = kcontact_structure(eta)
    X = doc.field_list(names("X", 5))
    hams = [hamiltonian_function(Xi, s) for Xi in X]
    table = nonzero(bracket_table(hams, X, s))
    want = {(0, 4): {0: Fraction(-1)}, (1, 4): {1: Fraction(-1, 4)}, (2, 3): {2: Fraction(-1)},
            (2, 4): {2: Fraction(-1, 2)}}
    table_ok = table == want
    rng = random.Random(0xC0FFEE)
    points = [{"q": Fraction(rng.randint(-9, 9), rng.randint(1, 5)), "z1": Fraction(rng.randint(-9, 9), rng.randint(1, 5)),
               "p1": Fraction(rng.randint(-9, 9), rng.randint(1, 5)), "z2": 0, "p2": 0} for _ in range(20)]
    rep = momentum_invariance(hams[2:], X[2:], s, [0, 1], points)
    mom_ok = rep.ok and rep.exact and rep.points == 20 and rep.max_reeb_residual == 0 and rep.max_tangency_residual == 0
    return verify_ok and table_ok and mom_ok, (
        f"verify={verify_ok} table={table_ok} momentum at {rep.points} points exact-zero={mom_ok}")


def criterion_5():
    doc = load_example("schwarz")
    X = doc.field_list(names("X", 6))
    closure = bracket_closure(X[:3], ["X1", "X2", "X3"])
    dim_ok = closure.dim == 6
    report = run_example("schwarz")
    table_ok = entries_match(report, "closure:[") and report.entry("closure:[X5,X6]").status == "match"
    mc_ok = sum(e.id.startswith("maurer-cartan:display:") and e.status == "match" for e in report.entries) == 6
    rows_ok = all(report.entry(f"hamiltonians:X{i}:e{a}").status == "match" for i in (2, 3, 4, 5) for a in (4, 5))
    defining_ok = all(report.entry(f"hamiltonians:X{i}:defining").status == "match" for i in (1, 6))
    compared = [e.id for e in report.entries if e.id.startswith(("hamiltonians:X1:e", "hamiltonians:X6:e"))]
    ok = dim_ok and table_ok and mc_ok and rows_ok and defining_ok and report.ok
    return ok, (f"closure dim 6={dim_ok} table={table_ok} six MC displays={mc_ok} h2..h5 rows={rows_ok} "
                f"h1,h6 defining={defining_ok} ({len(compared)} printed h1/h6 entries compared)")


def control_orders():
    doc = load_example("control")
    s = kcontact_structure(doc.get_kform())
    X = doc.field_list(names("X", 5))
    hams = [hamiltonian_function(Xi, s) for Xi in X]
    orders = [companion_system(hams, X, s, theta).nilpotency for theta in ([1, 0], [0, 1])]
    system = TDepSystem(X[:2], ["b1", "b2"])
    worst = 0.0
    for b1, b2 in ((1.0, 0.5), (-0.7, 1.3)):
        traj = integrate(system, {"b1": Profile.constant(b1), "b2": Profile.constant(b2)},
                         [0.3, -0.2, 0.5, 0.1, -0.4], (0.0, 1.0), 1e-2)
        for h in hams:
            for comp in h:
                fd = finite_differences(evaluate_along(traj, comp), traj.step, 3)
                worst = max(worst, float(np.max(np.abs(fd))))
    return orders, worst


def criterion_6():
    reports = {name: run_example(name) for name in ("brockett3", "gbrockett")}
    results = {
        name: entries_match(rep, "closure:") and rep.ok
        and rep.entry("build:kcontact").status == "match" and rep.entry("kcontact:verify").status == "match"
        for name, rep in reports.items()
    }
    b3 = reports["brockett3"]
    deta_ok = b3.entry("differential:deta^3").status == "match"
    true_orders = entries_match(b3, "third-differences") and entries_match(b3, "fourth-differences") \
        and entries_match(b3, "companion-e3")
    orders, worst = control_orders()
    nil_ok = all(o is not None and o <= 3 for o in orders)
    ok = all(results.values()) and deta_ok and nil_ok and worst < 1e-4 and true_orders
    return ok, (f"closures+forms {results} d eta_3b={deta_ok} control companion orders={orders} "
                f"max third difference={worst:.1e} (<1e-4) brockett3 true orders={true_orders}")


def criterion_7():
    doc = load_example("jet")
    base_names = names("X", 5)
    X = doc.field_list(base_names)
    p = diagonal_prolongation(X, doc.get_kform(), 1)
    rep = verify_kcontact(p.eta)
    shape_ok = rep.ok and rep.k == 4 and p.chart.dim == 10
    same = structure_constants(list(p.fields), base_names).constants == structure_constants(X, base_names).constants
    return shape_ok and same, f"4-contact on 10-dim chart={shape_ok} structure constants preserved={same}"


def criterion_8():
    prof = {"b1": Profile.constant(1.0), "b2": Profile.constant(0.0), "b3": Profile.constant(1.0)}
    rep = riccati_superposition_check(prof, [0.0, 0.3, -0.5], 0.5, (0.0, 1.0), 1e-3)
    return rep.max_deviation < 1e-6, f"fourth solution max deviation={rep.max_deviation:.1e} (<1e-6)"


def corpus_kforms(name: str) -> list[VectorForm]:
    """Every k-form an example registers, rebuilt independently of the corpus runner."""
    raw = load_raw(name)
    doc = load_example(name)
    out = [doc.get_kform(k) for k in raw.get("kforms", {})]
    coframes = {}
    for c in raw["checks"]:
        if c["kind"] == "build":
            out.append(build_kcontact(doc.field_list(c["distribution"]), doc.field_list(c["symmetries"])))
        elif c["kind"] == "coframe" and "store" in c:
            for n, w in zip(c["store"], dual_coframe(doc.field_list(c["frame"]))):
                coframes[n] = w
        elif c["kind"] == "kform":
            out.append(VectorForm(doc.chart, [coframes[n] if n in coframes else doc.get_form(n) for n in c["components"]]))
        elif c["kind"] == "prolongation":
            out.append(diagonal_prolongation(doc.field_list(c["fields"]), doc.get_kform(), c["ell"]).eta)
    return out


def reeb_sound(eta: VectorForm) -> bool:
    s = kcontact_structure(eta)
    dual = all(eta[b](R) == Expr(1 if a == b else 0) for a, R in enumerate(s.reeb) for b in range(s.k))
    commute = all(lie_bracket(s.reeb[a], s.reeb[b]).is_zero() for a in range(s.k) for b in range(a + 1, s.k))
    return dual and commute


def criterion_9():
    for prop in (test_exterior.test_jacobi_identity, test_exterior.test_d_squared_vanishes,
                 test_exterior.test_cartan_formula):
        assert prop._hypothesis_internal_use_settings.max_examples >= 200
        prop()
    checked = 0
    for name in registry():
        for eta in corpus_kforms(name):
            assert reeb_sound(eta), name
            checked += 1
    control = load_example("control")
    X = control.field_list(names("X", 5))
    proj_c = projectability_check(X, control.get_kform()).ok
    c3 = load_example("control3")
    eta3 = build_kcontact(c3.field_list(["Y1", "Y2"]), c3.field_list(["X3", "X4", "X5"]))
    proj_c3 = projectability_check(c3.field_list(names("X", 5)), eta3).ok
    ok = checked >= 9 and proj_c and not proj_c3
    return ok, (f"Jacobi/d^2=0/Cartan properties passed (200 cases each); {checked} corpus Reeb sets dual and "
                f"commuting; projectable eta_c={proj_c} eta'_c={proj_c3}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("number", range(1, len(CRITERIA) + 1))
def test_criterion(number):
    start = time.perf_counter()
    ok, detail = CRITERIA[number - 1]()
    elapsed = time.perf_counter() - start
    verdict(number, ok and elapsed < SYMBOLIC_BUDGET, f"{detail} [{elapsed:.1f}s]")
