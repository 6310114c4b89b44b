"""``kontact`` command-line front end.

Every subcommand reads an input document (see docs/format.md), runs one
operation and prints a report: ``key: value`` lines by default, JSON with
``--json``.  Parameters missing from the command line are taken from the
first document task with the matching ``op``.

Exit codes: 0 all checks passed, 1 a check failed (the report is still
printed), 2 bad input or usage (one line on stderr).
"""

from __future__ import annotations

import argparse
import json
import os
import random
import re
import sys
from fractions import Fraction
from typing import Any, Optional, Sequence

from . import errors
from .corpus import registry, resolve, run_all
from .document import Document, load_document, task
from .errors import InputError, KontactError
from .expr import parse
from .exterior import DiffForm, KFunction, VectorField, VectorForm
from .kcontact import (
    InconsistentResult,
    bracket_table,
    build_kcontact,
    hamiltonian_check,
    kcontact_structure,
    verify_kcontact,
)
from .linalg import DEFAULT_SEED
from .liesys import bracket_closure, companion_system, diagonal_prolongation, structure_constants
from .numeric import (
    CONSERVATION_TOL,
    FD_STEP,
    FD_TOL,
    Profile,
    TDepSystem,
    check_constant,
    fd_validate,
    integrate,
    trajectory_symbols,
)

# mathematical outcomes: reported with exit 1, not treated as bad input
CHECK_FAILURES = (
    errors.NotKContact,
    errors.SymmetryFailure,
    errors.SpanFailure,
    errors.NotMaxNonintegrable,
    errors.NotHamiltonianInput,
    errors.NotClosed,
    errors.LambdaNotConstant,
    errors.DependentProjections,
    errors.NotProjectable,
    errors.PoleEncountered,
    errors.DegenerateSeeds,
    errors.RankComputationOverflow,
    InconsistentResult,
)

_COEF_FLAG = re.compile(r"^--(b\d+)(?:=(.*))?$")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


# ---- formatting --------------------------------------------------------------


def _q(c: Fraction) -> str:
    return str(c)


def _field_dict(X: VectorField) -> dict[str, str]:
    return {f"d/d{v}": str(c) for v, c in zip(X.chart.vars, X.coeffs) if not c.is_zero()}


def _form_dict(w: DiffForm) -> dict[str, str]:
    names = w.chart.vars
    return {"^".join(f"d{names[i]}" for i in idx) or "1": str(c) for idx, c in w.terms}


def _kfunction_dict(h: KFunction, labels: Sequence[str]) -> dict[str, str]:
    return {f"e{lab}": str(c) for lab, c in zip(labels, h.components)}


def _combo(row: dict[int, Fraction], labels: Sequence[str]) -> dict[str, str]:
    return {labels[g]: _q(c) for g, c in sorted(row.items())}


def _render_text(obj: Any, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.extend(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar_text(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}-")
                lines.extend(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar_text(v)}")
    else:
        lines.append(f"{pad}{_scalar_text(obj)}")
    return lines


def _scalar_text(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "-"
    if isinstance(v, (dict, list)):
        return "{}" if isinstance(v, dict) else "[]"
    return str(v)


def emit(report: dict, as_json: bool, out=None) -> None:
    out = out or sys.stdout
    if as_json:
        out.write(json.dumps(report, indent=2, sort_keys=False) + "\n")
    else:
        out.write("\n".join(_render_text(report)) + "\n")


# ---- argument helpers ----------------------------------------------------------


def _split(value) -> Optional[list[str]]:
    if value is None:
        return None
    if isinstance(value, str):
        return [p.strip() for p in value.split(",") if p.strip()]
    return [str(p) for p in value]


def _pick(cli_value, params: dict, key: str, default=None):
    if cli_value is not None:
        return cli_value
    return params.get(key, default)


def _field_names(doc: Document, cli_value, params: dict, key: str = "fields") -> list[str]:
    names = _split(_pick(cli_value, params, key))
    if names is None:
        names = [n for n in doc.fields if re.fullmatch(r"X\d+", n)] or list(doc.fields)
    if not names:
        raise InputError("no vector fields given")
    return names


def _kform(doc: Document, name: Optional[str], params: dict) -> tuple[str, VectorForm]:
    name = name or params.get("kform", "eta")
    eta = doc.get_kform(name)
    for key, value in doc.kforms.items():
        if value is eta:
            return key, eta
    return name, eta


def _labels(doc: Document, name: str, k: int) -> tuple[str, ...]:
    return doc.kform_labels.get(name) or tuple(str(a + 1) for a in range(k))


def _floats(value, what: str) -> list[float]:
    items = _split(value) if isinstance(value, str) else value
    try:
        return [float(x) for x in items]
    except (TypeError, ValueError):
        raise InputError(f"{what} must be a list of numbers") from None


def _profile(text) -> Profile:
    if isinstance(text, str):
        try:
            text = json.loads(text)
        except json.JSONDecodeError:
            raise InputError(f"cannot read coefficient value {text!r}") from None
    return Profile.from_json(text)


def _seed(value: Optional[str]) -> int:
    raw = value if value is not None else os.environ.get("KONTACT_SEED")
    if raw is None or raw == "":
        return DEFAULT_SEED
    try:
        return int(str(raw), 0)
    except ValueError:
        raise UsageError(f"seed must be an integer, got {raw!r}") from None


# ---- commands ------------------------------------------------------------------


def cmd_check_kcontact(args, doc: Document) -> dict:
    params = task(doc, "check-kcontact")
    name, eta = _kform(doc, args.kform, params)
    rep = verify_kcontact(eta)
    out = {"command": "check-kcontact", "kform": name, "ok": rep.ok}
    out.update(rep.as_dict())
    out["failure_reason"] = rep.reason
    if rep.ok:
        s = kcontact_structure(eta)
        labels = _labels(doc, name, s.k)
        out["reeb"] = {f"R{lab}": _field_dict(R) for lab, R in zip(labels, s.reeb)}
        out["differential"] = {f"d{name}^{lab}": _form_dict(w) for lab, w in zip(labels, s.deta)}
    return out


def cmd_closure(args, doc: Document) -> dict:
    params = task(doc, "closure")
    names = _field_names(doc, args.generators, params, "generators")
    cl = bracket_closure(doc.field_list(names), names, seed=args.seed)
    table = {f"[{cl.labels[a]},{cl.labels[b]}]": _combo(row, cl.labels)
             for (a, b), row in cl.table().items()}
    jacobi = cl.jacobi_ok()
    out = {"command": "closure", "generators": names, "dim": cl.dim, "basis": list(cl.labels),
           "table": table, "jacobi": jacobi}
    ok = jacobi
    expected_dim = _pick(args.expect_dim, params, "dim")
    if expected_dim is not None:
        out["expected_dim"] = int(expected_dim)
        ok = ok and cl.dim == int(expected_dim)
    out["ok"] = ok
    return out


def _hamiltonians(doc: Document, args, params: dict):
    name, eta = _kform(doc, args.kform, params)
    s = kcontact_structure(eta)
    names = _field_names(doc, args.fields, params)
    checks = [hamiltonian_check(doc.get_field(n), s) for n in names]
    return name, s, names, checks


def cmd_hamiltonians(args, doc: Document) -> dict:
    params = task(doc, "hamiltonians")
    name, s, names, checks = _hamiltonians(doc, args, params)
    labels = _labels(doc, name, s.k)
    rows = {}
    for n, chk in zip(names, checks):
        rows[n] = {"hamiltonian": _kfunction_dict(chk.hamiltonian, labels), "defining_equations": chk.ok}
    return {"command": "hamiltonians", "kform": name, "ok": all(c.ok for c in checks), "fields": rows}


def cmd_bracket_table(args, doc: Document) -> dict:
    params = task(doc, "bracket-table")
    name, s, names, checks = _hamiltonians(doc, args, params)
    bad = [n for n, c in zip(names, checks) if not c.ok]
    if bad:
        raise errors.NotHamiltonianInput(f"not Hamiltonian: {', '.join(bad)}")
    hnames = [f"h{n[1:]}" if re.fullmatch(r"X\d+", n) else f"h_{n}" for n in names]
    raw = bracket_table([c.hamiltonian for c in checks], doc.field_list(names), s, seed=args.seed)
    table = {}
    outside = []
    for (a, b), row in sorted(raw.items()):
        key = "{" + f"{hnames[a]},{hnames[b]}" + "}"
        if row is None:
            outside.append(key)
        elif row:
            table[key] = _combo(row, hnames)
    return {"command": "bracket-table", "kform": name, "ok": not outside, "functions": hnames,
            "table": table, "outside_span": outside}


def cmd_build_eta(args, doc: Document) -> dict:
    params = task(doc, "build-eta")
    dist = _split(_pick(args.distribution, params, "distribution"))
    syms = _split(_pick(args.symmetries, params, "symmetries"))
    if not dist or not syms:
        raise InputError("build-eta needs --distribution and --symmetries")
    eta = build_kcontact(doc.field_list(dist), doc.field_list(syms))
    rep = verify_kcontact(eta)
    labels = [str(x) for x in params.get("labels", range(1, eta.k + 1))]
    if len(labels) != eta.k:
        raise InputError(f"{len(labels)} labels for a {eta.k}-contact form")
    out = {"command": "build-eta", "distribution": dist, "symmetries": syms, "k": eta.k,
           "components": {f"eta^{lab}": _form_dict(w) for lab, w in zip(labels, eta)},
           "kcontact": rep.as_dict()}
    ok = rep.ok
    expected = params.get("expected")
    if expected:
        agree = {}
        for lab, w in zip(labels, eta):
            if lab in expected:
                agree[f"eta^{lab}"] = (w - doc.get_form(expected[lab])).is_zero()
        out["matches_expected"] = agree
        ok = ok and all(agree.values())
    out["ok"] = ok
    return out


def cmd_prolong(args, doc: Document) -> dict:
    params = task(doc, "prolong")
    ell = int(_pick(args.ell, params, "ell", 1))
    name, eta = _kform(doc, args.kform, params)
    names = _field_names(doc, args.fields, params)
    fields = doc.field_list(names)
    p = diagonal_prolongation(fields, eta, ell)
    rep = verify_kcontact(p.eta)
    base = structure_constants(fields, names, seed=args.seed)
    lifted = structure_constants(list(p.fields), names, seed=args.seed)
    same = base.constants == lifted.constants
    return {"command": "prolong", "ell": ell, "dim": p.chart.dim, "k": p.eta.k,
            "chart": list(p.chart.vars), "kcontact": rep.as_dict(), "constants_preserved": same,
            "ok": rep.ok and same}


def cmd_companion(args, doc: Document) -> dict:
    params = task(doc, "companion")
    name, s, names, checks = _hamiltonians(doc, args, params)
    bad = [n for n, c in zip(names, checks) if not c.ok]
    if bad:
        raise errors.NotHamiltonianInput(f"not Hamiltonian: {', '.join(bad)}")
    theta_raw = _pick(args.theta, params, "theta")
    if theta_raw is None:
        raise InputError("companion needs --theta")
    theta = [Fraction(str(x)) for x in (_split(theta_raw) if isinstance(theta_raw, str) else theta_raw)]
    coeffs = _split(params.get("coefficients")) or [f"b{i + 1}" for i in range(len(names))]
    comp = companion_system([c.hamiltonian for c in checks], doc.field_list(names), s, theta,
                            coeffs, seed=args.seed)
    kept = [names[i] for i in comp.kept]
    limit = _pick(args.max_order, params, "max_order")
    ok = comp.nilpotency is not None and (limit is None or comp.nilpotency <= int(limit))
    return {"command": "companion", "theta": [str(t) for t in theta], "kept": kept,
            "coefficients": list(comp.coefficients),
            "matrix": [[str(e) for e in row] for row in comp.matrix],
            "nilpotency": comp.nilpotency, "max_order": None if limit is None else int(limit), "ok": ok}


def cmd_integrate(args, doc: Document) -> dict:
    params = task(doc, "integrate")
    names = _field_names(doc, args.fields, params)
    coeffs = _split(params.get("coefficients")) or [f"b{i + 1}" for i in range(len(names))]
    system = TDepSystem(doc.field_list(names), coeffs)
    given = dict(params.get("profiles", {}))
    given.update(args.coef)
    missing = [c for c in coeffs if c not in given]
    if missing:
        raise InputError(f"no value for coefficient(s) {', '.join(missing)}")
    profile = {c: _profile(given[c]) for c in coeffs}
    x0_raw = _pick(args.x0, params, "x0")
    if x0_raw is None:
        raise InputError("integrate needs an initial state (--x0)")
    x0 = _floats(x0_raw, "x0")
    t1 = float(_pick(args.t, params, "t", 1.0))
    t0 = float(_pick(args.t0, params, "t0", 0.0))
    step = float(_pick(args.step, params, "step", 1e-3))
    traj = integrate(system, profile, x0, (t0, t1), step)
    out = {"command": "integrate", "fields": names, "coefficients": coeffs,
           "t_span": [t0, t1], "step": traj.step, "steps": len(traj.times) - 1,
           "final_state": {n: float(v) for n, v in zip(traj.names, traj.states[-1])}}
    ok = True
    if args.check_constant:
        text = args.quantity or params.get("quantity")
        if not text:
            raise InputError("--check-constant needs a quantity")
        tol = args.tol if args.tol is not None else float(params.get("tol", CONSERVATION_TOL))
        rep = check_constant(traj, parse(str(text), doc.chart, trajectory_symbols(coeffs, doc.constants)), tol)
        out["constant"] = {"quantity": text, **rep.as_dict()}
        ok = rep.ok
    out["ok"] = ok
    return out


def _sample_point(rng: random.Random, names: Sequence[str]) -> dict[str, float]:
    return {n: rng.uniform(-2.0, 2.0) for n in names}


def cmd_fd_check(args, doc: Document) -> dict:
    params = task(doc, "fd-check")
    names = _field_names(doc, args.fields, params)
    points = int(_pick(args.points, params, "points", 5))
    tol = args.tol if args.tol is not None else float(params.get("tol", FD_TOL))
    step = float(params.get("step", FD_STEP))
    rng = random.Random(args.seed)
    free = list(doc.chart.vars) + list(doc.constants)
    checked = 0
    worst = 0.0
    failures = []
    for n in names:
        X = doc.get_field(n)
        for var, c in zip(X.chart.vars, X.coeffs):
            deps = sorted(set(c.free_symbols()) & set(doc.chart.vars)) if not c.is_constant() else []
            for wrt in deps:
                done = attempts = 0
                while done < points:
                    attempts += 1
                    if attempts > 50 * points:
                        raise errors.PoleEncountered(f"no regular points for {n}[{var}]")
                    pt = _sample_point(rng, free)
                    try:
                        rep = fd_validate(c, wrt, pt, step, tol)
                    except (errors.PoleEncountered, errors.PoleAtPoint):
                        continue
                    done += 1
                    checked += 1
                    worst = max(worst, rep.rel_error)
                    if not rep.ok:
                        failures.append(f"{n}[d/d{var}] by {wrt}")
    return {"command": "fd-check", "fields": names, "derivatives_checked": checked,
            "max_rel_error": worst, "tol": tol, "failures": sorted(set(failures)),
            "ok": not failures}


def cmd_corpus(args) -> dict:
    if args.action == "list":
        return {"command": "corpus", "ok": True, "examples": list(registry())}
    if args.all:
        names = list(registry())
    elif args.name:
        names = [args.name]
    else:
        raise UsageError("corpus run needs an example name or --all")
    for n in names:
        resolve(n)
    results = run_all(names, seed=args.seed, workers=1 if len(names) == 1 else None)
    if not args.all:
        results[0]["example"] = args.name
    summary = {r["example"]: r["counts"] for r in results}
    return {"command": "corpus", "ok": all(r["ok"] for r in results), "summary": summary,
            "examples": results}


DOC_COMMANDS = {
    "check-kcontact": cmd_check_kcontact,
    "closure": cmd_closure,
    "hamiltonians": cmd_hamiltonians,
    "bracket-table": cmd_bracket_table,
    "build-eta": cmd_build_eta,
    "prolong": cmd_prolong,
    "companion": cmd_companion,
    "integrate": cmd_integrate,
    "fd-check": cmd_fd_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the report as JSON")
    common.add_argument("--seed", default=None, help="RNG seed (default $KONTACT_SEED or 0xC0FFEE)")
    common.add_argument("--tol", type=float, default=None, help="override the numeric tolerance")

    p = _Parser(prog="kontact", description="k-contact Lie system toolkit")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def doc_cmd(name: str, help_: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("input", help="input document (JSON)")
        return sp

    sp = doc_cmd("check-kcontact", "verify the k-contact conditions and print the Reeb fields")
    sp.add_argument("--kform")
    sp = doc_cmd("closure", "real Lie algebra generated by vector fields")
    sp.add_argument("--generators")
    sp.add_argument("--expect-dim", type=int)
    for name, help_ in (("hamiltonians", "Hamiltonian k-functions of the fields"),
                        ("bracket-table", "k-contact brackets of the Hamiltonian k-functions")):
        sp = doc_cmd(name, help_)
        sp.add_argument("--fields")
        sp.add_argument("--kform")
    sp = doc_cmd("build-eta", "k-contact form from a distribution and commuting symmetries")
    sp.add_argument("--distribution")
    sp.add_argument("--symmetries")
    sp = doc_cmd("prolong", "diagonal prolongation of the fields and the k-contact form")
    sp.add_argument("--ell", type=int)
    sp.add_argument("--fields")
    sp.add_argument("--kform")
    sp = doc_cmd("companion", "companion linear system for a projected Hamiltonian")
    sp.add_argument("--theta")
    sp.add_argument("--fields")
    sp.add_argument("--kform")
    sp.add_argument("--max-order", type=int)
    sp = doc_cmd("integrate", "RK4 flow of sum b_i(t) X_i; coefficients as --b1 VALUE ...")
    sp.add_argument("--fields")
    sp.add_argument("--x0")
    sp.add_argument("--t", type=float)
    sp.add_argument("--t0", type=float)
    sp.add_argument("--step", type=float)
    sp.add_argument("--quantity")
    sp.add_argument("--check-constant", action="store_true")
    sp = doc_cmd("fd-check", "finite-difference check of symbolic derivatives")
    sp.add_argument("--fields")
    sp.add_argument("--points", type=int)

    sp = sub.add_parser("corpus", parents=[common], help="run the worked-example corpus")
    sp.add_argument("action", choices=["run", "list"])
    sp.add_argument("name", nargs="?")
    sp.add_argument("--all", action="store_true")
    return p


def _coefficient_flags(rest: Sequence[str]) -> dict[str, str]:
    out: dict[str, str] = {}
    it = iter(rest)
    for tok in it:
        m = _COEF_FLAG.match(tok)
        if not m:
            raise UsageError(f"unrecognized argument {tok}")
        value = m.group(2)
        if value is None:
            value = next(it, None)
            if value is None:
                raise UsageError(f"--{m.group(1)} needs a value")
        out[m.group(1)] = value
    return out


def run(argv: Optional[Sequence[str]] = None) -> tuple[int, dict, bool]:
    parser = build_parser()
    args, rest = parser.parse_known_args(argv)
    args.coef = _coefficient_flags(rest) if args.command == "integrate" else {}
    if rest and args.command != "integrate":
        raise UsageError(f"unrecognized arguments: {' '.join(rest)}")
    args.seed = _seed(args.seed)
    if args.command == "corpus":
        report = cmd_corpus(args)
    else:
        doc = load_document(args.input)
        try:
            report = DOC_COMMANDS[args.command](args, doc)
        except CHECK_FAILURES as exc:
            report = {"command": args.command, "ok": False, "failure_reason": exc.code,
                      "message": str(exc)}
    return (0 if report["ok"] else 1), report, args.json


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        code, report, as_json = run(argv)
    except UsageError as exc:
        print(f"kontact: usage error: {_one_line(exc)}", file=sys.stderr)
        return 2
    except (KontactError, ValueError, ArithmeticError, OSError) as exc:
        print(f"kontact: error: {_one_line(exc)}", file=sys.stderr)
        return 2
    emit(report, as_json)
    return code


def _one_line(exc: BaseException) -> str:
    return " ".join(str(exc).split())


if __name__ == "__main__":
    sys.exit(main())
