import json
import os
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from conftest import INPUTS
from kontact.cli import main

REPORT_SCHEMA = json.loads(resources.files("kontact").joinpath("schemas/report.json").read_text())
INPUT_SCHEMA = json.loads(resources.files("kontact").joinpath("schemas/input.json").read_text())


def run(capsys, *args):
    code = main([*args, "--json"])
    out, err = capsys.readouterr()
    report = json.loads(out) if out.strip() else None
    if report is not None:
        jsonschema.validate(report, REPORT_SCHEMA)
    return code, report, err


def shell(*args, env=None):
    return subprocess.run([sys.executable, "-m", "kontact", *args], capture_output=True, text=True,
                          env={**os.environ, **(env or {})}, timeout=600)


def doc(name):
    return str(INPUTS / name)


@pytest.mark.parametrize("name", ["control.json", "frontwheel.json", "jet.json", "bad.json"])
def test_demo_inputs_validate(name):
    jsonschema.validate(json.loads((INPUTS / name).read_text()), INPUT_SCHEMA)


class TestCheckKContact:
    def test_control(self, capsys):
        code, rep, _ = run(capsys, "check-kcontact", doc("control.json"))
        assert code == 0 and rep["ok"] and rep["k"] == 2 and rep["dim"] == 5
        assert rep["reeb"]["R1"] == {"d/dx4": "1"}

    def test_bad_form_exits_one(self, capsys):
        code, rep, err = run(capsys, "check-kcontact", doc("bad.json"))
        assert code == 1 and not rep["ok"]
        assert rep["failure_reason"] == "CorankMismatch"
        assert err == ""


class TestAlgebra:
    def test_closure(self, capsys):
        code, rep, _ = run(capsys, "closure", doc("control.json"))
        assert code == 0 and rep["dim"] == 5 and rep["jacobi"]
        assert rep["table"]["[X1,X2]"] == {"X3": "1"}

    def test_closure_with_wrong_expectation(self, capsys):
        code, rep, _ = run(capsys, "closure", doc("control.json"), "--expect-dim", "4")
        assert code == 1 and not rep["ok"]

    def test_hamiltonians(self, capsys):
        code, rep, _ = run(capsys, "hamiltonians", doc("control.json"))
        assert code == 0
        assert rep["fields"]["X3"]["hamiltonian"] == {"e1": "-2*x1", "e2": "-2*x2"}
        assert all(r["defining_equations"] for r in rep["fields"].values())

    def test_bracket_table(self, capsys):
        code, rep, _ = run(capsys, "bracket-table", doc("control.json"))
        assert code == 0 and rep["table"]["{h1,h2}"] == {"h3": "-1"}

    def test_build_eta(self, capsys):
        code, rep, _ = run(capsys, "build-eta", doc("control.json"))
        assert code == 0 and rep["matches_expected"] and rep["kcontact"]

    def test_build_failure_is_a_report(self, capsys):
        code, rep, _ = run(capsys, "build-eta", doc("control.json"), "--symmetries", "X1,X2")
        assert code == 1 and rep["failure_reason"] == "SymmetryFailure"


class TestSystems:
    def test_prolong(self, capsys):
        code, rep, _ = run(capsys, "prolong", doc("jet.json"))
        assert code == 0 and rep["dim"] == 10 and rep["k"] == 4
        assert rep["kcontact"] and rep["constants_preserved"]

    def test_companion(self, capsys):
        code, rep, _ = run(capsys, "companion", doc("control.json"))
        assert code == 0 and rep["nilpotency"] == 3

    def test_integrate_conserves_frontwheel_quantity(self, capsys):
        code, rep, _ = run(capsys, "integrate", doc("frontwheel.json"), "--b1", "1", "--b2", "0.5",
                           "--t", "1", "--step", "1e-3", "--check-constant")
        assert code == 0
        assert rep["constant"]["ok"] and rep["constant"]["max_drift"] < 1e-6

    def test_integrate_time_dependent_profile(self, capsys):
        profile = json.dumps({"polynomial": [0, 0, 1]})
        code, rep, _ = run(capsys, "integrate", doc("frontwheel.json"), "--b1", "1", "--b2", profile,
                           "--t", "1", "--step", "1e-3", "--check-constant")
        assert code == 0 and rep["constant"]["max_drift"] < 1e-6

    def test_fd_check(self, capsys):
        code, rep, _ = run(capsys, "fd-check", doc("control.json"))
        assert code == 0 and rep["failures"] == [] and rep["max_rel_error"] < rep["tol"]


class TestCorpus:
    def test_run_control(self, capsys):
        code, rep, _ = run(capsys, "corpus", "run", "control")
        assert code == 0
        (ex,) = rep["examples"]
        ids = {e["id"]: e["status"] for e in ex["entries"]}
        assert ids["closure:[X1,X2]"] == "match"

    def test_list(self, capsys):
        code, rep, _ = run(capsys, "corpus", "list")
        assert code == 0 and "schwarz" in json.dumps(rep)

    def test_unknown_example(self, capsys):
        code, rep, err = run(capsys, "corpus", "run", "nope")
        assert code == 2 and rep is None and err.count("\n") == 1


class TestErrors:
    def test_missing_file(self, capsys, tmp_path):
        code, rep, err = run(capsys, "check-kcontact", str(tmp_path / "missing.json"))
        assert code == 2 and rep is None
        assert err.startswith("kontact: error:") and err.count("\n") == 1

    def test_malformed_expression(self, capsys, tmp_path):
        bad = json.loads((INPUTS / "bad.json").read_text())
        bad["forms"]["A"] = {"dz": "x +* y"}
        path = tmp_path / "broken.json"
        path.write_text(json.dumps(bad))
        code, _, err = run(capsys, "check-kcontact", str(path))
        assert code == 2 and err.count("\n") == 1

    def test_usage_error(self):
        res = shell("closure")
        assert res.returncode == 2 and res.stdout == ""
        assert res.stderr.startswith("kontact: usage error:") and res.stderr.count("\n") == 1

    def test_bad_seed(self, capsys):
        code, _, err = run(capsys, "closure", doc("control.json"), "--seed", "banana")
        assert code == 2 and err.startswith("kontact:")


def test_output_is_deterministic():
    a = shell("closure", doc("control.json"), "--json")
    b = shell("closure", doc("control.json"), "--json", env={"KONTACT_SEED": "0xC0FFEE"})
    assert a.returncode == 0 and a.stdout == b.stdout


def test_seed_does_not_change_exact_results():
    a = shell("bracket-table", doc("control.json"), "--json", env={"KONTACT_SEED": "7"})
    b = shell("bracket-table", doc("control.json"), "--json", "--seed", "12345")
    assert json.loads(a.stdout)["table"] == json.loads(b.stdout)["table"]


def test_text_output(capsys):
    assert main(["check-kcontact", doc("control.json")]) == 0
    out = capsys.readouterr().out
    assert "ok: true" in out and "k: 2" in out
