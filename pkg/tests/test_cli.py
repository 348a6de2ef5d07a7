import json
import subprocess
import sys

import pytest

from evlogic import engine
from evlogic.cli import REPORT_KEYS, RunReport, main, run_file


def run_cli(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


@pytest.fixture
def write(tmp_path):
    def _write(text, name="in.el"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return _write


def test_run_dnc(capsys):
    code, out = run_cli(capsys, "run", "corpus/dnc.el")
    assert code == 0
    assert "  t1:Attack" in out.splitlines()
    assert "t2:Attack" not in out


def test_run_attribution_json(capsys):
    code, out = run_cli(capsys, "run", "corpus/attribution.el", "--json")
    report = json.loads(out)
    assert code == 0
    assert list(report) == list(REPORT_KEYS)
    assert "t:Culprit(C,Attack)" in report["model"]["positive"]
    assert report["model"]["negative"] == ["t:~Fin(C,Attack)"]


def test_run_unsat_exits_one(capsys):
    code, out = run_cli(capsys, "run", "corpus/closures/xc.el")
    assert code == 1 and "unsat (closed by XC)" in out


def test_run_empty_file_exits_two(capsys, write):
    code, out = run_cli(capsys, "run", write(""))
    assert code == 2 and "EmptyTheory" in out


def test_run_missing_file_exits_two(capsys, tmp_path):
    code, out = run_cli(capsys, "run", str(tmp_path / "nope.el"))
    assert code == 2 and "cannot read" in out


def test_check_valid_and_invalid(capsys, write):
    assert run_cli(capsys, "check", "corpus/attribution.el")[0] == 0
    cyclic = write("agents a; times t; evidence a @ t : A <- r [a @ t : B]. evidence a @ t : B <- s [a @ t : A].")
    code, out = run_cli(capsys, "check", cyclic)
    assert code == 2 and "DerivationCycle" in out
    conflict = write("agents a; times t; evidence a @ t : A <- r [a @ t : p]. evidence a @ t : A.", "k.el")
    code, out = run_cli(capsys, "check", conflict)
    assert code == 2 and "KindConflict" in out


def test_json_reparses_to_the_same_report():
    report = run_file("corpus/attribution.el", with_trace=True)
    data = json.loads(report.to_json())
    assert data == report.to_dict()
    assert RunReport.from_dict(data) == report
    assert list(data) == list(REPORT_KEYS)
    assert data["trace"] and data["stats"]["D2pp"] == 2


def test_unsat_report_cannot_hold_a_model():
    with pytest.raises(ValueError):
        RunReport("x", "unsat", "XC", {"positive": ["t:p"], "negative": []})


@pytest.mark.parametrize("name", ["corpus/dnc.el", "corpus/attribution.el", "corpus/closures/xp.el"])
def test_text_and_json_agree(capsys, name):
    code_t, text = run_cli(capsys, "run", name)
    code_j, js = run_cli(capsys, "run", name, "--json")
    report = json.loads(js)
    assert code_t == code_j
    head, *rest = text.splitlines()
    assert head.split(": ", 1)[1].split()[0] == report["verdict"]
    listed = [ln.strip().replace("  (negative)", "") for ln in rest if ln.startswith("  ")]
    assert listed == report["model"]["positive"] + report["model"]["negative"]


def test_plausible_lists_positives_only(capsys):
    _, out = run_cli(capsys, "run", "corpus/attribution.el", "--plausible")
    assert "plausible:" in out and "~" not in out


def test_many_files_keep_input_order(capsys):
    names = ["corpus/closures/xt.el", "corpus/dnc.el", "corpus/closures/xc.el", "corpus/attribution.el"] * 2
    code, out = run_cli(capsys, "run", "--json", *names)
    reports = [json.loads(line) for line in out.splitlines()]
    assert [r["input"] for r in reports] == names
    assert code == 1


def test_parse_error_beats_unsat(capsys, write):
    code, _ = run_cli(capsys, "run", "corpus/closures/xc.el", write("nonsense"))
    assert code == 2


@pytest.mark.parametrize("mode,colored", [("always", True), ("never", False), ("auto", False)])
def test_color_modes(capsys, monkeypatch, mode, colored):
    monkeypatch.setenv("EVLOGIC_COLOR", mode)
    _, out = run_cli(capsys, "run", "corpus/dnc.el")
    assert ("\x1b[" in out) is colored


def test_fuzz_is_deterministic(capsys):
    first = run_cli(capsys, "fuzz", "--seeds", "3")
    second = run_cli(capsys, "fuzz", "--seeds", "3")
    assert first == second
    assert first[0] == 0 and "0 failing" in first[1]


def test_fuzz_rejects_bad_caps(capsys):
    assert run_cli(capsys, "fuzz", "--agents", "9")[0] == 2


def test_fuzz_fails_when_the_cascade_is_broken(capsys, monkeypatch):
    monkeypatch.setattr(engine, "delta_set", lambda facts, defeated: [])
    code, out = run_cli(capsys, "fuzz", "--seeds", "2")
    assert code != 0 and "golden: cascade" in out


def test_fuzz_reports_seed_and_minimized_theory(capsys, monkeypatch):
    # make every random schedule close, so seed 0 disagrees with the deterministic run
    real = engine.run_randomized

    def broken(theory, seed):
        out = real(theory, seed)
        out.verdict = engine.Verdict.CLOSED
        return out

    import evlogic.oracle as oracle
    monkeypatch.setattr(oracle, "run_randomized", broken)
    code, out = run_cli(capsys, "fuzz", "--seeds", "5", "--bias", "0")
    assert code == 1
    assert "FAIL seed 0" in out and "minimized theory:" in out
    assert "evidence" in out.split("minimized theory:")[1]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "evlogic", "run", "corpus/dnc.el", "--json"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "sat"
