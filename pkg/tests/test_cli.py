import json
from pathlib import Path

import pytest

from ulrichfold import cli
from ulrichfold.cli import Report, Scenario, emit_report, main, render_json, render_text, run_scenario
from ulrichfold.errors import GenericityFailure

GOLDEN = Path(__file__).parent / "golden"


def test_empty_report_is_header_only():
    r = Report(scenario={"name": "x", "prime": 7, "seed": 1, "heavy": False})
    assert render_text(r) == "ulrichfold %s  scenario=x  p=7  seed=1  heavy=False\n" % r.version


def test_delpezzo_text_matches_golden():
    rep = run_scenario(Scenario("delpezzo-r2"))
    assert rep.passed
    assert render_text(rep) == (GOLDEN / "delpezzo-r2.txt").read_text()


def test_json_roundtrip_and_determinism():
    a = render_json(run_scenario(Scenario("delpezzo-r2")))
    b = render_json(run_scenario(Scenario("delpezzo-r2")))
    assert a == b
    d = json.loads(a)
    assert d["schema"] == 1 and "timings" not in d
    assert render_json(Report.from_json(d)) == a
    assert all(e["anchor"] for e in d["expectations"])


def test_unknown_scenario():
    with pytest.raises(ValueError):
        Scenario("nope")
    with pytest.raises(SystemExit):
        main(["--scenario", "nope"])


def test_main_writes_reports(tmp_path, capsys):
    assert main(["--scenario", "hassett-arith", "--scenario", "extension-counts",
                 "--format", "json", "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "hassett-arith.json").read_text())["passed"]
    assert (tmp_path / "extension-counts.timings.json").exists()
    assert "hassett-arith: pass" in capsys.readouterr().out


def test_exit_code_on_failed_expectation(monkeypatch, capsys):
    def bad(run):
        run.expect("test.anchor", "always off", 1, 2)
    monkeypatch.setitem(cli.SCENARIOS, "hassett-arith", bad)
    assert main(["--scenario", "hassett-arith"]) == 2
    assert "FAIL  test.anchor" in capsys.readouterr().out


def test_exit_code_on_genericity(monkeypatch, capsys):
    def unlucky(run):
        raise GenericityFailure("no luck")
    monkeypatch.setitem(cli.SCENARIOS, "hassett-arith", unlucky)
    assert main(["--scenario", "hassett-arith"]) == 3


def test_parallel_jobs(tmp_path):
    assert main(["--scenario", "hassett-arith", "--scenario", "extension-counts",
                 "--jobs", "2", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "hassett-arith.txt").exists() and (tmp_path / "extension-counts.txt").exists()


def test_emit_report_text(tmp_path):
    rep = run_scenario(Scenario("hassett-arith"))
    text = emit_report(rep, "text", str(tmp_path))
    assert (tmp_path / "hassett-arith.txt").read_text() == text
    assert "PASS  hassett.degree12" in text
