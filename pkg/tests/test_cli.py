import json
import subprocess
import sys

import pytest

from gsspace import closure_core as cc
from gsspace.cases import run_case_study, run_property_suite
from gsspace.cli import main
from gsspace.report import Report, RunConfig, render
from gsspace.numeric import IndeterminateError

SMALL = ["--tie-pairs", "20", "--lift-pairs", "5", "--complex-pairs", "10"]


def test_unknown_case_exits_2(capsys):
    assert main(["case", "unknown"]) == 2
    assert "unknown case study" in capsys.readouterr().err


def test_not_transitive_case(capsys):
    assert main(["case", "not-transitive"]) == 0
    out = capsys.readouterr().out
    for claim in ("mixed3d.tie.f1-e", "mixed3d.tie.e-f2", "mixed3d.closed.f1-f2"):
        assert f"{claim}\tpass" in out
    assert out.startswith("# case not-transitive seed=20240601 mode=exact")


def test_fdim_spectra_structured(capsys):
    assert main(["case", "fdim-spectra", "--algebra", "2+3", "--format", "structured"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["seed"] == 20240601
    claims = {r["claim"]: r["verdict"] for r in payload["records"]}
    assert claims["spectra.gs-discrete"] == "pass" and claims["spectra.gamma-bijective"] == "pass"


def test_seed_recorded_and_out_file(tmp_path):
    out = tmp_path / "r.txt"
    assert main(["case", "like-tensor", "--seed", "77", "--like-tensor-cases", "5", "--out", str(out)]) == 0
    assert "seed=77" in out.read_text().splitlines()[0]


def test_invalid_cap_is_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["suite", "--tie-pairs", "0"])
    assert info.value.code == 2


def test_suite_fault_injection_fails(capsys):
    code = main(["suite", "--inject-fault", "tie-ignores-y", *SMALL])
    out = capsys.readouterr().out
    assert code == 1
    failed = [line for line in out.splitlines() if "\tfail\t" in line]
    assert failed and all(line.startswith("cstar.") for line in failed)
    assert any(line.startswith("cstar.tie-agreement.") for line in failed)


def test_suite_deterministic():
    cfg = RunConfig(tie_pairs=20, lift_pairs=5, sample_points=3)
    assert render(run_property_suite(cfg)) == render(run_property_suite(cfg))


def test_timing_column_optional():
    report = run_case_study("sublemma", RunConfig(sublemma_cases=3))
    assert "elapsed" not in render(report)
    assert "elapsed" in render(report, timing=True)


def test_indeterminate_and_crash_records():
    report = Report("t", RunConfig())

    def ambiguous():
        raise IndeterminateError("close call", 1e-8)

    report.check("a.ambiguous", "anchor", ambiguous)
    report.check("b.crash", "anchor", lambda: 1 / 0)
    report.check("c.ok", "anchor", lambda: (True, 0.5, "note"))
    verdicts = [r.verdict for r in report.ordered()]
    assert verdicts == ["indeterminate", "fail", "pass"]
    assert report.exit_code() == 1
    assert "# summary pass=1 fail=1 indeterminate=1" in render(report)


def test_records_sorted_by_claim():
    report = Report("t", RunConfig())
    for cid in ("z", "a", "m"):
        report.check(cid, "anchor", lambda: True)
    assert [r.claim_id for r in report.ordered()] == ["a", "m", "z"]


def test_space_check_and_transform(tmp_path, capsys):
    space = cc.from_closed_family("abc", [[], ["a"], ["c"], ["a", "c"], ["a", "b", "c"]])
    path = tmp_path / "s.json"
    path.write_text(cc.space_to_json(space))
    assert main(["space", "check", str(path)]) == 0
    out = capsys.readouterr().out
    assert "space.classes\tpass" in out and "{a,b,c}" in out
    assert main(["space", "transform", str(path)]) == 0
    out = capsys.readouterr().out
    assert "space.transform-identity\tpass" in out and "closure-space" in out


def test_space_invalid_family(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"ground": ["a", "b"], "closed": [["a"], ["a", "b"]]}))
    assert main(["space", "check", str(path)]) == 1
    assert "axiom (i) violated" in capsys.readouterr().out


def test_space_missing_file(capsys):
    assert main(["space", "check", "/nonexistent/space.json"]) == 2


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gsspace.cli", "case", "fdim-spectra", "--algebra", "1+1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "spectra.quotient-identity\tpass" in proc.stdout
