import json
import subprocess
import sys
from pathlib import Path

import pytest

from crystaframe.cli import main
from crystaframe.report import Report
from crystaframe.runner import run_scenario
from crystaframe.scenario import (
    ScenarioParseError,
    ScenarioSemanticError,
    parse_scenario,
    parse_monomial,
    validate_scenario,
)

ROOT = Path(__file__).resolve().parents[1]
SCN = ROOT / "scenarios"

MINIMAL = """
format_version 1
prime 2
precision 2
depth 1
budget max_carrier 65536
budget max_enum 1048576
budget max_cap 16
frame L kind lift precision 2
command validate L
command classify L rank 1
"""


def test_parse_monomial():
    from fractions import Fraction

    assert parse_monomial("x") == [("x", Fraction(1))]
    assert parse_monomial("x^2*y") == [("x", Fraction(2)), ("y", Fraction(1))]
    assert parse_monomial("Y^1/2") == [("Y", Fraction(1, 2))]
    with pytest.raises(ScenarioParseError):
        parse_monomial("2x")


def test_parse_minimal():
    sc = parse_scenario(MINIMAL)
    assert sc.prime == 2 and sc.precision == 2
    assert len(sc.commands) == 2
    objects = validate_scenario(sc)
    assert "L" in objects["frames"]


def test_missing_version_rejected():
    with pytest.raises(ScenarioParseError):
        parse_scenario("prime 2\n")


def test_unknown_directive_rejected():
    with pytest.raises(ScenarioParseError):
        parse_scenario("format_version 1\nfoo bar\n")


def test_missing_budget_is_semantic_error():
    sc = parse_scenario(
        "format_version 1\nprime 2\nprecision 2\nframe L kind lift\ncommand validate L\n"
    )
    with pytest.raises(ScenarioSemanticError):
        validate_scenario(sc)


def test_unknown_names_are_semantic_errors():
    sc = parse_scenario(MINIMAL + "command validate NOPE\n")
    with pytest.raises(ScenarioSemanticError):
        validate_scenario(sc)


def test_run_scenario_report_deterministic():
    sc = parse_scenario(MINIMAL)
    objects = validate_scenario(sc)
    r1 = run_scenario(sc, objects).to_json()
    sc2 = parse_scenario(MINIMAL)
    objects2 = validate_scenario(sc2)
    r2 = run_scenario(sc2, objects2).to_json()
    assert r1 == r2
    doc = json.loads(r1)
    assert doc["format_version"] == 1
    assert doc["exit_code"] == 0
    assert all(r["status"] in ("pass", "fail", "finding") for r in doc["results"])


def test_report_bans_floats():
    rep = Report("x")
    with pytest.raises(TypeError):
        rep.add(["cmd"], "pass", {"bad": 1.5})
        rep.to_json()


def test_cli_run_bundled_scenarios(tmp_path):
    for name in ("witt_frame_f2.scn", "classify_rank1_zp2.scn"):
        out = tmp_path / (name + ".json")
        code = main(["run", str(SCN / name), "--report", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["exit_code"] == 0


def test_cli_golden_report_byte_identical(tmp_path):
    golden = ROOT / "scenarios" / "golden" / "classify_rank1_zp2.json"
    out = tmp_path / "fresh.json"
    code = main(["run", str(SCN / "classify_rank1_zp2.scn"), "--report", str(out)])
    assert code == 0
    assert out.read_bytes() == golden.read_bytes()


def test_cli_exit_codes(tmp_path):
    bad = tmp_path / "bad.scn"
    bad.write_text("format_version 1\nthisisnota directive\n")
    assert main(["run", str(bad)]) == 2
    sem = tmp_path / "sem.scn"
    sem.write_text(MINIMAL + "command validate MISSING\n")
    assert main(["run", str(sem)]) == 3
    # budget: a quotient carrier larger than max_carrier
    budg = tmp_path / "budget.scn"
    budg.write_text(
        """
format_version 1
prime 2
precision 2
depth 1
budget max_carrier 4
budget max_enum 1048576
budget max_cap 16
ring S field Fp vars Y:2:2
frame Q kind quotient ring S length 2 ideal Y
command validate Q
"""
    )
    assert main(["run", str(budg)]) == 4  # budget exceeded at validation
    missing = tmp_path / "missing.scn"
    assert main(["run", str(missing)]) == 2


def test_cli_verify_subcommand():
    assert main(["verify", "gamma-vp"]) == 0
    assert main(["verify", "sigma1-formula", "--p", "2", "--grid", "nmax=4"]) == 0


def test_env_budget_override(monkeypatch, tmp_path):
    monkeypatch.setenv("CRYSTAFRAME_MAX_CARRIER", "2")
    scn = tmp_path / "s.scn"
    scn.write_text(MINIMAL)
    # Z/4 carrier (size 4) now exceeds the overridden budget of 2
    assert main(["run", str(scn)]) == 4


def test_internal_precision_ledger_stability(tmp_path):
    scn = tmp_path / "conn.scn"
    scn.write_text(
        """
format_version 1
prime 2
precision 2
depth 1
budget max_carrier 65536
budget max_enum 1048576
budget max_cap 16
frame D kind pd vars x gens x cap 5
window ss frame D d 1 t 1 psi 0,1,1,0
command solve-connection D ss
"""
    )
    out = tmp_path / "conn.json"
    code = main(["run", str(scn), "--report", str(out), "--internal-precision", "3"])
    assert code == 0
    doc = json.loads(out.read_text())
    result = doc["results"][0]
    assert result["status"] == "pass"
    assert result["data"]["ledger_stability"] is True
    assert doc["ledger"]  # the extra digit is recorded


def test_console_entrypoint():
    proc = subprocess.run(
        [sys.executable, "-m", "crystaframe.cli", "verify", "gamma-vp"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "PASS" in proc.stdout
