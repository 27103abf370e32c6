import json
import subprocess
import sys

import pytest

from oamdistill.cli import parse_grid, run_command
from oamdistill.qudit import DomainError
from oamdistill.report import FIELDS, ReportRow, render, rows_from_json, run_protocol

HEADER = "protocol,D,rule,engine,step,f_in,f_out,p_success,residual"


def test_oambs_both(capsys):
    assert run_command(["oambs", "--dim", "3", "--fidelity", "0.5", "--rule", "corrected", "--engine", "both"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == HEADER
    assert len(lines) == 2
    row = lines[1].split(",")
    assert row[:5] == ["oambs", "3", "corrected", "both", "1"]
    assert float(row[6]) == 0.8
    assert float(row[8]) < 1e-9


def test_bbpssw_analytic_csv_line(capsys):
    assert run_command(["bbpssw", "--dim", "3", "--fidelity", "0.5"]) == 0
    assert capsys.readouterr().out == HEADER + "\nbbpssw,3,-,analytic,1,0.5,0.666666666667,0.375,\n"


def test_resource_limit_exit(capsys):
    assert run_command(["oambs", "--dim", "9", "--fidelity", "0.5", "--engine", "enumerate"]) == 3
    assert "resource limit" in capsys.readouterr().err


def test_analytic_engine_has_no_dimension_guard(capsys):
    assert run_command(["oambs", "--dim", "9", "--fidelity", "0.5"]) == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["frobnicate"],
        ["oambs", "--dim", "3"],
        ["oambs", "--dim", "3", "--fidelity", "0.5", "--weights", "1"],
        ["oambs", "--dim", "3", "--fidelity", "0.5", "--rule", "majority"],
        ["oambs", "--dim", "3", "--fidelity", "1.5"],
        ["conserving", "--dim", "3", "--weights", "0.5,0.5"],
        ["bbpssw", "--dim", "3", "--weights", "0.5,0.6"],
        ["oambs", "--dim", "3", "--fidelity", "0.5", "--rule", "literal", "--steps", "2"],
        ["sweep", "--protocol", "oambs", "--dims", "2", "--f-grid", "0.5:0.1:0.1"],
    ],
)
def test_argument_errors_exit_2(argv, capsys):
    assert run_command(argv) == 2
    assert capsys.readouterr().err


def test_unwritable_path(tmp_path, capsys):
    out = tmp_path / "missing" / "x.csv"
    assert run_command(["bbpssw", "--dim", "2", "--fidelity", "0.7", "--out", str(out)]) == 2


def test_weights_flag_and_steps(capsys):
    assert run_command(["bbpssw", "--dim", "3", "--weights", "0.5,0.25,0.25", "--steps", "2", "--engine", "both"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 3
    step2 = lines[2].split(",")
    assert step2[4] == "2"
    assert abs(float(step2[5]) - 2 / 3) < 1e-11


def test_steps_follow_the_map():
    rows = run_protocol("bbpssw", 4, fidelity=0.5, steps=2)
    assert [r.f_out for r in rows] == pytest.approx([0.75, 27 / 28], abs=1e-12)
    assert rows[1].f_in == rows[0].f_out


def test_conserving_rows():
    rows = run_protocol("conserving", 3, fidelity=0.5, engine="both")
    assert rows[0].rule == "-"
    assert abs(rows[0].f_out - 2 / 3) < 1e-9
    assert abs(rows[0].p_success - 0.125) < 1e-12


def test_literal_rule_rendering():
    rows = run_protocol("oambs", 3, fidelity=0.7, rule="literal", engine="both")
    assert rows[0].rule == "literal-coincidence"
    assert rows[0].residual < 1e-12


def test_json_round_trip(tmp_path):
    out = tmp_path / "r.json"
    assert run_command(["sweep", "--protocol", "oambs", "--dims", "2,3", "--f-grid", "0.2:0.8:0.3",
                        "--engine", "both", "--format", "json", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert all(list(obj) == list(FIELDS) for obj in data)
    rows = rows_from_json(out.read_text())
    assert render(rows, "json") == out.read_text()
    direct = run_protocol("oambs", 3, fidelity=0.5, engine="both")[0]
    parsed = [r for r in rows if r.D == 3 and r.f_in == 0.5][0]
    assert parsed.f_out == float(format(direct.f_out, ".12g"))


def test_render_rejects_empty_rows():
    with pytest.raises(DomainError):
        render([], "csv")


def test_report_row_residual_contract():
    with pytest.raises(DomainError):
        ReportRow("oambs", 3, "corrected", "analytic", 1, 0.5, 0.8, 0.1, residual=0.0)
    with pytest.raises(DomainError):
        ReportRow("oambs", 3, "corrected", "both", 1, 0.5, 0.8, 0.1)
    with pytest.raises(DomainError):
        ReportRow("oambs", 3, "corrected", "analytic", 1, 0.5, float("nan"), 0.1)


def test_parse_grid():
    assert parse_grid("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert parse_grid("0.1:0.3:0.1") == [0.1, 0.2, 0.3]


def test_sweep_deterministic(tmp_path):
    argv = ["sweep", "--protocol", "conserving", "--dims", "2,3", "--f-grid", "0:1:0.1", "--engine", "both"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_command(argv + ["--out", str(a)]) == 0
    assert run_command(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().count("\n") == 1 + 2 * 11


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "oamdistill", "oambs", "--dim", "2", "--fidelity", "0.6"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1].startswith("oambs,2,corrected,analytic,1,0.6,0.692307692308,")


def test_verify_passes(capsys):
    assert run_command(["verify"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert out.rstrip().endswith("checks passed")
