"""
Tests for spingate.py
End-to-end runs of every subcommand through main()
"""

import json
import os

import pytest

from exchange import DotParameters, FieldPair, exchange_J, symmetry_defect
from outputs import read_csv_rows
from spingate import EXIT_INFEASIBLE, EXIT_OK, EXIT_USAGE, main, parse_sweep

GOLDEN_PATH = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data", "golden", "equal_field_gaas.csv")


@pytest.fixture
def run(tmp_path):
    def _run(*argv):
        return main(["--log-dir", str(tmp_path / "logs"), *argv])
    return _run


def test_parse_sweep():
    grid = parse_sweep("B=0:10:0.1")
    assert len(grid) == 101
    assert grid[0] == 0.0 and grid[-1] == pytest.approx(10.0)


@pytest.mark.parametrize("text", ["B=0:10", "X=0:1:0.1", "B=1:0:0.1", "B=0:1:0"])
def test_parse_sweep_rejects(text):
    with pytest.raises(ValueError):
        parse_sweep(text)


def test_simulate_free_sqrt_swap(run, tmp_path):
    pulse = tmp_path / "free.env"
    pulse.write_text("family=Free\nphi=0.7853981633974483\nt_end=10\ntarget=sqrt_swap\nsamples=11\n", encoding="utf-8")
    out = tmp_path / "results"
    assert run("simulate", "--pulse", str(pulse), "--out", str(out)) == EXIT_OK

    rows = read_csv_rows(out / "trajectory.csv")
    assert len(rows) == 11
    assert len(rows[0]) == 1 + 32 + 2
    assert rows[-1][-1] == pytest.approx(1.0, abs=1e-12)
    assert max(row[-2] for row in rows) <= 1e-10
    assert (out / "trajectory.csv").read_text(encoding="utf-8").startswith("# spingate ")


def test_simulate_missing_pulse_file(run, tmp_path):
    assert run("simulate", "--pulse", str(tmp_path / "absent.env"), "--out", str(tmp_path)) == EXIT_USAGE


def test_exchange_sweep(run, tmp_path):
    out = tmp_path / "results"
    assert run("exchange", "--preset", "gaas", "--sweep", "B=0:10:0.1", "--out", str(out)) == EXIT_OK
    rows = read_csv_rows(out / "exchange.csv")
    assert len(rows) == 101
    params = DotParameters.from_preset("gaas")
    golden = read_csv_rows(GOLDEN_PATH)
    for row, reference in zip(rows, golden):
        assert row[0] == pytest.approx(reference[0], abs=1e-12)
        assert row[-1] == pytest.approx(reference[-1], rel=1e-6, abs=1e-7)
        assert row[-1] == pytest.approx(row[4], rel=1e-10, abs=1e-13)
        assert row[-2] == 0.0
    for row in rows[::20]:
        assert row[4] == pytest.approx(exchange_J(params, FieldPair(row[0], row[1])).J, rel=1e-12)


def test_exchange_reports_symmetry_defect(run, tmp_path):
    out = tmp_path / "results"
    assert run("exchange", "--sweep", "B=1:3:1", "--b2-offset", "0.5", "--out", str(out)) == EXIT_OK
    params = DotParameters.from_preset("gaas")
    for row in read_csv_rows(out / "exchange.csv"):
        assert row[-2] == pytest.approx(symmetry_defect(params, FieldPair(row[0], row[1])), rel=1e-12)
        assert row[-2] > 0.0


def test_design_proportional(run, tmp_path):
    out = tmp_path / "results"
    assert run("design-xor", "--family", "proportional", "--n", "2", "--m", "1", "--out", str(out)) == EXIT_OK
    data = json.loads((out / "gate_design.json").read_text(encoding="utf-8"))
    assert data["family"] == "Proportional"
    assert data["achieved_fidelity"] >= 1.0 - 1e-8
    assert data["oracle_fidelity"] >= 1.0 - 1e-6
    assert len(data["provenance"]["config_sha256"]) == 64


def test_design_invalid_indices(run, tmp_path):
    assert run("design-xor", "--family", "constant", "--n", "1", "--m", "1", "--out", str(tmp_path)) == EXIT_USAGE


def test_design_adiabatic_without_field_difference(run, tmp_path):
    assert run("design-xor", "--family", "adiabatic", "--n", "3", "--m", "1", "--c", "0", "--out", str(tmp_path)) == EXIT_INFEASIBLE


def test_design_adiabatic_with_field_difference_reports_residual(run, tmp_path, capsys):
    assert run("design-xor", "--family", "adiabatic", "--n", "3", "--m", "1", "--c", "0.05", "--out", str(tmp_path)) == EXIT_INFEASIBLE
    assert "|G2^0 / a| >=" in capsys.readouterr().out


def test_design_preset_sets_field_cap(run, tmp_path):
    log = tmp_path / "logs" / "spingate.log"
    # T = 2 pi / q puts B+ = q / 4 between the two caps
    assert run("design-xor", "--family", "proportional", "--n", "1", "--q", "1.0", "--out", str(tmp_path / "gaas")) == EXIT_OK
    warnings = log.read_text(encoding="utf-8").count("hardware cap")
    assert warnings >= 1
    assert run("design-xor", "--family", "proportional", "--n", "1", "--q", "1.0", "--preset", "si",
               "--out", str(tmp_path / "si")) == EXIT_OK
    assert log.read_text(encoding="utf-8").count("hardware cap") == warnings


def test_unknown_subcommand(run):
    with pytest.raises(SystemExit) as info:
        run("teleport")
    assert info.value.code == 2


def test_verify_quick_is_deterministic(run, tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    assert run("verify", "--quick", "--out", str(first)) == EXIT_OK
    assert run("verify", "--quick", "--out", str(second)) == EXIT_OK
    report = (first / "verify_report.json").read_bytes()
    assert report == (second / "verify_report.json").read_bytes()
    assert json.loads(report)["passed"] is True


def test_verify_quick_requires_adiabatic_and_asymptote_checks(run, tmp_path):
    assert run("verify", "--quick", "--out", str(tmp_path)) == EXIT_OK
    checks = json.loads((tmp_path / "verify_report.json").read_text(encoding="utf-8"))["checks"]
    adiabatic = [c for c in checks if c["name"].startswith("adiabatic XOR")]
    assert len(adiabatic) == 3
    assert all(c["required"] and c["passed"] for c in adiabatic)
    assert any("asymptote" in c["name"] and c["passed"] for c in checks)
