import json

import pytest
from click.testing import CliRunner

import app
from utils.records import BoundReport


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(app.cli, ["--no-timing", *args])


def test_dim_prints_value(runner):
    result = invoke(runner, "dim", "--family", "g0plus", "--level", "35", "--weight", "2")
    assert result.exit_code == 0
    assert result.stdout == "3\n"


def test_dim_rho_is_a_fraction(runner):
    result = invoke(runner, "dim", "--family", "rho0", "--level", "22", "--weight", "2", "--format", "json")
    assert result.exit_code == 0
    assert json.loads(result.stdout) == {"family": "rho0", "N": 22, "k": 2, "value": "0"}


def test_table_csv(runner):
    result = invoke(runner, "table", "--family", "g0", "--family", "g1", "--levels", "10..12", "--weights", "2:4:2")
    assert result.exit_code == 0
    lines = result.stdout.splitlines()
    assert lines[0] == "family,N,k,value"
    assert len(lines) == 1 + 2 * 2 * 3
    assert lines[2] == "g0,11,2,1"


def test_table_json_matches_csv(runner):
    csv_lines = invoke(runner, "table", "--levels", "1..20").stdout.splitlines()[1:]
    json_rows = [json.loads(line) for line in invoke(runner, "table", "--levels", "1..20", "--format", "json").stdout.splitlines()]
    assert [",".join(str(row[key]) for key in ("family", "N", "k", "value")) for row in json_rows] == csv_lines


def test_enumerate_csv_row_count(runner):
    result = invoke(runner, "enumerate", "--family", "g0plus", "--weight", "2", "--max-dim", "100", "--format", "csv")
    assert result.exit_code == 0
    assert len(result.stdout.splitlines()) == 1 + 2965


def test_verify_oracle(runner, tmp_path):
    report = tmp_path / "oracle.json"
    result = invoke(runner, "verify", "--check", "oracle", "--group", "gamma0", "--max-level", "500",
                    "--weights", "2:8:2", "--report", str(report))
    assert result.exit_code == 0
    assert "0 mismatches" in result.stdout
    assert json.loads(report.read_text())["mismatches"] == []


def test_verify_missing_values(runner):
    result = invoke(runner, "verify", "--check", "missing-values", "--value-limit", "1000")
    assert result.exit_code == 0
    assert result.stdout.startswith("29 missing values up to 1000: [150, 180, 210")


def test_verify_failure_exits_1(runner, monkeypatch):
    def broken(self, max_level):
        return BoundReport(max_level=max_level, violations=[7], equality_set=[])

    monkeypatch.setattr(app.BennettAgent, "verify_sharp_bound", broken)
    result = invoke(runner, "verify", "--check", "bennett-bound", "--max-level", "10")
    assert result.exit_code == 1
    assert "1 violations" in result.stdout


def test_library_errors_exit_2(runner):
    result = invoke(runner, "dim", "--family", "g0", "--level", "5", "--weight", "1")
    assert result.exit_code == 2
    assert "weight" in result.stderr


def test_usage_errors_exit_2(runner):
    assert invoke(runner, "frobnicate").exit_code == 2
    assert invoke(runner, "table", "--levels", "9..3").exit_code == 2
    assert invoke(runner, "dim", "--family", "g9", "--level", "5").exit_code == 2


def test_run_returns_status(capsys):
    assert app.run(["--no-timing", "dim", "--family", "g0", "--level", "11", "--weight", "2"]) == 0
    assert capsys.readouterr().out == "1\n"
    assert app.run(["frobnicate"]) == 2
    assert "Usage" in capsys.readouterr().err
    assert app.run(["--help"]) == 0


def test_timing_footer_goes_to_stderr(runner):
    result = runner.invoke(app.cli, ["dim", "--family", "g0", "--level", "11"])
    assert result.stdout == "1\n"
    assert "elapsed" in result.stderr


def test_constants_json(runner):
    result = invoke(runner, "constants", "--cutoff-prime", "100000", "--format", "json")
    assert result.exit_code == 0
    rows = {row["name"]: row for row in map(json.loads, result.stdout.splitlines())}
    assert abs(rows["A0plus"]["value"] - 0.373956) < 1e-5
    assert rows["B1"]["digits"] >= 4


def test_coverage_text(runner):
    result = invoke(runner, "coverage", "--max-level", "132000", "--value-limit", "100")
    assert result.exit_code == 0
    assert result.stdout.startswith("least frequent 86 (13 levels), most frequent 96 (68 levels)")


def test_average_command(runner):
    result = invoke(runner, "average", "--target", "g0", "--limit", "100000")
    assert result.exit_code == 0
    ratio = float(result.stdout.split("ratio=")[1])
    assert abs(ratio - 1) < 0.01


def test_average_json(runner):
    result = invoke(runner, "average", "--target", "g0", "--limit", "1000", "--format", "json")
    assert result.exit_code == 0
    row = json.loads(result.stdout)
    assert (row["family"], row["N"], row["k"]) == ("g0", 1000, 2)
    assert 0.5 < float(row["ratio"]) < 1.5


def test_average_csv_has_ratio_column(runner):
    result = invoke(runner, "average", "--target", "g1", "--limit", "1000", "--format", "csv")
    assert result.exit_code == 0
    header, row = result.stdout.splitlines()
    assert header == "family,N,k,value,predicted,ratio"
    assert row.startswith("g1,1000,2,")


def test_dimension_at_split_prime_square(runner):
    result = invoke(runner, "dim", "--family", "g0", "--level", "25", "--weight", "2")
    assert result.exit_code == 0
    assert result.stdout == "0\n"
