import json

from typer.testing import CliRunner

from main import app

runner = CliRunner()


def test_list_shows_scenarios_and_aliases():
    result = runner.invoke(app, ["list"])
    assert result.exit_code == 0
    assert "blowup-numbers" in result.output
    assert "full-paper-suite" in result.output


def test_unknown_scenario_is_usage_error():
    result = runner.invoke(app, ["run", "no-such-scenario"])
    assert result.exit_code == 2


def test_field_and_prime_are_exclusive():
    result = runner.invoke(app, ["run", "blowup-numbers", "--field", "101", "--prime", "101"])
    assert result.exit_code == 2


def test_bad_field_is_usage_error(tmp_path):
    result = runner.invoke(app, ["run", "classify", "--field", "GF(4)", "--output", str(tmp_path / "r.txt")])
    assert result.exit_code == 2


def test_blowup_numbers_passes_and_writes_report(tmp_path):
    out = tmp_path / "blowup.txt"
    result = runner.invoke(app, ["run", "blowup-numbers", "--output", str(out)])
    assert result.exit_code == 0
    text = out.read_text(encoding="utf-8")
    assert "result: PASS" in text
    assert "sha256:" in text
    summary = json.loads((tmp_path / "blowup.txt.json").read_text(encoding="utf-8"))
    assert summary["passed"] is True
    assert summary["scenario"] == "blowup-numbers"


def test_report_checksum_is_reproducible(tmp_path):
    sums = []
    for i in range(2):
        out = tmp_path / f"r{i}.txt"
        runner.invoke(app, ["run", "blowup-numbers", "--seed", "11", "--output", str(out)])
        sums.append(json.loads((tmp_path / f"r{i}.txt.json").read_text(encoding="utf-8"))["checksum"])
    assert sums[0] == sums[1]
