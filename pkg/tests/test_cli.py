"""
Unit tests for the qottkit command line.

Test Coverage:
    - src: Report emission, schema conformance, determinism, CSV and --out
    - verify-maskers: Expected failures at even d and dimension range checks
    - protocol run: Honest, tamper and wrong-index runs with Monte Carlo
    - montecarlo: Repetition campaigns
    - baseline run: Classical audits
    - fixture export / fixture inspect: Round trip through a directory
    - schema: The shipped schema
    - Error handling: Invalid parameters exit with code 2
"""

import json

import jsonschema
import pytest
from pytest_mock import MockerFixture

from qottkit.cli import main
from qottkit.protocol import ProtocolService
from qottkit.reports import load_schema


def _report(capsys) -> dict:
    return json.loads(capsys.readouterr().out)


def _checks(report: dict) -> dict[str, dict]:
    return {check["name"]: check for check in report["checks"]}


# ==================== src ====================


def test_src_command(capsys):
    """
    Test that `qottkit src`:
    - Exits with 0
    - Emits a report that satisfies the schema
    - Records the command line and one check per scheme plus the twirl check
    """
    argv = ["src", "--p", "3", "--J", "1,2"]
    assert main(argv) == 0
    report = _report(capsys)
    jsonschema.validate(report, load_schema())
    assert report["command"] == argv
    assert set(_checks(report)) == {
        "src.qott",
        "src.rivest-bit",
        "src.qotp-via-rivest",
        "src.superdense",
        "twirl",
    }
    assert report["parameters"]["rivest_field"] == 3


def test_src_is_deterministic(capsys):
    argv = ["src", "--p", "5", "--J", "1,2", "--rivest-field", "7"]
    bodies = []
    for _ in range(2):
        assert main(argv) == 0
        report = _report(capsys)
        report.pop("wall_time_s")
        bodies.append(report)
    assert bodies[0] == bodies[1]


def test_src_csv_and_out(capsys, tmp_path):
    """
    Test that the output options:
    - Print CSV rows for --format csv
    - Write to --out and leave stdout empty
    """
    assert main(["src", "--p", "3", "--J", "1,2", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "name,value,bound,tolerance,passed,expected_failure"
    assert len(lines) == 6

    target = tmp_path / "src.json"
    assert main(["src", "--p", "3", "--J", "1,2", "--out", str(target)]) == 0
    assert capsys.readouterr().out == ""
    jsonschema.validate(json.loads(target.read_text()), load_schema())


def test_schema_command(capsys):
    assert main(["schema"]) == 0
    assert json.loads(capsys.readouterr().out) == load_schema()


# ==================== verify-maskers ====================


def test_verify_maskers(capsys):
    """
    Test that `qottkit verify-maskers`:
    - Exits with 0 when the only failures are the known even-d failures
    - Marks the minimal maskers at d = 2 as expected failures
    - Runs the full audit for maskers that pass
    """
    assert main(["verify-maskers", "--d", "2,3"]) == 0
    checks = _checks(_report(capsys))
    assert checks["minimal.d2.masking"]["passed"] is False
    assert checks["minimal.d2.masking"]["expected_failure"] is True
    assert checks["minimal-dual.d2.masking"]["expected_failure"] is True
    for name in ("minimal.d3", "four-qudit.d2", "qotp.d3", "minimal-dual.d3"):
        for audit in ("masking", "entropy", "duality", "qss23"):
            assert checks[f"{name}.{audit}"]["passed"], f"{name}.{audit}"


def test_verify_maskers_rejects_dimensions(capsys):
    for value in ("9", "1", ""):
        with pytest.raises(SystemExit) as exc:
            main(["verify-maskers", "--d", value])
        assert exc.value.code == 2
    capsys.readouterr()


# ==================== protocol run / montecarlo ====================


def test_protocol_run_honest(capsys, mocker: MockerFixture):
    """
    Test that `qottkit protocol run`:
    - Accepts the honest strategy with fidelity 1
    - Runs Monte Carlo only when --trials is given
    """
    spy = mocker.spy(ProtocolService, "monte_carlo")
    assert main(["protocol", "run", "--p", "3", "--J", "1,2", "--seed", "5"]) == 0
    report = _report(capsys)
    checks = _checks(report)
    assert checks["honest.accept"]["passed"]
    assert checks["honest.fidelity"]["passed"]
    assert report["data"]["transcript"]["accept"] is True
    assert spy.call_count == 0

    assert main(["protocol", "run", "--p", "3", "--J", "1,2", "--seed", "5", "--trials", "50"]) == 0
    assert "honest.montecarlo.agreement" in _checks(_report(capsys))
    assert spy.call_count == 1


def test_protocol_run_tamper(capsys):
    assert main(["protocol", "run", "--p", "3", "--J", "1,2", "--strategy", "tamper", "--seed", "2"]) == 0
    checks = _checks(_report(capsys))
    assert checks["tamper.formula"]["passed"]


def test_protocol_run_wrong_index_campaign(capsys):
    """
    Test that the wrong-index campaign at p = 5, J = {1, 2}:
    - Exits with 0
    - Keeps the Monte Carlo estimate within 1/|J| + 3σ
    - Agrees with the exact acceptance
    """
    argv = [
        "protocol", "run", "--p", "5", "--J", "1,2",
        "--strategy", "wrong-index", "--trials", "10000", "--seed", "7",
    ]
    assert main(argv) == 0
    report = _report(capsys)
    jsonschema.validate(report, load_schema())
    campaign = report["data"]["montecarlo"]
    sigma = (0.5 * 0.5 / 10000) ** 0.5
    assert campaign["estimate"] <= 0.5 + 3 * sigma
    assert campaign["trials"] == 10000
    checks = _checks(report)
    assert checks["wrong-index.exact"]["passed"]
    assert checks["wrong-index.montecarlo.agreement"]["passed"]
    assert checks["wrong-index.montecarlo.binding"]["passed"]


def test_montecarlo_repetitions(capsys):
    argv = [
        "montecarlo", "--p", "3", "--J", "1,2", "--strategy", "guess",
        "--repetitions", "3", "--trials", "200", "--seed", "3",
    ]
    assert main(argv) == 0
    report = _report(capsys)
    check = _checks(report)["guess.repetition.n3"]
    assert check["bound"] == pytest.approx(0.125)
    assert check["passed"]
    assert report["data"]["campaign"]["n"] == 3


def test_invalid_epsilon(capsys, caplog):
    """
    Test that invalid parameters:
    - Exit with 2
    - Log the error and print it to stderr
    """
    code = main(["protocol", "run", "--p", "3", "--J", "1,2", "--epsilon", "1.5"])
    assert code == 2
    assert "Error running protocol" in caplog.text
    assert "qottkit: error:" in capsys.readouterr().err

    assert main(["src", "--p", "4", "--J", "1,2"]) == 2


# ==================== baseline / fixtures ====================


def test_baseline_run(capsys):
    assert main(["baseline", "run", "--p", "5", "--message", "3", "--seed", "1"]) == 0
    checks = _checks(_report(capsys))
    for name in ("baseline.honest", "baseline.hiding", "baseline.binding", "baseline.src"):
        assert checks[name]["passed"], name


def test_fixture_export_and_inspect(capsys, tmp_path):
    """
    Test that `qottkit fixture`:
    - Exports a masker and a commodity that reload identically
    - Inspects a directory without decoding payloads
    """
    masker_dir = tmp_path / "minimal3"
    assert main(["fixture", "export", "masker", "--d", "3", str(masker_dir)]) == 0
    report = _report(capsys)
    assert _checks(report)["fixture.reload"]["passed"]
    assert set(report["data"]["files"]) == {"masker.json", "safe_state.qtk", "unitary.qtk"}

    commodity_dir = tmp_path / "qott"
    argv = ["fixture", "export", "commodity", "--p", "3", "--J", "1,2", "--seed", "4", str(commodity_dir)]
    assert main(argv) == 0
    assert _checks(_report(capsys))["fixture.reload"]["passed"]

    assert main(["fixture", "inspect", str(commodity_dir / "state.qtk")]) == 0
    header = _report(capsys)["data"]["inspect"]
    assert header["kind"] == "pure"
    assert header["labels"] == ["E", "A", "B", "K"]
