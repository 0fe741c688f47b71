"""
Unit tests for report envelopes.

Test Coverage:
    - upper_bound_check() / lower_bound_check() / equality_check(): Comparisons with tolerance
    - CheckResult.ok: Expected-failure semantics
    - ReportEnvelope: passed, body() and JSON schema conformance
    - render_csv(): Header and one row per check
    - load_schema(): The shipped schema and logged read errors
"""

import json

import jsonschema
import pytest
from pytest_mock import MockerFixture

from qottkit.reports import (
    CSV_COLUMNS,
    REPORT_SCHEMA_VERSION,
    CheckResult,
    ReportEnvelope,
    equality_check,
    load_schema,
    lower_bound_check,
    render_csv,
    render_json,
    upper_bound_check,
)

from .conftest import _MockData


# ==================== Checks ====================


def test_check_helpers():
    """
    Test that the check helpers:
    - Apply the tolerance on the correct side
    - Record value, bound and tolerance
    """
    assert upper_bound_check("x", 0.5 + 1e-12, 0.5, 1e-9).passed
    assert not upper_bound_check("x", 0.6, 0.5, 1e-9).passed
    assert lower_bound_check("x", 1 - 1e-12, 1.0, 1e-9).passed
    assert not lower_bound_check("x", 0.9, 1.0, 1e-9).passed

    check = equality_check("src.qott", 5.0, 5.0 + 1e-10, 1e-9)
    assert check.passed
    assert check.bound == pytest.approx(5.0 + 1e-10)
    assert check.tolerance == 1e-9


def test_expected_failure_semantics():
    """
    Test that CheckResult.ok:
    - Is true for a passing check
    - Is true for an expected failure that fails
    - Is false for an expected failure that unexpectedly passes
    """
    assert CheckResult(name="a", passed=True).ok
    assert not CheckResult(name="a", passed=False).ok
    assert CheckResult(name="a", passed=False, expected_failure=True).ok
    assert not CheckResult(name="a", passed=True, expected_failure=True).ok


# ==================== Envelope ====================


def test_envelope_passed_and_body():
    report = ReportEnvelope(
        command=["schema"],
        checks=[
            CheckResult(name="ok", passed=True),
            CheckResult(name="known", passed=False, expected_failure=True),
        ],
        wall_time_s=1.25,
    )
    assert report.schema_version == REPORT_SCHEMA_VERSION
    assert report.passed
    assert "wall_time_s" not in report.body()
    assert report.body()["checks"][1]["expected_failure"] is True

    failing = report.model_copy(update={"checks": [CheckResult(name="bad", passed=False)]})
    assert not failing.passed


def test_schema_validates_reports():
    """
    Test that the shipped schema:
    - Accepts the stored report envelopes
    - Accepts a rendered envelope
    - Rejects an envelope with an unknown field or a wrong version
    """
    schema = load_schema()
    for report in _MockData.REPORTS:
        jsonschema.validate(report, schema)

    rendered = json.loads(
        render_json(ReportEnvelope(command=["src"], checks=[equality_check("x", 1.0, 1.0, 0.0)]))
    )
    jsonschema.validate(rendered, schema)

    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate({**_MockData.REPORTS[0], "extra": 1}, schema)
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate({**_MockData.REPORTS[0], "schema_version": "qottkit.report/0"}, schema)


def test_render_csv():
    report = ReportEnvelope.model_validate(_MockData.REPORTS[1])
    lines = render_csv(report).splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 1 + len(report.checks)
    assert lines[1].startswith("minimal.d2.masking,1.0,0.0,")


def test_load_schema_logs_errors(mocker: MockerFixture):
    """
    Test that load_schema():
    - Logs and re-raises a failure to read the shipped schema
    """
    mocker.patch("qottkit.reports.resources.files", side_effect=OSError("missing"))
    mock_error = mocker.patch("qottkit.reports._logger.error")
    with pytest.raises(OSError):
        load_schema()
    mock_error.assert_called_once()
