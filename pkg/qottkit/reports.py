"""
Report envelope module for qottkit.

Every CLI command emits one `ReportEnvelope`: the command line, the seed, the
parameters, a list of checks and a free-form data section. The envelope is
validated by `report.schema.json`, shipped next to this module.

Classes:
    CheckResult: One pass/fail check with its bound and tolerance.
    ReportEnvelope: The versioned report.

Functions:
    upper_bound_check: Check `value ≤ bound + tolerance`.
    lower_bound_check: Check `value ≥ bound − tolerance`.
    equality_check: Check `|value − target| ≤ tolerance`.
    render_csv: Render the checks of a report as CSV.
    load_schema: Load the shipped JSON schema.
"""

import csv
import io
import json
import logging
from importlib import resources
from typing import Any, Optional

from pydantic import Field

from qottkit._qott_model import _QottBaseModel, _encode_default

_logger = logging.getLogger(__name__)

REPORT_SCHEMA_VERSION = "qottkit.report/1"
"""Version tag written into every report and pinned by the schema."""

CSV_COLUMNS = ("name", "value", "bound", "tolerance", "passed", "expected_failure")


class CheckResult(_QottBaseModel):
    """One check of a report.

    Attributes:
        name (str): Dotted check name, e.g. `minimal.d3.masking`.
        value (float | None): Measured value.
        bound (float | None): Bound or target the value is compared with.
        tolerance (float): Slack allowed by the comparison.
        passed (bool): Whether the comparison holds.
        expected_failure (bool): The check is known to fail for these parameters
            and does not affect the exit code.
    """

    name: str
    value: Optional[float] = None
    bound: Optional[float] = None
    tolerance: float = 0.0
    passed: bool
    expected_failure: bool = False

    @property
    def ok(self) -> bool:
        return self.passed != self.expected_failure


class ReportEnvelope(_QottBaseModel):
    """A versioned, self-describing report.

    Attributes:
        schema_version (str): `REPORT_SCHEMA_VERSION`.
        command (list[str]): The command line that produced the report.
        seed (int | None): Master seed, when the command samples.
        parameters (dict[str, Any]): Parameters every bound can be re-derived from.
        checks (list[CheckResult]): The checks.
        data (dict[str, Any]): Command-specific results.
        wall_time_s (float): Elapsed wall time.
    """

    schema_version: str = REPORT_SCHEMA_VERSION
    command: list[str]
    seed: Optional[int] = None
    parameters: dict[str, Any] = {}
    checks: list[CheckResult] = Field(default_factory=list)
    data: dict[str, Any] = {}
    wall_time_s: float = 0.0

    @property
    def passed(self) -> bool:
        """True iff every check passes, ignoring expected failures that do fail."""
        return all(check.ok for check in self.checks)

    def body(self) -> dict:
        """The report as plain JSON data without the wall time."""
        payload = json.loads(self.to_json())
        payload.pop("wall_time_s", None)
        return payload


def upper_bound_check(name: str, value: float, bound: float, tolerance: float, **flags) -> CheckResult:
    return CheckResult(
        name=name,
        value=float(value),
        bound=float(bound),
        tolerance=tolerance,
        passed=bool(value <= bound + tolerance),
        **flags,
    )


def lower_bound_check(name: str, value: float, bound: float, tolerance: float, **flags) -> CheckResult:
    return CheckResult(
        name=name,
        value=float(value),
        bound=float(bound),
        tolerance=tolerance,
        passed=bool(value >= bound - tolerance),
        **flags,
    )


def equality_check(name: str, value: float, target: float, tolerance: float, **flags) -> CheckResult:
    return CheckResult(
        name=name,
        value=float(value),
        bound=float(target),
        tolerance=tolerance,
        passed=bool(abs(value - target) <= tolerance),
        **flags,
    )


def render_json(report: ReportEnvelope) -> str:
    return json.dumps(report.to_dict(), indent=2, default=_encode_default)


def render_csv(report: ReportEnvelope) -> str:
    """One row per check, in report order."""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for check in report.checks:
        writer.writerow({column: getattr(check, column) for column in CSV_COLUMNS})
    return buffer.getvalue()


def load_schema() -> dict:
    """The JSON schema of `ReportEnvelope`, as shipped with the package."""
    try:
        text = resources.files("qottkit").joinpath("report.schema.json").read_text(encoding="utf-8")
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as e:
        _logger.error(f"Error loading report schema: {e}")
        raise
