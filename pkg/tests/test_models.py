"""Tests for report models and their JSON form."""

import json

import pytest
from pydantic import ValidationError

from twistkit.models import CounterexampleReport, OrbitIntegral, Report, StageResult


class TestReport:
    """Test the common report shape."""

    def test_json_uses_pass_key(self):
        """passed serializes as 'pass'."""
        report = Report(check="check-twisted", passed=True, lhs="0", rhs="0", meta={"n": 3})
        data = json.loads(report.to_json())
        assert data == {"check": "check-twisted", "pass": True, "lhs": "0", "rhs": "0", "meta": {"n": 3}}

    def test_populate_by_alias(self):
        """Reports can be read back from their JSON form."""
        report = Report.model_validate({"check": "d", "pass": False, "lhs": "dx1", "rhs": ""})
        assert not report.passed
        assert report.meta == {}

    def test_schema(self):
        """The JSON schema lists the aliased field."""
        schema = Report.model_json_schema(by_alias=True)
        assert set(schema["required"]) == {"check", "pass", "lhs", "rhs"}


class TestOrbitIntegral:
    """Test numeric result validation."""

    def test_positive_period(self):
        with pytest.raises(ValidationError):
            OrbitIntegral(value=1.0, period=0.0, step=0.1, error_estimate=0.0)

    def test_negative_error(self):
        with pytest.raises(ValidationError):
            OrbitIntegral(value=1.0, period=1.0, step=0.1, error_estimate=-1.0)


class TestCounterexampleReport:
    """Test conversion to the common report."""

    def test_to_report(self):
        """Stages and orbit land in meta."""
        report = CounterexampleReport(
            magnetic_form="x3*dx1^dx2",
            stages=[StageResult(stage="pi_B", passed=True, actual="@x1^@p1", applicable=False)],
            orbit=None,
            verdict="inconclusive",
            verdict_holds=False,
        ).to_report()
        assert not report.passed
        assert report.meta["stages"][0]["pass"] is True
        assert report.meta["stages"][0]["expected"] is None
        assert report.meta["orbit"] is None
