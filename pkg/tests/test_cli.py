"""Tests for the twistkit command line."""

import json
import math

import pytest
from typer.testing import CliRunner

from twistkit import __version__
from twistkit.cli import app
from twistkit.counterexample import EXAMPLE_ANCHORS
from twistkit.magnetic import EXAMPLE_B

runner = CliRunner()


class TestComputations:
    """Plain computations print their result only."""

    def test_schouten_of_example(self):
        result = runner.invoke(app, ["schouten", "--B", EXAMPLE_B])
        assert result.exit_code == 0, result.output
        assert result.stdout.strip() == EXAMPLE_ANCHORS["schouten"]

    def test_d(self):
        result = runner.invoke(app, ["d", "x1*p2*dx1"])
        assert result.exit_code == 0
        assert result.stdout.strip() == "-x1*dx1^dp2"

    def test_hamiltonian(self):
        result = runner.invoke(app, ["hamiltonian", "--f", "p3", "--B", EXAMPLE_B])
        assert result.stdout.strip() == EXAMPLE_ANCHORS["hamiltonian_a"]

    def test_json_report(self):
        """--json prints one report with the 'pass' key."""
        result = runner.invoke(app, ["check-twisted", "--B", EXAMPLE_B, "--json"])
        assert result.exit_code == 0
        data = json.loads(result.stdout)
        assert data["pass"] is True
        assert data["lhs"] == data["rhs"] == EXAMPLE_ANCHORS["schouten"]


class TestChecks:
    """Identity checks print both sides."""

    def test_check_twisted_zero_field(self):
        result = runner.invoke(app, ["check-twisted", "--B", "0"])
        assert result.exit_code == 0
        assert result.stdout.splitlines()[:3] == ["check-twisted: pass", "lhs: 0", "rhs: 0"]

    def test_jacobiator(self):
        result = runner.invoke(app, ["jacobiator", "--f", "p1", "--g", "p2", "--h", "p3", "--B", EXAMPLE_B])
        assert result.exit_code == 0
        assert "lhs: -x1" in result.stdout

    def test_lie_poisson(self):
        result = runner.invoke(app, ["lie-poisson"])
        assert result.exit_code == 0
        assert result.stdout.splitlines()[-1] == "Lie algebra"

    def test_vlasov_jacobiator(self):
        result = runner.invoke(
            app,
            ["vlasov-jacobiator", "--f", "p1", "--g", "p2", "--h", "p3", "--density", "x1", "--B", EXAMPLE_B],
        )
        assert result.exit_code == 0
        assert "lhs: -64/3" in result.stdout


class TestErrors:
    """Exit code 2 for bad input."""

    def test_parse_error(self):
        result = runner.invoke(app, ["hamiltonian", "--f", "x1 +"])
        assert result.exit_code == 2

    def test_unknown_coordinate(self):
        result = runner.invoke(app, ["bracket", "--f", "y1", "--g", "x1"])
        assert result.exit_code == 2

    def test_zero_denominator(self):
        result = runner.invoke(app, ["bracket", "--f", "1/0", "--g", "x1"])
        assert result.exit_code == 2
        assert not isinstance(result.exception, ZeroDivisionError)

    def test_bad_algebra_json(self):
        result = runner.invoke(app, ["lie-poisson", "--algebra", "{not json"])
        assert result.exit_code == 2


class TestOrbitIntegral:
    """Numeric orbit integrals."""

    def test_value_and_csv(self, tmp_path):
        target = tmp_path / "orbit.csv"
        result = runner.invoke(
            app,
            ["orbit-integral", "--g", "x1^2", "--f", "x1*p2 - x2*p1", "--step", "0.01", "--csv", str(target)],
        )
        assert result.exit_code == 0, result.output
        assert float(result.stdout.splitlines()[0]) == pytest.approx(math.pi, abs=1e-6)
        lines = target.read_text().splitlines()
        assert lines[0] == "t,x1,x2,x3,p1,p2,p3"
        assert len(lines) > 600


class TestReproducePaper:
    """The counterexample chain from the command line."""

    def test_worked_example(self):
        result = runner.invoke(app, ["reproduce-paper", "--step", "0.01"])
        assert result.exit_code == 0, result.output
        assert "NOT twisted Poisson on density space" in result.stdout

    def test_corrupted_anchor(self):
        """A wrong anchor fails with exit code 1."""
        result = runner.invoke(
            app, ["reproduce-paper", "--anchors", '{"phi": "x1*dx1^dx2^dx3"}', "--step", "0.01"]
        )
        assert result.exit_code == 1

    def test_anchor_file(self, tmp_path):
        """Anchors may come from a file."""
        path = tmp_path / "anchors.json"
        path.write_text(json.dumps({"witness": "x1^2"}))
        result = runner.invoke(app, ["reproduce-paper", "--anchors", str(path), "--json"])
        assert result.exit_code == 1


class TestMisc:
    """Metadata commands."""

    def test_version(self):
        result = runner.invoke(app, ["version"])
        assert result.stdout.strip() == __version__

    def test_schema(self):
        result = runner.invoke(app, ["schema"])
        assert "pass" in json.loads(result.stdout)["properties"]
