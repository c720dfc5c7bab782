"""Tests for the text-level check runners."""

import math

import pytest
from pydantic import ValidationError

from twistkit.checks import CHECKS, CheckRequest, orbit_trajectory, run
from twistkit.counterexample import EXAMPLE_ANCHORS
from twistkit.errors import ParseError, TwistkitError
from twistkit.magnetic import EXAMPLE_B, recorded_signs


@pytest.fixture
def example_request():
    def build(**fields):
        return CheckRequest(n=3, B=EXAMPLE_B, **fields)

    return build


class TestRequest:
    """Test request validation."""

    def test_defaults(self):
        request = CheckRequest()
        assert (request.n, request.B, request.density) == (3, "0", "1")

    def test_positive_dimension(self):
        with pytest.raises(ValidationError):
            CheckRequest(n=0)

    def test_positive_step(self):
        with pytest.raises(ValidationError):
            CheckRequest(step=-0.1)


class TestDispatch:
    """Test lookup and input errors."""

    def test_all_checks_registered(self):
        assert len(CHECKS) == 13
        assert {"check-twisted", "reproduce-paper", "orbit-integral"} <= set(CHECKS)

    def test_unknown_check(self):
        with pytest.raises(TwistkitError, match="Unknown check"):
            run("jacobi", CheckRequest())

    def test_missing_function(self):
        """Required fields are named in the error."""
        with pytest.raises(TwistkitError, match="'g' is required"):
            run("bracket", CheckRequest(f="x1"))

    def test_parse_error(self):
        with pytest.raises(ParseError):
            run("hamiltonian", CheckRequest(f="x1 +"))


class TestComputations:
    """Computations report their result in lhs."""

    def test_d(self):
        report = run("d", CheckRequest(form="x1*p2*dx1"))
        assert report.passed
        assert report.lhs == "-x1*dx1^dp2"
        assert report.rhs == ""

    def test_schouten(self, example_request):
        assert run("schouten", example_request()).lhs == EXAMPLE_ANCHORS["schouten"]

    def test_invert_omega(self, example_request):
        assert run("invert", example_request()).lhs == EXAMPLE_ANCHORS["pi_B"]

    def test_invert_form(self):
        report = run("invert", CheckRequest(n=1, form="dx1^dp1"))
        assert report.lhs == "@x1^@p1"

    def test_bracket(self, example_request):
        assert run("bracket", example_request(f="p1", g="p3")).lhs == "x1*x2"

    def test_hamiltonian(self, example_request):
        report = run("hamiltonian", example_request(f="x1*p2 - x2*p1"))
        assert report.lhs == EXAMPLE_ANCHORS["hamiltonian_f"]


class TestIdentityChecks:
    """Identity checks compare both sides."""

    def test_check_twisted(self, example_request):
        report = run("check-twisted", example_request())
        assert report.passed
        assert report.lhs == report.rhs == EXAMPLE_ANCHORS["schouten"]

    def test_jacobiator(self, example_request):
        report = run("jacobiator", example_request(f="p1", g="p2", h="p3"))
        assert report.passed
        assert report.lhs == "-x1"

    def test_brackets(self, example_request):
        assert run("brackets", example_request(f="p3", g="p1")).passed

    def test_liouville(self, example_request):
        report = run("liouville", example_request(f="x1*p2 - x2*p1"))
        assert report.passed
        assert report.meta["lie_derivative_omega"] == EXAMPLE_ANCHORS["lie_derivative"]

    def test_lie_poisson_so3(self):
        report = run("lie-poisson", CheckRequest())
        assert report.passed
        assert report.meta["is_lie"]
        assert report.rhs == "0"

    def test_lie_poisson_perturbed(self):
        """[e1, e2] = e3 + e1 is not a Lie algebra but stays consistent."""
        algebra = {"d": 3, "c": [[3, 1, 2, 1], [3, 2, 1, -1], [1, 2, 3, 1], [1, 3, 2, -1],
                                 [2, 3, 1, 1], [2, 1, 3, -1], [1, 1, 2, 1], [1, 2, 1, -1]]}
        report = run("lie-poisson", CheckRequest(algebra=algebra))
        assert report.passed
        assert not report.meta["is_lie"]
        assert "(1,2,3): -c2" in report.meta["jacobi_defects"]

    def test_vlasov_jacobiator(self, example_request):
        report = run("vlasov-jacobiator", example_request(f="p1", g="p2", h="p3", density="x1"))
        assert report.passed
        assert (report.lhs, report.rhs) == ("-64/3", "-64/3")

    def test_vlasov_half_width(self, example_request):
        report = run("vlasov-jacobiator",
                     example_request(f="p1", g="p2", h="p3", density="x1", half_width="1/2"))
        assert report.passed
        assert report.meta["box"][0] == ["-1/2", "1/2"]


class TestOrbitChecks:
    """Numeric checks."""

    def test_orbit_integral(self, example_request):
        report = run("orbit-integral", example_request(f="x1*p2 - x2*p1", g="x1^2", step=0.01))
        assert float(report.lhs) == pytest.approx(math.pi, abs=1e-6)
        assert set(report.meta) == {"value", "period", "step", "error_estimate"}

    def test_trajectory(self, example_request):
        request = example_request(f="x1*p2 - x2*p1", g="x1^2", start="0,1,0,0,0,0")
        trajectory = orbit_trajectory(request, 2 * math.pi, 0.01)
        assert trajectory.states[0].tolist() == [0.0, 1.0, 0.0, 0.0, 0.0, 0.0]
        assert len(trajectory.times) == 629

    def test_reproduce_worked_example(self):
        """Without B the worked example runs with its anchors."""
        report = run("reproduce-paper", CheckRequest(step=0.01))
        assert report.passed
        assert report.meta["signs"] == recorded_signs()
        assert len(report.meta["stages"]) == 13

    def test_reproduce_with_mutated_anchor(self):
        """User anchors merge over the worked-example anchors."""
        report = run("reproduce-paper", CheckRequest(anchors={"witness": "x1^2"}, step=0.01))
        assert not report.passed
        assert report.meta["failed_stage"] == "witness"
        assert (report.lhs, report.rhs) == ("-x1^2", "x1^2")

    def test_reproduce_custom_field(self):
        """An explicit B runs without anchors and reports the failing stage."""
        report = run("reproduce-paper", CheckRequest(B="dx1^dx2"))
        assert not report.passed
        assert report.meta["failed_stage"] == "witness"
