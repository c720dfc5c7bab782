"""Tests for RK4 flows, period detection and orbit integrals."""

import io
import math

import numpy as np
import pytest

from twistkit.errors import DegreeError, DimensionMismatchError, IntegrationError
from twistkit.exterior import apply_vf
from twistkit.flows import compile_field, detect_period, max_drift, orbit_line_integral, rk4_integrate
from twistkit.generators import make_rng, random_polynomial
from twistkit.magnetic import ham_vf
from twistkit.parsing import parse_multivector

START = [1, 0, 0, 0, 0, 0]


@pytest.fixture
def rotation(example, poly):
    """H_f for the angular momentum f = x1 p2 - x2 p1: a rotation in (x1, x2) and (p1, p2)."""
    return ham_vf(example, poly("x1*p2 - x2*p1"))


class TestIntegrator:
    """Test fixed-step RK4."""

    def test_compile_field(self, rotation):
        """Components evaluate in chart order."""
        value = compile_field(rotation)(np.array([1.0, 2.0, 0, 3.0, 4.0, 0]))
        assert value.tolist() == [-2.0, 1.0, 0.0, -4.0, 3.0, 0.0]

    def test_rejects_non_vector_fields(self, chart):
        """Only degree-1 fields can be integrated."""
        with pytest.raises(DegreeError):
            compile_field(parse_multivector("@x1^@x2", chart))

    def test_quarter_turn(self, rotation):
        """After t = pi/2 the start point has rotated to (0, 1)."""
        n = 1000
        trajectory = rk4_integrate(rotation, START, math.pi / 2 / n, n)
        assert trajectory.final_state[:2] == pytest.approx([0.0, 1.0], abs=1e-10)
        assert len(trajectory.points) == n + 1

    def test_constant_field_is_exact(self, chart):
        """@x1 from 0 with step 0.1 reaches x1 = 1.0 exactly after 10 steps."""
        trajectory = rk4_integrate(parse_multivector("@x1", chart), [0] * 6, 0.1, 10)
        assert trajectory.final_state[0] == 1.0
        assert trajectory.final_state[1:].tolist() == [0.0] * 5

    def test_start_dimension(self, rotation):
        with pytest.raises(DimensionMismatchError):
            rk4_integrate(rotation, [1, 0], 0.1, 10)

    def test_nonpositive_step(self, rotation):
        with pytest.raises(ValueError):
            rk4_integrate(rotation, START, 0.0, 10)

    def test_blow_up(self, chart):
        """dx/dt = x^2 leaves the floats and is reported."""
        with pytest.raises(IntegrationError):
            rk4_integrate(parse_multivector("x1^2*@x1", chart), [10, 0, 0, 0, 0, 0], 0.5, 200)

    def test_energy_drift(self, rotation, poly):
        """f is conserved along H_f up to integration error."""
        trajectory = rk4_integrate(rotation, [1, 0, 0, 0, 1, 0], 0.01, 700)
        assert max_drift(poly("x1*p2 - x2*p1"), trajectory) < 1e-9

    def test_csv(self, rotation):
        """Header t,<coordinates>, then one row per sample."""
        buffer = io.StringIO()
        rk4_integrate(rotation, START, 0.1, 3).write_csv(buffer)
        lines = buffer.getvalue().splitlines()
        assert lines[0] == "t,x1,x2,x3,p1,p2,p3"
        assert len(lines) == 5
        assert lines[1].split(",")[:2] == ["0.0", "1.0"]


class TestPeriod:
    """Test first-return detection."""

    def test_rotation_period(self, rotation):
        """The rotation closes after 2 pi."""
        period = detect_period(rotation, START)
        assert period is not None
        assert abs(period - 2 * math.pi) < 1e-6

    def test_open_orbit(self, chart):
        """A translation never returns."""
        assert detect_period(parse_multivector("@x1", chart), START, step=0.01, max_time=2.0) is None

    def test_no_orbit_is_an_error(self, chart, poly):
        """Orbit integrals require a closed orbit."""
        with pytest.raises(IntegrationError):
            orbit_line_integral(poly("x1"), parse_multivector("@x1", chart), START, step=0.01, max_time=2.0)


class TestOrbitIntegral:
    """Test Simpson integrals over one period."""

    def test_circle(self, rotation, poly):
        """x1^2 over the unit circle integrates to pi."""
        result = orbit_line_integral(poly("x1^2"), rotation, START)
        assert result.value == pytest.approx(math.pi, abs=1e-6)
        assert abs(result.period - 2 * math.pi) < 1e-6
        assert result.error_estimate < 1e-6

    def test_step_halving(self, rotation, poly):
        """The error drops by at least 15 when the step is halved."""
        g = poly("x1^2")
        coarse = abs(orbit_line_integral(g, rotation, START, step=0.01).value - math.pi)
        fine = abs(orbit_line_integral(g, rotation, START, step=0.005).value - math.pi)
        assert coarse / fine >= 15

    @pytest.mark.parametrize("seed", range(10))
    def test_derivatives_along_the_flow_integrate_to_zero(self, seed, rotation, chart):
        """The orbit integral of H_f(h) vanishes within the error estimate."""
        h = random_polynomial(make_rng(seed), chart, max_degree=3)
        result = orbit_line_integral(apply_vf(rotation, h), rotation, START, step=0.01)
        assert abs(result.value) <= 10 * result.error_estimate + 1e-9

    def test_radius_scaling(self, rotation, poly):
        """From radius 2 the integral of x1^2 is 4 pi."""
        result = orbit_line_integral(poly("x1^2"), rotation, [2, 0, 0, 0, 0, 0], step=0.01)
        assert result.value == pytest.approx(4 * math.pi, abs=1e-5)

    def test_derivative_of_coordinate(self, rotation, poly):
        """H_f(x1) = -x2 integrates to zero over the circle."""
        result = orbit_line_integral(apply_vf(rotation, poly("x1")), rotation, START, step=0.01)
        assert abs(result.value) < 1e-6
