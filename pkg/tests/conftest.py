"""Pytest configuration and shared fixtures for the twistkit library tests.

Fixtures provide the standard charts, the worked-example phase space and
seeded random generators so every randomized check is reproducible.
"""

from typing import Callable

import pytest
from hypothesis import HealthCheck, settings

from twistkit.generators import make_rng
from twistkit.magnetic import PhaseSpace, example_phase_space, make_phase_space
from twistkit.parsing import parse_form, parse_polynomial
from twistkit.poly import Chart, Polynomial, base_chart, phase_space_chart

# Symbolic checks are slow per example; keep property runs bounded.
settings.register_profile(
    "twistkit",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("twistkit")


@pytest.fixture
def chart() -> Chart:
    """Phase-space chart (x1, x2, x3, p1, p2, p3)."""
    return phase_space_chart(3)


@pytest.fixture
def base() -> Chart:
    """Configuration chart (x1, x2, x3)."""
    return base_chart(3)


@pytest.fixture
def example() -> PhaseSpace:
    """Phase space of the monopole field B = x2^2 dx2^dx3 + x1 x2 dx1^dx3."""
    return example_phase_space()


@pytest.fixture
def canonical() -> PhaseSpace:
    """Phase space with B = 0."""
    return make_phase_space(3)


@pytest.fixture
def uniform_monopole(chart: Chart) -> PhaseSpace:
    """B = x3 dx1^dx2, whose divergence is 1 everywhere."""
    return make_phase_space(3, parse_form("x3*dx1^dx2", chart, degree=2))


@pytest.fixture
def poly(chart: Chart) -> Callable[[str], Polynomial]:
    """Parse a polynomial on the phase-space chart."""
    return lambda text: parse_polynomial(text, chart)


@pytest.fixture
def rng():
    """Random generator with a fixed seed."""
    return make_rng(1234)
