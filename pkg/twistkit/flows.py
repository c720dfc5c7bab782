"""Numerical flows of polynomial vector fields and line integrals over closed orbits.

Fields are compiled once with ``sympy.lambdify`` and integrated with the
classical fixed-step RK4 scheme on numpy arrays. A first return to the start
is detected as a sign change of ``(x - start) . X(x)`` from negative to
nonnegative, after the orbit has left the ball of radius ``10 * tol``; the
return time is refined with ``scipy.optimize.bisect`` over an RK4 substep.
"""

import csv
import logging
import math
from pathlib import Path
from typing import Callable, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np
import sympy
from pydantic import BaseModel, ConfigDict, Field
from scipy.integrate import simpson
from scipy.optimize import bisect

from . import config
from .errors import DegreeError, DimensionMismatchError, IntegrationError
from .exterior import Multivector
from .models import OrbitIntegral
from .poly import Polynomial, ensure_same_chart

logger = logging.getLogger(__name__)

FieldFunction = Callable[[np.ndarray], np.ndarray]


class Trajectory(BaseModel):
    """Uniformly sampled solution of dx/dt = X(x)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    field: Multivector = Field(description="The integrated vector field")
    times: np.ndarray = Field(description="Sample times, strictly increasing")
    states: np.ndarray = Field(description="One state row per sample time")
    step: float = Field(gt=0, description="Uniform time step")

    @property
    def points(self) -> List[Tuple[float, np.ndarray]]:
        return list(zip(self.times.tolist(), self.states))

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def write_csv(self, target: Union[str, Path, TextIO]) -> None:
        """Header ``t,<coordinates>``; floats use repr, so '.' is always the decimal mark."""
        if isinstance(target, (str, Path)):
            with open(target, "w", newline="", encoding="utf-8") as handle:
                self._write_rows(handle)
        else:
            self._write_rows(target)

    def _write_rows(self, handle: TextIO) -> None:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["t", *self.field.chart.names])
        for t, state in zip(self.times, self.states):
            writer.writerow([repr(float(t)), *(repr(float(v)) for v in state)])


def compile_field(X: Multivector) -> FieldFunction:
    """Numpy callable for the components of a vector field."""
    if X.degree != 1:
        raise DegreeError(f"Expected a vector field, got degree {X.degree}")
    chart = X.chart
    expressions = [X.component(i).to_expr() for i in range(chart.dim)]
    compiled = sympy.lambdify(chart.symbols, expressions, modules="numpy")

    def evaluate(state: np.ndarray) -> np.ndarray:
        return np.asarray(compiled(*state), dtype=float)

    return evaluate


def compile_function(g: Polynomial) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized evaluation of a polynomial over an array of state rows."""
    compiled = sympy.lambdify(g.chart.symbols, g.to_expr(), modules="numpy")

    def evaluate(states: np.ndarray) -> np.ndarray:
        values = compiled(*states.T)
        return np.broadcast_to(np.asarray(values, dtype=float), (states.shape[0],)).copy()

    return evaluate


def _rk4_increment(field: FieldFunction, state: np.ndarray, h: float) -> np.ndarray:
    k1 = field(state)
    k2 = field(state + 0.5 * h * k1)
    k3 = field(state + 0.5 * h * k2)
    k4 = field(state + h * k3)
    # average the slopes first so a constant field advances by exactly h * X
    return h * ((k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0)


def _rk4_step(field: FieldFunction, state: np.ndarray, h: float) -> np.ndarray:
    return state + _rk4_increment(field, state, h)


def _initial_state(X: Multivector, start: Sequence[float]) -> np.ndarray:
    if len(start) != X.chart.dim:
        raise DimensionMismatchError(X.chart.dim, len(start), "start state")
    return np.asarray(start, dtype=float)


def _checked(state: np.ndarray, t: float) -> np.ndarray:
    if not np.all(np.isfinite(state)):
        raise IntegrationError(f"Non-finite state encountered at t={t:.6g}")
    return state


def rk4_integrate(X: Multivector, start: Sequence[float], step: float, n_steps: int) -> Trajectory:
    """Classical fixed-step RK4 for dx/dt = X(x).

    States are accumulated with Kahan compensated summation, so a constant
    field lands exactly on ``start + n_steps * step * X`` when that is
    representable.

    Raises:
        DimensionMismatchError: If ``start`` does not match the chart
        IntegrationError: On a non-finite state
    """
    if not step > 0:
        raise ValueError(f"step must be positive, got {step}")
    if n_steps < 1:
        raise ValueError(f"n_steps must be at least 1, got {n_steps}")
    field = compile_field(X)
    state = _initial_state(X, start)
    states = np.empty((n_steps + 1, state.size))
    states[0] = state
    carry = np.zeros_like(state)
    for k in range(1, n_steps + 1):
        increment = _rk4_increment(field, state, step) - carry
        following = _checked(state + increment, k * step)
        carry = (following - state) - increment
        state = following
        states[k] = state
    times = np.arange(n_steps + 1, dtype=float) * step
    return Trajectory(field=X, times=times, states=states, step=step)


def detect_period(
    X: Multivector,
    start: Sequence[float],
    step: Optional[float] = None,
    max_time: Optional[float] = None,
    tol: Optional[float] = None,
) -> Optional[float]:
    """First return time to ``start`` within ``tol`` (max-norm), or None.

    Defaults come from ``config``: ``DEFAULT_STEP``, ``MAX_ORBIT_TIME`` and
    ``PERIOD_TOLERANCE``.
    """
    h = step if step is not None else config.DEFAULT_STEP
    limit = max_time if max_time is not None else config.MAX_ORBIT_TIME
    tolerance = tol if tol is not None else config.PERIOD_TOLERANCE
    if not h > 0 or not tolerance > 0:
        raise ValueError("step and tol must be positive")

    field = compile_field(X)
    origin = _initial_state(X, start)

    def approach_rate(state: np.ndarray) -> float:
        return float(np.dot(state - origin, field(state)))

    state, t = origin, 0.0
    rate = approach_rate(origin)
    left = False
    for k in range(1, math.ceil(limit / h) + 1):
        following = _checked(_rk4_step(field, state, h), k * h)
        next_rate = approach_rate(following)
        if not left:
            left = float(np.max(np.abs(following - origin))) > 10 * tolerance
        elif rate < 0 <= next_rate:
            if next_rate == 0:
                substep = h
            else:
                substep = bisect(
                    lambda s: approach_rate(_rk4_step(field, state, s)), 0.0, h, xtol=1e-15
                )
            candidate = _rk4_step(field, state, substep)
            distance = float(np.max(np.abs(candidate - origin)))
            if distance <= tolerance and t + substep <= limit:
                logger.debug(f"Closed orbit from {origin.tolist()}: period {t + substep!r}")
                return t + substep
            logger.debug(f"Closest approach at t={t + substep:.6g} misses start by {distance:.3g}")
        state, t, rate = following, k * h, next_rate
    logger.info(f"No return to {origin.tolist()} within t={limit}")
    return None


def _even_steps(period: float, step: float) -> int:
    n = max(2, math.ceil(period / step))
    return n + (n % 2)


def _integral_at_step(
    g: Polynomial, X: Multivector, start: Sequence[float], step: float, max_time: float, tol: float
) -> Tuple[float, float, float]:
    """(integral, period, grid step) on a uniform grid fitted to the period."""
    period = detect_period(X, start, step, max_time, tol)
    if period is None:
        raise IntegrationError(f"No closed orbit from {list(start)} within t={max_time}")
    n = _even_steps(period, step)
    # the detected period depends on the step, so detect once more on the fitted grid
    refined = detect_period(X, start, period / n, max_time, tol)
    if refined is not None:
        period = refined
    grid = period / n
    trajectory = rk4_integrate(X, start, grid, n)
    values = compile_function(g)(trajectory.states)
    return float(simpson(values, dx=grid)), period, grid


def orbit_line_integral(
    g: Polynomial,
    X: Multivector,
    start: Sequence[float],
    step: Optional[float] = None,
    max_time: Optional[float] = None,
    tol: Optional[float] = None,
) -> OrbitIntegral:
    """Integral of g over one period of the orbit of X through ``start``.

    Composite Simpson over the RK4 samples; ``error_estimate`` is the difference
    from the same computation at half the step.

    Raises:
        IntegrationError: If no closed orbit is found
    """
    ensure_same_chart(g.chart, X.chart)
    h = step if step is not None else config.DEFAULT_STEP
    limit = max_time if max_time is not None else config.MAX_ORBIT_TIME
    tolerance = tol if tol is not None else config.PERIOD_TOLERANCE

    value, period, grid = _integral_at_step(g, X, start, h, limit, tolerance)
    halved, _, _ = _integral_at_step(g, X, start, h / 2, limit, tolerance)
    error = max(abs(value - halved), 1e-12 * max(1.0, abs(value)))
    logger.info(f"Orbit integral of {g}: {value!r} over period {period!r} (error {error:.3g})")
    return OrbitIntegral(value=value, period=period, step=grid, error_estimate=error)


def max_drift(f: Polynomial, trajectory: Trajectory) -> float:
    """Largest deviation of f along a trajectory from its starting value."""
    values = compile_function(f)(trajectory.states)
    return float(np.max(np.abs(values - values[0])))
