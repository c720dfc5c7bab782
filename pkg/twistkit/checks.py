"""Text-level check runners shared by the CLI and the HTTP API.

Each runner takes a ``CheckRequest`` whose symbolic fields use the text grammar
of ``twistkit.parsing`` and returns a ``Report``.
"""

import logging
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Any, Callable, Dict, List, Optional

from pydantic import BaseModel, Field

from .counterexample import EXAMPLE_ANCHORS, reproduce_counterexample
from .errors import StageFailure, TwistkitError
from .exterior import d, schouten_square
from .flows import Trajectory, orbit_line_integral, rk4_integrate
from .liealg import (
    algebra_jacobi_defect,
    dual_chart,
    dual_jacobi_defect,
    from_json,
    linear_function,
    lie_poisson,
    lie_poisson_schouten,
    so3,
)
from .magnetic import (
    PhaseSpace,
    bracket,
    check_twisted,
    eq_brackets_check,
    eq_jacobi_check,
    ham_vf,
    invert_two_form,
    liouville_check,
    make_phase_space,
    recorded_signs,
)
from .models import Report
from .parsing import parse_form, parse_point, parse_polynomial
from .poly import Polynomial, phase_space_chart
from .vlasov import Box, BoxDensity, lifted_jacobiator

logger = logging.getLogger(__name__)


class CheckRequest(BaseModel):
    """Inputs of a check, as text in the shared grammar."""

    n: int = Field(default=3, ge=1, description="Base dimension")
    B: str = Field(default="0", description="Magnetic 2-form, e.g. 'x3*dx1^dx2'")
    f: Optional[str] = Field(default=None, description="First function")
    g: Optional[str] = Field(default=None, description="Second function")
    h: Optional[str] = Field(default=None, description="Third function")
    form: Optional[str] = Field(default=None, description="Differential form for d / invert")
    density: str = Field(default="1", description="Density for vlasov-jacobiator")
    half_width: Optional[str] = Field(default=None, description="Box half width, e.g. '1' or '3/2'")
    algebra: Optional[Dict[str, Any]] = Field(
        default=None, description='Structure constants {"d": n, "c": [[k, i, j, value], ...]}; so(3) if omitted'
    )
    start: Optional[str] = Field(default=None, description="Comma-separated start state")
    step: Optional[float] = Field(default=None, gt=0, description="RK4 step")
    anchors: Optional[Dict[str, str]] = Field(
        default=None, description="Stage anchors overriding the worked-example texts (reproduce-paper)"
    )


def _required(request: CheckRequest, field: str, check: str) -> str:
    value = getattr(request, field)
    if value is None:
        raise TwistkitError(f"'{field}' is required for {check}")
    return value


def build_phase_space(request: CheckRequest) -> PhaseSpace:
    chart = phase_space_chart(request.n)
    return make_phase_space(request.n, parse_form(request.B, chart, degree=2))


def _polynomial(ps: PhaseSpace, request: CheckRequest, field: str, check: str) -> Polynomial:
    return parse_polynomial(_required(request, field, check), ps.chart)


def run_d(request: CheckRequest) -> Report:
    chart = phase_space_chart(request.n)
    form = parse_form(_required(request, "form", "d"), chart)
    result = d(form)
    return Report(check="d", passed=True, lhs=result.pretty(), rhs="", meta={"form": form.pretty()})


def run_schouten(request: CheckRequest) -> Report:
    ps = build_phase_space(request)
    result = schouten_square(ps.piB)
    return Report(check="schouten", passed=True, lhs=result.pretty(), rhs="",
                  meta={"pi_B": ps.piB.pretty()})


def run_invert(request: CheckRequest) -> Report:
    if request.form is not None:
        omega = parse_form(request.form, phase_space_chart(request.n), degree=2)
    else:
        omega = build_phase_space(request).omegaB
    pi = invert_two_form(omega)
    return Report(check="invert", passed=True, lhs=pi.pretty(), rhs="", meta={"omega": omega.pretty()})


def run_bracket(request: CheckRequest) -> Report:
    ps = build_phase_space(request)
    f, g = (_polynomial(ps, request, name, "bracket") for name in ("f", "g"))
    return Report(check="bracket", passed=True, lhs=bracket(ps, f, g).pretty(), rhs="",
                  meta={"f": f.pretty(), "g": g.pretty()})


def run_hamiltonian(request: CheckRequest) -> Report:
    ps = build_phase_space(request)
    f = _polynomial(ps, request, "f", "hamiltonian")
    return Report(check="hamiltonian", passed=True, lhs=ham_vf(ps, f).pretty(), rhs="",
                  meta={"f": f.pretty()})


def run_jacobiator(request: CheckRequest) -> Report:
    ps = build_phase_space(request)
    f, g, h = (_polynomial(ps, request, name, "jacobiator") for name in ("f", "g", "h"))
    return eq_jacobi_check(ps, f, g, h)


def run_brackets(request: CheckRequest) -> Report:
    ps = build_phase_space(request)
    f, g = (_polynomial(ps, request, name, "brackets") for name in ("f", "g"))
    return eq_brackets_check(ps, f, g)


def run_check_twisted(request: CheckRequest) -> Report:
    return check_twisted(build_phase_space(request))


def run_liouville(request: CheckRequest) -> Report:
    ps = build_phase_space(request)
    return liouville_check(ps, _polynomial(ps, request, "f", "liouville"))


def run_lie_poisson(request: CheckRequest) -> Report:
    """Lie-Poisson bivector plus the dual/algebra jacobiator comparison on basis triples."""
    s = from_json(request.algebra) if request.algebra is not None else so3()
    pi = lie_poisson(s)
    chart = dual_chart(s.d)
    coordinates = [Polynomial.coordinate(chart, name) for name in chart.names]
    consistent = True
    defects: List[str] = []
    for i, j, k in combinations_with_replacement(range(1, s.d + 1), 3):
        dual = dual_jacobi_defect(s, coordinates[i - 1], coordinates[j - 1], coordinates[k - 1])
        algebraic = linear_function(chart, algebra_jacobi_defect(s, i, j, k))
        consistent = consistent and dual == algebraic
        if not dual.is_zero:
            defects.append(f"({i},{j},{k}): {dual.pretty()}")
    schouten = lie_poisson_schouten(s)
    return Report(
        check="lie-poisson",
        passed=consistent,
        lhs=pi.pretty(),
        rhs=schouten.pretty(),
        meta={"is_lie": not defects, "jacobi_defects": defects},
    )


def run_vlasov_jacobiator(request: CheckRequest) -> Report:
    ps = build_phase_space(request)
    a, b, c = (_polynomial(ps, request, name, "vlasov-jacobiator") for name in ("f", "g", "h"))
    half_width = Fraction(request.half_width) if request.half_width is not None else None
    density = BoxDensity(f=parse_polynomial(request.density, ps.chart),
                         box=Box.symmetric(ps.chart, half_width))
    lhs, rhs = lifted_jacobiator(ps, a, b, c, density)
    return Report(
        check="vlasov-jacobiator",
        passed=lhs == rhs,
        lhs=str(lhs),
        rhs=str(rhs),
        meta={"density": density.f.pretty(), "box": [[str(lo), str(hi)] for lo, hi in density.box.bounds]},
    )


def _start(request: CheckRequest, ps: PhaseSpace) -> List[float]:
    if request.start is None:
        return [1.0] + [0.0] * (ps.chart.dim - 1)
    return parse_point(request.start, ps.chart.dim)


def run_orbit_integral(request: CheckRequest) -> Report:
    ps = build_phase_space(request)
    g = _polynomial(ps, request, "g", "orbit-integral")
    f = _polynomial(ps, request, "f", "orbit-integral")
    orbit = orbit_line_integral(g, ham_vf(ps, f), _start(request, ps), step=request.step)
    return Report(
        check="orbit-integral",
        passed=True,
        lhs=repr(orbit.value),
        rhs="",
        meta=orbit.model_dump(),
    )


def orbit_trajectory(request: CheckRequest, period: float, step: float) -> Trajectory:
    """The sampled orbit that an orbit-integral report was computed on."""
    ps = build_phase_space(request)
    f = _polynomial(ps, request, "f", "orbit-integral")
    n_steps = max(1, round(period / step))
    return rk4_integrate(ham_vf(ps, f), _start(request, ps), step, n_steps)


def run_reproduce_paper(request: CheckRequest) -> Report:
    """The counterexample chain; the worked example unless B is given explicitly."""
    B = None
    anchors = request.anchors
    if "B" in request.model_fields_set and request.B.strip() not in ("", "example"):
        B = parse_form(request.B, phase_space_chart(3), degree=2)
    elif anchors is not None:
        anchors = {**EXAMPLE_ANCHORS, **anchors}
    try:
        report = reproduce_counterexample(B, anchors=anchors, step=request.step).to_report()
    except StageFailure as e:
        return Report(
            check="reproduce-paper",
            passed=False,
            lhs=e.actual or "",
            rhs=e.expected or "",
            meta={"failed_stage": e.stage, "detail": e.detail},
        )
    report.meta["signs"] = recorded_signs()
    return report


CHECKS: Dict[str, Callable[[CheckRequest], Report]] = {
    "d": run_d,
    "schouten": run_schouten,
    "invert": run_invert,
    "bracket": run_bracket,
    "hamiltonian": run_hamiltonian,
    "jacobiator": run_jacobiator,
    "brackets": run_brackets,
    "check-twisted": run_check_twisted,
    "liouville": run_liouville,
    "lie-poisson": run_lie_poisson,
    "vlasov-jacobiator": run_vlasov_jacobiator,
    "orbit-integral": run_orbit_integral,
    "reproduce-paper": run_reproduce_paper,
}


def run(check: str, request: CheckRequest) -> Report:
    """Dispatch ``check`` by name.

    Raises:
        TwistkitError: On unknown checks or invalid inputs
    """
    runner = CHECKS.get(check)
    if runner is None:
        raise TwistkitError(f"Unknown check '{check}'. Available: {', '.join(sorted(CHECKS))}")
    logger.debug(f"Running {check} with {request.model_dump(exclude_none=True)}")
    report = runner(request)
    logger.info(f"{check}: {'pass' if report.passed else 'FAIL'}")
    return report
