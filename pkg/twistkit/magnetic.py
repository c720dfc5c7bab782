"""Magnetic phase space: omega_B, its inverse bivector pi_B and the twisted identities.

The chart is (x1..xn, p1..pn) and ``omega_B = sum_i dx_i^dp_i + B`` for a
2-form B in the x-coordinates. ``invert_two_form`` returns the bivector whose
bracket gives ``{x_i, p_i} = 1`` and ``{p_i, p_j} = B_ij``; it is the inverse of
omega_B after the momentum reflection p -> -p (DESIGN.md, decision D1).

With that convention the following global signs hold for every phase space and
every input (recomputed by ``calibrate_signs``):

* ``1/2 [pi, pi](df, dg, dh) = SIGMA_S * jacobi_defect(f, g, h)``
* ``jacobi_defect(f, g, h) = SIGMA_J * phi(H_f, H_g, H_h)``
* ``H_{f,g} + [H_f, H_g] = SIGMA_5 * sharp(phi(H_f, H_g, .))``
* ``sharp(phi(H_p3, H_p1, .))`` applied to ``x1 p2 - x2 p1`` is ``CHAIN_SIGN * x1^2``
"""

import logging
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Optional, Union

import sympy
from pydantic import BaseModel, ConfigDict, Field

from .errors import DegenerateFormError, DegreeError, MagneticFormError, UnsupportedInversionError
from .exterior import (
    DifferentialForm,
    GradedField,
    Multivector,
    apply_form,
    apply_vf,
    commutator,
    contract,
    d,
    differential,
    exterior_power,
    lie_derivative,
    pair,
    schouten_square,
    sharp,
    wedge,
    wedge_power_sharp,
)
from .models import Report
from .parsing import parse_polynomial
from .poly import Chart, Polynomial, base_chart, ensure_same_chart, phase_space_chart

logger = logging.getLogger(__name__)

SIGMA_S = -1
SIGMA_J = 1
SIGMA_5 = -1
CHAIN_SIGN = -1

#: B = x2^2 dx2^dx3 + x1 x2 dx1^dx3, the monopole field of the worked example
EXAMPLE_B = "x2^2*dx2^dx3 + x1*x2*dx1^dx3"


class PhaseSpace(BaseModel):
    """T*R^n with the magnetic form omega_B and its derived objects."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(ge=1, description="Base dimension")
    chart: Chart = Field(description="Coordinates x1..xn, p1..pn")
    B: DifferentialForm = Field(description="Magnetic 2-form on the full chart")
    omegaB: DifferentialForm = Field(description="Canonical form plus B")
    piB: Multivector = Field(description="Bivector inverse of omegaB")
    phi: DifferentialForm = Field(description="The 3-form d(omegaB) = dB")

    def coordinate(self, name: str) -> Polynomial:
        return Polynomial.coordinate(self.chart, name)

    def polynomial(self, text: str) -> Polynomial:
        return parse_polynomial(text, self.chart)


def canonical_form(n: int) -> DifferentialForm:
    """sum_i dx_i ^ dp_i."""
    chart = phase_space_chart(n)
    one = Polynomial.constant(chart, 1)
    return DifferentialForm(
        chart, 2, {(i, n + i): one for i in range(n)}
    )


def canonical_bivector(n: int) -> Multivector:
    """sum_i @x_i ^ @p_i."""
    chart = phase_space_chart(n)
    one = Polynomial.constant(chart, 1)
    return Multivector(chart, 2, {(i, n + i): one for i in range(n)})


def _magnetic_on_full_chart(n: int, B: Optional[DifferentialForm]) -> DifferentialForm:
    chart = phase_space_chart(n)
    if B is None:
        return DifferentialForm.zero(chart, 2)
    if B.degree != 2:
        raise DegreeError(f"The magnetic form must have degree 2, got {B.degree}")
    if any(name not in chart for name in B.chart.names):
        raise MagneticFormError(
            f"Magnetic form chart {B.chart} is not contained in the phase-space chart {chart}"
        )
    lifted = B.pullback(chart)
    momenta = set(range(n, 2 * n))
    for key, coefficient in lifted.items():
        if momenta.intersection(key):
            raise MagneticFormError(
                f"Magnetic form has a momentum component on {lifted.basis_text(key)}"
            )
        depends = [name for name in coefficient.variables() if chart.index(name) in momenta]
        if depends:
            raise MagneticFormError(
                f"Magnetic form coefficient {coefficient} depends on momenta {', '.join(depends)}"
            )
    return lifted


def make_phase_space(n: int, B: Optional[DifferentialForm] = None) -> PhaseSpace:
    """Build the magnetic phase space of R^n.

    Args:
        n: Base dimension
        B: 2-form on the base chart (x1..xn) or on the full chart without
           momentum components; None means B = 0

    Raises:
        MagneticFormError: If B has dp components or depends on momenta
        DegreeError: If B is not a 2-form
    """
    if n < 1:
        raise DegreeError(f"Base dimension must be positive, got {n}")
    magnetic = _magnetic_on_full_chart(n, B)
    omega = canonical_form(n) + magnetic
    pi = invert_two_form(omega)
    phi = d(omega)
    logger.debug(f"Phase space n={n}: B = {magnetic}, pi_B = {pi}, phi = {phi}")
    return PhaseSpace(n=n, chart=omega.chart, B=magnetic, omegaB=omega, piB=pi, phi=phi)


def base_magnetic_form(ps: PhaseSpace) -> DifferentialForm:
    """B re-expressed on the configuration chart (x1..xn)."""
    base = base_chart(ps.n)
    components = {}
    for key, coefficient in ps.B.items():
        terms = {exponent[: ps.n]: value for exponent, value in coefficient.terms.items()}
        components[key] = Polynomial.from_terms(base, terms)
    return DifferentialForm(base, 2, components)


@lru_cache(maxsize=1)
def example_phase_space() -> PhaseSpace:
    """The n = 3 phase space with B = x2^2 dx2^dx3 + x1 x2 dx1^dx3."""
    chart = phase_space_chart(3)
    x1, x2 = (Polynomial.coordinate(chart, name) for name in ("x1", "x2"))
    B = DifferentialForm.basis(chart, "x2", "x3", coefficient=x2 ** 2) + DifferentialForm.basis(
        chart, "x1", "x3", coefficient=x1 * x2
    )
    return make_phase_space(3, B)


def _momentum_reflection(dim: int) -> sympy.Matrix:
    half = dim // 2
    return sympy.diag(*([1] * half + [-1] * half))


def invert_two_form(omega: DifferentialForm) -> Multivector:
    """Bivector inverse of a nondegenerate 2-form with constant determinant.

    The chart is read as (positions, momenta) split in half; the adjugate inverse
    is conjugated by the momentum reflection so that canonical forms invert to
    canonical bivectors.

    Raises:
        DegenerateFormError: If the determinant is identically zero
        UnsupportedInversionError: If the determinant is not constant
    """
    if omega.degree != 2:
        raise DegreeError(f"Only 2-forms can be inverted, got degree {omega.degree}")
    chart = omega.chart
    matrix = omega.matrix()
    determinant = sympy.expand(matrix.det(method="berkowitz"))
    if determinant == 0:
        raise DegenerateFormError(f"2-form {omega} is degenerate (determinant 0)")
    if determinant.free_symbols:
        raise UnsupportedInversionError(str(determinant))
    if chart.dim % 2:
        raise DegenerateFormError(f"Odd-dimensional chart {chart} cannot carry a nondegenerate 2-form")

    reflection = _momentum_reflection(chart.dim)
    inverse = matrix.adjugate(method="berkowitz") / determinant
    bivector = (reflection * inverse * reflection).applyfunc(sympy.expand)
    components = {
        (i, j): Polynomial.from_expr(chart, bivector[i, j])
        for i in range(chart.dim)
        for j in range(i + 1, chart.dim)
    }
    pi = Multivector(chart, 2, components)
    if not is_inverse_pair(omega, pi):
        raise DegenerateFormError(f"Inversion of {omega} failed the inverse check")
    return pi


def is_inverse_pair(omega: DifferentialForm, pi: Multivector) -> bool:
    """Omega * (S pi S) = I, with S = diag(1, ..., 1, -1, ..., -1) flipping the momenta.

    ``invert_two_form`` conjugates the plain inverse by S so that {x_i, p_i} = 1
    and {p_i, p_j} = B_ij. The literal product omega * pi is -I when B = 0 and
    not +-I otherwise.
    """
    ensure_same_chart(omega.chart, pi.chart)
    reflection = _momentum_reflection(omega.chart.dim)
    product = (omega.matrix() * reflection * pi.matrix() * reflection).applyfunc(sympy.expand)
    return product == sympy.eye(omega.chart.dim)


def bracket(ps: PhaseSpace, f: Polynomial, g: Polynomial) -> Polynomial:
    """{f, g} = pi_B(df, dg)."""
    ensure_same_chart(ps.chart, f.chart)
    ensure_same_chart(ps.chart, g.chart)
    return pair(ps.piB, differential(f), differential(g))


def ham_vf(ps: PhaseSpace, f: Polynomial) -> Multivector:
    """H_f = {., f}, so that ``apply_vf(H_f, g) = bracket(g, f)``."""
    ensure_same_chart(ps.chart, f.chart)
    return -sharp(ps.piB, differential(f))


def jacobi_defect(ps: PhaseSpace, f: Polynomial, g: Polynomial, h: Polynomial) -> Polynomial:
    """{{f,g},h} + {{g,h},f} + {{h,f},g}."""
    return (
        bracket(ps, bracket(ps, f, g), h)
        + bracket(ps, bracket(ps, g, h), f)
        + bracket(ps, bracket(ps, h, f), g)
    )


def obstruction_field(ps: PhaseSpace, a: Polynomial, b: Polynomial) -> Multivector:
    """sharp(phi(H_a, H_b, .)), the failure of H to be a bracket homomorphism."""
    contracted = contract(contract(ps.phi, ham_vf(ps, a)), ham_vf(ps, b))
    return sharp(ps.piB, contracted)


def twisted_rhs(ps: PhaseSpace) -> Multivector:
    """2 * (trivector with components phi(sharp dx_i, sharp dx_j, sharp dx_k))."""
    return wedge_power_sharp(ps.piB, ps.phi) * 2


def check_twisted(ps: PhaseSpace) -> Report:
    """[pi, pi] = 2 wedge^3 sharp(phi); holds for every nondegenerate omega_B."""
    lhs = schouten_square(ps.piB)
    rhs = twisted_rhs(ps)
    passed = lhs == rhs
    if passed:
        logger.info(f"Twisted condition holds: [pi, pi] = {lhs}")
    else:
        logger.warning(f"Twisted condition fails: {lhs} != {rhs}")
    return Report(check="check-twisted", passed=passed, lhs=lhs.pretty(), rhs=rhs.pretty(),
                  meta={"n": ps.n, "B": ps.B.pretty(), "phi": ps.phi.pretty()})


def eq_jacobi_check(ps: PhaseSpace, f: Polynomial, g: Polynomial, h: Polynomial) -> Report:
    """Jacobi defect against phi(H_f, H_g, H_h) with the recorded sign SIGMA_J."""
    lhs = jacobi_defect(ps, f, g, h)
    rhs = apply_form(ps.phi, ham_vf(ps, f), ham_vf(ps, g), ham_vf(ps, h))
    passed = lhs == rhs * SIGMA_J
    if not passed:
        logger.warning(f"Twisted Jacobi identity fails for ({f}, {g}, {h}): {lhs} vs {rhs}")
    return Report(check="jacobiator", passed=passed, lhs=lhs.pretty(), rhs=rhs.pretty(),
                  meta={"sigma_J": SIGMA_J, "f": f.pretty(), "g": g.pretty(), "h": h.pretty()})


def eq_brackets_check(ps: PhaseSpace, f: Polynomial, g: Polynomial) -> Report:
    """H_{f,g} + [H_f, H_g] against sharp(phi(H_f, H_g, .)) with sign SIGMA_5."""
    lhs = ham_vf(ps, bracket(ps, f, g)) + commutator(ham_vf(ps, f), ham_vf(ps, g))
    rhs = obstruction_field(ps, f, g)
    passed = lhs == rhs * SIGMA_5
    if not passed:
        logger.warning(f"Hamiltonian bracket identity fails for ({f}, {g}): {lhs} vs {rhs}")
    return Report(check="brackets", passed=passed, lhs=lhs.pretty(), rhs=rhs.pretty(),
                  meta={"sigma_5": SIGMA_5, "f": f.pretty(), "g": g.pretty()})


def liouville_check(ps: PhaseSpace, f: Polynomial) -> Report:
    """L_{H_f}(omega_B^n) = 0, together with the factored n omega^{n-1} ^ L_{H_f} omega."""
    X = ham_vf(ps, f)
    volume = exterior_power(ps.omegaB, ps.n)
    lie_volume = lie_derivative(X, volume)
    lie_omega = lie_derivative(X, ps.omegaB)
    factored = wedge(exterior_power(ps.omegaB, ps.n - 1), lie_omega) * ps.n
    passed = lie_volume.is_zero and factored.is_zero
    if not passed:
        logger.warning(f"Liouville volume not preserved by H_{{{f}}}: {lie_volume}")
    return Report(
        check="liouville",
        passed=passed,
        lhs=lie_volume.pretty(),
        rhs="0",
        meta={
            "f": f.pretty(),
            "hamiltonian_vector_field": X.pretty(),
            "lie_derivative_omega": lie_omega.pretty(),
            "factored": factored.pretty(),
            "volume_form": volume.pretty(),
        },
    )


def energy_check(ps: PhaseSpace, f: Polynomial) -> Report:
    """H_f(f) = {f, f} = 0."""
    value = apply_vf(ham_vf(ps, f), f)
    return Report(check="energy", passed=value.is_zero, lhs=value.pretty(), rhs="0",
                  meta={"f": f.pretty()})


def relative_sign(lhs: Union[GradedField, Polynomial], rhs: Union[GradedField, Polynomial]) -> int:
    """+1 or -1 if ``lhs = +-rhs`` with rhs nonzero, else 0."""
    if rhs.is_zero:
        return 0
    if lhs == rhs:
        return 1
    if lhs == -rhs:
        return -1
    return 0


def calibrate_signs() -> Dict[str, int]:
    """Recompute the recorded global signs from the worked example."""
    ps = example_phase_space()
    x1, x2, p1, p2, p3 = (ps.coordinate(name) for name in ("x1", "x2", "p1", "p2", "p3"))
    f = x1 * p2 - x2 * p1
    defect = jacobi_defect(ps, p1, p2, p3)
    half_schouten = pair(
        schouten_square(ps.piB), differential(p1), differential(p2), differential(p3)
    ) * Fraction(1, 2)
    phi_value = apply_form(ps.phi, ham_vf(ps, p1), ham_vf(ps, p2), ham_vf(ps, p3))
    lhs5 = ham_vf(ps, bracket(ps, p3, p1)) + commutator(ham_vf(ps, p3), ham_vf(ps, p1))
    chain = apply_vf(obstruction_field(ps, p3, p1), f)
    signs = {
        "sigma_S": relative_sign(half_schouten, defect),
        "sigma_J": relative_sign(defect, phi_value),
        "sigma_5": relative_sign(lhs5, obstruction_field(ps, p3, p1)),
        "chain_sign": relative_sign(chain, x1 ** 2),
    }
    logger.debug(f"Calibrated signs: {signs}")
    return signs


def recorded_signs() -> Dict[str, int]:
    return {"sigma_S": SIGMA_S, "sigma_J": SIGMA_J, "sigma_5": SIGMA_5, "chain_sign": CHAIN_SIGN}
