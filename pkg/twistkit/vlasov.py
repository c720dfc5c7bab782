"""The one-species background-field Vlasov bracket on polynomial densities.

Functionals are linear, ``F_a(f) = integral of a f over a box``, so their
functional derivative is the kernel ``a`` itself and every bracket of linear
functionals is again linear. Integration over rational boxes is exact.

Term map from the multi-species Maxwell-Vlasov bracket with monopoles to the
simplified bracket implemented here (one species, unit mass and charge, c = 1,
E and B fixed background fields so F and G depend on f only):

====================================================  ==========================
full bracket term                                     simplified bracket
====================================================  ==========================
``1/m_s  int f_s {F_f, G_f}_CAN``                     kept: ``{a, b}_CAN``
``e_s/(m_s^2 c) int f_s B . (dF_f/dv x dG_f/dv)``     kept: ``B . (a_v x b_v)``
``-g_s/(m_s^2 c) int f_s E . (dF_f/dv x dG_f/dv)``    dropped: no monopole species
``4 pi e_s/m_s int f_s (G_E . dF_f/dv - ...)``        dropped: F_E = G_E = 0
``4 pi g_s/m_s int f_s (G_B . dF_f/dv - ...)``        dropped: F_B = G_B = 0
``4 pi c int (F_E . curl G_B - G_E . curl F_B)``      dropped: F_E = F_B = 0
====================================================  ==========================

For n != 3 the cross product term is written with the 2-form coefficients:
``sum_{i<j} B_ij (da/dp_i db/dp_j - da/dp_j db/dp_i)``.
"""

import logging
from fractions import Fraction
from typing import Tuple, Union

import sympy
from pydantic import BaseModel, ConfigDict, Field, field_validator

from . import config
from .errors import DimensionMismatchError, ReductionError
from .exterior import apply_vf, divergence_of_2form
from .magnetic import (
    PhaseSpace,
    base_magnetic_form,
    bracket,
    ham_vf,
    jacobi_defect,
    liouville_check,
    obstruction_field,
)
from .poly import Chart, Polynomial, ensure_same_chart

logger = logging.getLogger(__name__)


class Box(BaseModel):
    """Closed box with rational bounds, one interval per chart coordinate."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    chart: Chart
    bounds: Tuple[Tuple[Fraction, Fraction], ...] = Field(
        description="(lower, upper) per coordinate, in chart order"
    )

    @field_validator("bounds", mode="before")
    @classmethod
    def _exact_increasing(cls, bounds):
        exact = []
        for lower, upper in bounds:
            lower, upper = Fraction(lower), Fraction(upper)
            if not lower < upper:
                raise ValueError(f"Box interval [{lower}, {upper}] is empty")
            exact.append((lower, upper))
        return tuple(exact)

    def model_post_init(self, __context) -> None:
        if len(self.bounds) != self.chart.dim:
            raise DimensionMismatchError(self.chart.dim, len(self.bounds), "box bounds")

    @classmethod
    def symmetric(cls, chart: Chart, half_width: Union[int, Fraction, None] = None) -> "Box":
        """[-w, w] in every coordinate; w defaults to ``config.BOX_HALF_WIDTH``."""
        w = Fraction(half_width) if half_width is not None else config.BOX_HALF_WIDTH
        return cls(chart=chart, bounds=tuple((-w, w) for _ in chart.names))

    @property
    def volume(self) -> Fraction:
        volume = Fraction(1)
        for lower, upper in self.bounds:
            volume *= upper - lower
        return volume


class BoxDensity(BaseModel):
    """A polynomial density on a box (not required to be positive)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    f: Polynomial
    box: Box

    @classmethod
    def on_default_box(cls, f: Polynomial) -> "BoxDensity":
        return cls(f=f, box=Box.symmetric(f.chart))


class LinearFunctional(BaseModel):
    """F_a(f) = integral of a * f; its functional derivative is ``kernel``."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kernel: Polynomial

    def __call__(self, density: BoxDensity) -> Fraction:
        return integrate_box(self.kernel * density.f, density.box)


Kernel = Union[LinearFunctional, Polynomial]


def _kernel(a: Kernel) -> Polynomial:
    return a.kernel if isinstance(a, LinearFunctional) else a


def integrate_box(p: Polynomial, box: Box) -> Fraction:
    """Exact integral of ``p`` over ``box`` by monomial antiderivatives."""
    ensure_same_chart(p.chart, box.chart)
    total = Fraction(0)
    for exponent, coefficient in p.terms.items():
        term = coefficient
        for e, (lower, upper) in zip(exponent, box.bounds):
            term *= (upper ** (e + 1) - lower ** (e + 1)) / (e + 1)
        total += term
    return total


def canonical_bracket(ps: PhaseSpace, a: Polynomial, b: Polynomial) -> Polynomial:
    """{a, b}_CAN = sum_i (da/dx_i db/dp_i - da/dp_i db/dx_i)."""
    total = Polynomial.zero(ps.chart)
    for i in range(ps.n):
        x, p = i, ps.n + i
        total = total + a.partial_index(x) * b.partial_index(p) - a.partial_index(p) * b.partial_index(x)
    return total


def magnetic_term(ps: PhaseSpace, a: Polynomial, b: Polynomial) -> Polynomial:
    """B . (da/dv x db/dv), written with the 2-form coefficients of B."""
    total = Polynomial.zero(ps.chart)
    for (i, j), coefficient in ps.B.items():
        pi, pj = ps.n + i, ps.n + j
        total = total + coefficient * (
            a.partial_index(pi) * b.partial_index(pj) - a.partial_index(pj) * b.partial_index(pi)
        )
    return total


def simplified_bracket_kernel(ps: PhaseSpace, a: Kernel, b: Kernel) -> Polynomial:
    """Kernel of {F_a, F_b}: the canonical bracket plus the magnetic cross-product term."""
    a, b = _kernel(a), _kernel(b)
    ensure_same_chart(ps.chart, a.chart)
    ensure_same_chart(ps.chart, b.chart)
    return canonical_bracket(ps, a, b) + magnetic_term(ps, a, b)


def lifted_bracket(ps: PhaseSpace, a: Kernel, b: Kernel, f: BoxDensity) -> Fraction:
    """{F_a, F_b}(f), checked against the integral of f times the pi_B bracket.

    Raises:
        ReductionError: If the Vlasov kernel differs from bracket(ps, a, b)
    """
    a, b = _kernel(a), _kernel(b)
    ensure_same_chart(ps.chart, f.f.chart)
    kernel = simplified_bracket_kernel(ps, a, b)
    reduced = bracket(ps, a, b)
    if kernel != reduced:
        raise ReductionError(
            f"Vlasov kernel {kernel} differs from the phase-space bracket {reduced}"
        )
    value = integrate_box(f.f * kernel, f.box)
    if value != integrate_box(f.f * reduced, f.box):
        raise ReductionError(f"Integrals of {kernel} and {reduced} against {f.f} differ")
    return value


def lifted_bracket_functional(ps: PhaseSpace, a: Kernel, b: Kernel) -> LinearFunctional:
    """{F_a, F_b} as a linear functional (closure on linear functionals)."""
    return LinearFunctional(kernel=simplified_bracket_kernel(ps, a, b))


def _velocity_triple_product(ps: PhaseSpace, a: Polynomial, b: Polynomial, c: Polynomial) -> Polynomial:
    """dc/dv . (da/dv x db/dv) = det of the momentum gradients."""
    rows = [[function.partial_index(ps.n + i).to_expr() for i in range(3)] for function in (a, b, c)]
    return Polynomial.from_expr(ps.chart, sympy.Matrix(rows).det(method="berkowitz"))


def divergence_on_phase_space(ps: PhaseSpace) -> Polynomial:
    """div B as a function on the phase-space chart."""
    if ps.n != 3:
        raise DimensionMismatchError(3, ps.n, "base dimension")
    return divergence_of_2form(base_magnetic_form(ps)).pullback(ps.chart)


def lifted_jacobiator(
    ps: PhaseSpace, a: Kernel, b: Kernel, c: Kernel, f: BoxDensity
) -> Tuple[Fraction, Fraction]:
    """(LHS, RHS) of the simplified Vlasov jacobiator formula.

    LHS evaluates the nested lifted brackets through closure, i.e. the linear
    functional of ``jacobi_defect(a, b, c)`` on f. RHS is the integral of
    ``f (div B) dc/dv . (da/dv x db/dv)``.

    Raises:
        DimensionMismatchError: If the base dimension is not 3
        ReductionError: If the nested brackets leave the phase-space bracket
    """
    a, b, c = _kernel(a), _kernel(b), _kernel(c)
    ensure_same_chart(ps.chart, f.f.chart)
    divergence = divergence_on_phase_space(ps)
    nested = simplified_bracket_kernel(
        ps, simplified_bracket_kernel(ps, a, b), c
    ) + simplified_bracket_kernel(
        ps, simplified_bracket_kernel(ps, b, c), a
    ) + simplified_bracket_kernel(ps, simplified_bracket_kernel(ps, c, a), b)
    if nested != jacobi_defect(ps, a, b, c):
        raise ReductionError("Nested Vlasov brackets differ from the phase-space jacobiator")
    lhs = integrate_box(f.f * nested, f.box)
    rhs = integrate_box(f.f * divergence * _velocity_triple_product(ps, a, b, c), f.box)
    logger.debug(f"Lifted jacobiator for ({a}, {b}, {c}) against {f.f}: {lhs} vs {rhs}")
    if lhs != rhs:
        logger.warning(f"Lifted jacobiator mismatch: {lhs} != {rhs}")
    return lhs, rhs


def coadjoint_apply(
    ps: PhaseSpace, a: Kernel, f: BoxDensity, verify_liouville: bool = False
) -> BoxDensity:
    """The coadjoint action of a on f, i.e. the density of -H_a(f).

    With ``verify_liouville`` the Liouville invariance that licenses the
    density/function identification is checked for this kernel first.

    Raises:
        ReductionError: If the Liouville check fails
    """
    a = _kernel(a)
    ensure_same_chart(ps.chart, f.f.chart)
    if verify_liouville:
        report = liouville_check(ps, a)
        if not report.passed:
            raise ReductionError(f"H_{{{a}}} does not preserve the Liouville volume: {report.lhs}")
    return BoxDensity(f=-apply_vf(ham_vf(ps, a), f.f), box=f.box)


def nonintegrability_witness(ps: PhaseSpace, a: Kernel, b: Kernel, f: Polynomial) -> Polynomial:
    """sharp(phi(H_a, H_b, .)) applied to f: the obstruction whose orbit integral is tested."""
    a, b = _kernel(a), _kernel(b)
    ensure_same_chart(ps.chart, f.chart)
    witness = apply_vf(obstruction_field(ps, a, b), f)
    logger.debug(f"Witness for ({a}, {b}) on {f}: {witness}")
    return witness
