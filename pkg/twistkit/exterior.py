"""Graded exterior calculus with polynomial coefficients.

Differential forms and multivector fields are stored over strictly increasing
index tuples; any other index order is normalized on insertion with the sign of
the sorting permutation, and repeated indices vanish.

Sign conventions used throughout (see DESIGN.md, decision D1):

* ``contract(a, X)`` inserts ``X`` into the first slot: ``(i_X a)(Y, ...) = a(X, Y, ...)``.
* ``sharp(pi, alpha)`` inserts ``alpha`` into the first index of ``pi``:
  ``sharp(pi, alpha)^j = sum_i pi^{ij} alpha_i``.
* ``schouten_square`` uses
  ``[pi, pi]^{ijk} = 2 sum_l (pi^{il} d_l pi^{jk} + pi^{jl} d_l pi^{ki} + pi^{kl} d_l pi^{ij})``.
"""

import logging
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Type, TypeVar, Union

import sympy

from .errors import ChartMismatchError, DegreeError, DimensionMismatchError
from .poly import Chart, Polynomial, ensure_same_chart, join_signed

logger = logging.getLogger(__name__)

Key = Tuple[int, ...]
G = TypeVar("G", bound="GradedField")


def permutation_sign(indices: Sequence[int]) -> int:
    """Sign of the permutation sorting ``indices``; 0 if an index repeats."""
    if len(set(indices)) != len(indices):
        return 0
    inversions = sum(
        1
        for a in range(len(indices))
        for b in range(a + 1, len(indices))
        if indices[a] > indices[b]
    )
    return -1 if inversions % 2 else 1


class GradedField:
    """Common storage for degree-k forms and multivector fields."""

    __slots__ = ("_chart", "_degree", "_coeffs")

    #: prefix of a basis token in the text grammar
    basis_prefix = ""

    def __init__(self, chart: Chart, degree: int, coeffs: Mapping[Key, Polynomial]):
        if degree < 0:
            raise DegreeError(f"Degree must be nonnegative, got {degree}")
        stored: Dict[Key, Polynomial] = {}
        for key, coefficient in coeffs.items():
            if len(key) != degree or any(a >= b for a, b in zip(key, key[1:])):
                raise DegreeError(
                    f"Key {key} is not a strictly increasing {degree}-tuple"
                )
            if key and not 0 <= key[-1] < chart.dim or key and key[0] < 0:
                raise DimensionMismatchError(chart.dim, max(key) + 1, "index range")
            ensure_same_chart(chart, coefficient.chart)
            if not coefficient.is_zero:
                stored[key] = coefficient
        self._chart = chart
        self._degree = degree
        self._coeffs = dict(sorted(stored.items()))

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def zero(cls: Type[G], chart: Chart, degree: int) -> G:
        return cls(chart, degree, {})

    @classmethod
    def from_components(
        cls: Type[G], chart: Chart, degree: int, components: Mapping[Key, Polynomial]
    ) -> G:
        """Build from index tuples in any order, normalizing signs and summing."""
        acc: Dict[Key, Polynomial] = {}
        for indices, coefficient in components.items():
            if len(indices) != degree:
                raise DegreeError(f"Index tuple {indices} does not have length {degree}")
            sign = permutation_sign(indices)
            if sign == 0:
                continue
            key = tuple(sorted(indices))
            term = coefficient if sign > 0 else -coefficient
            acc[key] = acc[key] + term if key in acc else term
        return cls(chart, degree, acc)

    @classmethod
    def basis(cls: Type[G], chart: Chart, *names: str, coefficient: Optional[Polynomial] = None) -> G:
        """A single basis element, e.g. ``DifferentialForm.basis(chart, "x1", "p1")``."""
        coefficient = coefficient if coefficient is not None else Polynomial.constant(chart, 1)
        indices = tuple(chart.index(name) for name in names)
        return cls.from_components(chart, len(names), {indices: coefficient})

    # ------------------------------------------------------------------
    # Inspection
    # ------------------------------------------------------------------

    @property
    def chart(self) -> Chart:
        return self._chart

    @property
    def degree(self) -> int:
        return self._degree

    @property
    def coeffs(self) -> Dict[Key, Polynomial]:
        return dict(self._coeffs)

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    def component(self, *indices: int) -> Polynomial:
        """Coefficient for indices in any order (antisymmetric extension)."""
        if len(indices) != self._degree:
            raise DegreeError(f"Expected {self._degree} indices, got {len(indices)}")
        sign = permutation_sign(indices)
        if sign == 0:
            return Polynomial.zero(self._chart)
        value = self._coeffs.get(tuple(sorted(indices)))
        if value is None:
            return Polynomial.zero(self._chart)
        return value if sign > 0 else -value

    def named_component(self, *names: str) -> Polynomial:
        return self.component(*(self._chart.index(name) for name in names))

    def items(self) -> Iterable[Tuple[Key, Polynomial]]:
        return self._coeffs.items()

    # ------------------------------------------------------------------
    # Linear structure
    # ------------------------------------------------------------------

    def _check_compatible(self, other: "GradedField") -> None:
        if type(self) is not type(other):
            raise TypeError(f"Cannot combine {type(self).__name__} with {type(other).__name__}")
        ensure_same_chart(self._chart, other._chart)
        if self._degree != other._degree:
            raise DegreeError(f"Degree mismatch: {self._degree} vs {other._degree}")

    def __add__(self: G, other: G) -> G:
        self._check_compatible(other)
        acc = dict(self._coeffs)
        for key, coefficient in other._coeffs.items():
            acc[key] = acc[key] + coefficient if key in acc else coefficient
        return type(self)(self._chart, self._degree, acc)

    def __neg__(self: G) -> G:
        return type(self)(self._chart, self._degree, {k: -v for k, v in self._coeffs.items()})

    def __sub__(self: G, other: G) -> G:
        return self + (-other)

    def scale(self: G, factor: Union[Polynomial, int, Fraction]) -> G:
        if isinstance(factor, Polynomial):
            ensure_same_chart(self._chart, factor.chart)
        return type(self)(self._chart, self._degree, {k: v * factor for k, v in self._coeffs.items()})

    def __mul__(self: G, factor: Union[Polynomial, int, Fraction]) -> G:
        if not isinstance(factor, (Polynomial, int, Fraction)):
            return NotImplemented
        return self.scale(factor)

    __rmul__ = __mul__

    def pullback(self: G, target: Chart) -> G:
        """Reinterpret on a chart containing every coordinate of this one."""
        if target == self._chart:
            return self
        positions = [target.index(name) for name in self._chart.names]
        return type(self).from_components(
            target,
            self._degree,
            {tuple(positions[i] for i in key): c.pullback(target) for key, c in self._coeffs.items()},
        )

    # ------------------------------------------------------------------
    # Comparison and printing
    # ------------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if type(self) is not type(other):
            return NotImplemented
        assert isinstance(other, GradedField)
        return (
            self._chart == other._chart
            and self._degree == other._degree
            and self._coeffs == other._coeffs
        )

    def __hash__(self) -> int:
        return hash((type(self).__name__, self._chart, self._degree, tuple(self._coeffs.items())))

    def basis_text(self, key: Key) -> str:
        return "^".join(f"{self.basis_prefix}{self._chart.names[i]}" for i in key)

    def pretty(self) -> str:
        """Deterministic rendering: basis keys ascending, coefficients as in ``Polynomial``."""
        parts: List[Tuple[bool, str]] = []
        for key, coefficient in self._coeffs.items():
            basis = self.basis_text(key)
            terms = coefficient.signed_term_texts()
            if not basis:
                parts.extend(terms)
            elif len(terms) == 1:
                negative, text = terms[0]
                parts.append((negative, basis if text == "1" else f"{text}*{basis}"))
            else:
                parts.append((False, f"({coefficient.pretty()})*{basis}"))
        return join_signed(parts)

    def __str__(self) -> str:
        return self.pretty()

    def __repr__(self) -> str:
        return f"{type(self).__name__}(degree={self._degree}, {self.pretty()!r})"


class DifferentialForm(GradedField):
    """A differential k-form; basis tokens print as ``dx1^dx2``."""

    __slots__ = ()
    basis_prefix = "d"

    @classmethod
    def function(cls, f: Polynomial) -> "DifferentialForm":
        return cls(f.chart, 0, {(): f})

    def to_polynomial(self) -> Polynomial:
        if self._degree != 0:
            raise DegreeError(f"Only 0-forms are functions, got degree {self._degree}")
        return self._coeffs.get((), Polynomial.zero(self._chart))

    def matrix(self) -> sympy.Matrix:
        """Skew coefficient matrix ``omega_{ij}`` of a 2-form."""
        return _skew_matrix(self)


class Multivector(GradedField):
    """A multivector field; basis tokens print as ``@x1^@p1`` (``@x`` is d/dx)."""

    __slots__ = ()
    basis_prefix = "@"

    @classmethod
    def vector_field(cls, chart: Chart, components: Mapping[str, Polynomial]) -> "Multivector":
        return cls(chart, 1, {(chart.index(name),): value for name, value in components.items()})

    def matrix(self) -> sympy.Matrix:
        """Skew coefficient matrix ``pi^{ij}`` of a bivector."""
        return _skew_matrix(self)

    def at(self, name: str) -> Polynomial:
        """Component of a vector field along d/d``name``."""
        return self.named_component(name)


#: degree-1 multivector
VectorField = Multivector


def _skew_matrix(field: GradedField) -> sympy.Matrix:
    if field.degree != 2:
        raise DegreeError(f"Pairing matrices need degree 2, got {field.degree}")
    n = field.chart.dim
    return sympy.Matrix(n, n, lambda i, j: field.component(i, j).to_expr())


def _require_degree(field: GradedField, degree: int, what: str) -> None:
    if field.degree != degree:
        raise DegreeError(f"{what} must have degree {degree}, got {field.degree}")


def _require_vector_field(X: GradedField) -> None:
    if not isinstance(X, Multivector) or X.degree != 1:
        raise DegreeError("Expected a vector field (multivector of degree 1)")


# ----------------------------------------------------------------------
# Operations
# ----------------------------------------------------------------------


def differential(f: Polynomial) -> DifferentialForm:
    """The 1-form df."""
    return d(DifferentialForm.function(f))


def wedge(a: G, b: G) -> G:
    """Exterior product; graded-commutative and associative."""
    if type(a) is not type(b):
        raise TypeError(f"Cannot wedge {type(a).__name__} with {type(b).__name__}")
    ensure_same_chart(a.chart, b.chart)
    components: Dict[Key, Polynomial] = {}
    for key_a, coeff_a in a.items():
        for key_b, coeff_b in b.items():
            merged = key_a + key_b
            sign = permutation_sign(merged)
            if sign == 0:
                continue
            key = tuple(sorted(merged))
            term = coeff_a * coeff_b if sign > 0 else -(coeff_a * coeff_b)
            components[key] = components[key] + term if key in components else term
    return type(a)(a.chart, a.degree + b.degree, components)


def exterior_power(a: G, k: int) -> G:
    """k-fold wedge power; ``k = 0`` gives the constant 1."""
    if k < 0:
        raise ValueError("Exterior powers need k >= 0")
    result = type(a)(a.chart, 0, {(): Polynomial.constant(a.chart, 1)})
    for _ in range(k):
        result = wedge(result, a)
    return result


def d(a: DifferentialForm) -> DifferentialForm:
    """Exterior derivative; top-degree input gives the zero form of degree dim + 1."""
    if not isinstance(a, DifferentialForm):
        raise TypeError("d is defined on differential forms")
    components: Dict[Key, Polynomial] = {}
    for key, coefficient in a.items():
        for l in range(a.chart.dim):
            if l in key:
                continue
            derivative = coefficient.partial_index(l)
            if derivative.is_zero:
                continue
            position = sum(1 for i in key if i < l)
            new_key = key[:position] + (l,) + key[position:]
            term = derivative if position % 2 == 0 else -derivative
            components[new_key] = components[new_key] + term if new_key in components else term
    return DifferentialForm(a.chart, a.degree + 1, components)


def contract(a: DifferentialForm, X: Multivector) -> DifferentialForm:
    """Interior product i_X a, inserting X into the first slot."""
    _require_vector_field(X)
    ensure_same_chart(a.chart, X.chart)
    if a.degree == 0:
        raise DegreeError("Cannot contract a 0-form")
    vector = {key[0]: value for key, value in X.items()}
    components: Dict[Key, Polynomial] = {}
    for key, coefficient in a.items():
        for position, index in enumerate(key):
            component = vector.get(index)
            if component is None:
                continue
            new_key = key[:position] + key[position + 1:]
            term = component * coefficient
            if position % 2:
                term = -term
            components[new_key] = components[new_key] + term if new_key in components else term
    return DifferentialForm(a.chart, a.degree - 1, components)


def apply_form(a: DifferentialForm, *fields: Multivector) -> Polynomial:
    """Full evaluation a(X1, ..., Xk); totally antisymmetric in the arguments."""
    if len(fields) != a.degree:
        raise DegreeError(f"A {a.degree}-form needs {a.degree} vector fields, got {len(fields)}")
    result = a
    for X in fields:
        result = contract(result, X)
    return result.to_polynomial()


def contract_multivector(T: Multivector, alpha: DifferentialForm) -> Multivector:
    """Insert a 1-form into the first slot of a multivector."""
    _require_degree(alpha, 1, "alpha")
    ensure_same_chart(T.chart, alpha.chart)
    if T.degree == 0:
        raise DegreeError("Cannot contract a degree-0 multivector")
    covector = {key[0]: value for key, value in alpha.items()}
    components: Dict[Key, Polynomial] = {}
    for key, coefficient in T.items():
        for position, index in enumerate(key):
            component = covector.get(index)
            if component is None:
                continue
            new_key = key[:position] + key[position + 1:]
            term = component * coefficient
            if position % 2:
                term = -term
            components[new_key] = components[new_key] + term if new_key in components else term
    return Multivector(T.chart, T.degree - 1, components)


def pair(T: Multivector, *forms: DifferentialForm) -> Polynomial:
    """Full evaluation T(alpha1, ..., alphak) of a multivector on 1-forms."""
    if len(forms) != T.degree:
        raise DegreeError(f"A degree-{T.degree} multivector needs {T.degree} 1-forms, got {len(forms)}")
    result = T
    for alpha in forms:
        result = contract_multivector(result, alpha)
    return result.coeffs.get((), Polynomial.zero(T.chart))


def apply_vf(X: Multivector, f: Polynomial) -> Polynomial:
    """Directional derivative sum_i X^i df/dx_i."""
    _require_vector_field(X)
    ensure_same_chart(X.chart, f.chart)
    total = Polynomial.zero(f.chart)
    for (index,), component in X.items():
        total = total + component * f.partial_index(index)
    return total


def sharp(pi: Multivector, alpha: DifferentialForm) -> Multivector:
    """Bundle map of a bivector, alpha inserted into the first index of pi."""
    _require_degree(pi, 2, "pi")
    _require_degree(alpha, 1, "alpha")
    ensure_same_chart(pi.chart, alpha.chart)
    covector = {key[0]: value for key, value in alpha.items()}
    components: Dict[Key, Polynomial] = {}
    for (i, j), coefficient in pi.items():
        # pi^{ij} = c and pi^{ji} = -c
        if i in covector:
            term = coefficient * covector[i]
            components[(j,)] = components[(j,)] + term if (j,) in components else term
        if j in covector:
            term = -(coefficient * covector[j])
            components[(i,)] = components[(i,)] + term if (i,) in components else term
    return Multivector(pi.chart, 1, components)


def flat(omega: DifferentialForm, X: Multivector) -> DifferentialForm:
    """Bundle map of a 2-form, X inserted into the first slot."""
    _require_degree(omega, 2, "omega")
    return contract(omega, X)


def lie_derivative(X: Multivector, a: DifferentialForm) -> DifferentialForm:
    """Cartan formula L_X = i_X d + d i_X; on functions L_X f = X(f)."""
    _require_vector_field(X)
    ensure_same_chart(X.chart, a.chart)
    if a.degree == 0:
        return DifferentialForm.function(apply_vf(X, a.to_polynomial()))
    return contract(d(a), X) + d(contract(a, X))


def commutator(X: Multivector, Y: Multivector) -> Multivector:
    """Jacobi-Lie bracket [X, Y]^k = X(Y^k) - Y(X^k)."""
    _require_vector_field(X)
    _require_vector_field(Y)
    ensure_same_chart(X.chart, Y.chart)
    chart = X.chart
    components: Dict[Key, Polynomial] = {}
    for k in range(chart.dim):
        value = apply_vf(X, Y.component(k)) - apply_vf(Y, X.component(k))
        if not value.is_zero:
            components[(k,)] = value
    return Multivector(chart, 1, components)


def schouten_square(pi: Multivector) -> Multivector:
    """[pi, pi] of a bivector via the coordinate formula in the module docstring."""
    _require_degree(pi, 2, "pi")
    chart = pi.chart
    n = chart.dim
    entries = [[pi.component(i, j) for j in range(n)] for i in range(n)]
    derivatives: Dict[Tuple[int, int, int], Polynomial] = {}

    def d_entry(l: int, i: int, j: int) -> Polynomial:
        if (l, i, j) not in derivatives:
            derivatives[(l, i, j)] = entries[i][j].partial_index(l)
        return derivatives[(l, i, j)]

    components: Dict[Key, Polynomial] = {}
    for i, j, k in combinations(range(n), 3):
        total = Polynomial.zero(chart)
        for l in range(n):
            for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                if entries[a][l].is_zero:
                    continue
                derivative = d_entry(l, b, c)
                if not derivative.is_zero:
                    total = total + entries[a][l] * derivative
        if not total.is_zero:
            components[(i, j, k)] = total * 2
    return Multivector(chart, 3, components)


def wedge_power_sharp(pi: Multivector, phi: DifferentialForm) -> Multivector:
    """The multivector with components phi(sharp dx_i, sharp dx_j, ...)."""
    _require_degree(pi, 2, "pi")
    ensure_same_chart(pi.chart, phi.chart)
    chart = pi.chart
    if phi.is_zero:
        return Multivector.zero(chart, phi.degree)
    images = [
        sharp(pi, DifferentialForm.basis(chart, name)) for name in chart.names
    ]
    components: Dict[Key, Polynomial] = {}
    for key in combinations(range(chart.dim), phi.degree):
        value = apply_form(phi, *(images[i] for i in key))
        if not value.is_zero:
            components[key] = value
    return Multivector(chart, phi.degree, components)


def divergence_of_2form(B: DifferentialForm) -> Polynomial:
    """The polynomial p with dB = p dx1^dx2^dx3 on a 3-coordinate chart."""
    if B.chart.dim != 3:
        raise DimensionMismatchError(3, B.chart.dim, "chart")
    _require_degree(B, 2, "B")
    return d(B).coeffs.get((0, 1, 2), Polynomial.zero(B.chart))
