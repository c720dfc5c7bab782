"""Exact multivariate polynomials over the rationals on a named coordinate chart.

Every symbolic object in twistkit takes its coefficients from this ring. The
arithmetic is delegated to ``sympy.Poly`` over ``QQ``; this module adds the
chart bookkeeping (cross-chart operations are errors, never coercions) and the
deterministic pretty-printer shared with the text grammar in ``parsing``.
"""

import logging
import re
from fractions import Fraction
from math import prod
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

import sympy
from pydantic import BaseModel, ConfigDict, Field, field_validator
from sympy import QQ, Poly

from .errors import ChartMismatchError, DimensionMismatchError, UnknownCoordinateError

logger = logging.getLogger(__name__)

Exponent = Tuple[int, ...]
Scalar = Union[int, Fraction]

IDENTIFIER_PATTERN = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class Chart(BaseModel):
    """An ordered list of coordinate names, e.g. x1, x2, x3, p1, p2, p3."""

    model_config = ConfigDict(frozen=True)

    names: Tuple[str, ...] = Field(
        min_length=1, description="Ordered coordinate identifiers"
    )

    @field_validator("names")
    @classmethod
    def _names_are_distinct_identifiers(cls, names: Tuple[str, ...]) -> Tuple[str, ...]:
        for name in names:
            if not IDENTIFIER_PATTERN.match(name):
                raise ValueError(f"'{name}' is not a valid coordinate identifier")
        if len(set(names)) != len(names):
            raise ValueError(f"Coordinate names must be distinct: {names}")
        return names

    @property
    def dim(self) -> int:
        return len(self.names)

    @property
    def symbols(self) -> Tuple[sympy.Symbol, ...]:
        return tuple(sympy.Symbol(name) for name in self.names)

    def index(self, name: str) -> int:
        """Position of ``name`` in the chart.

        Raises:
            UnknownCoordinateError: If ``name`` is not a coordinate
        """
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownCoordinateError(name, self.names) from None

    def __contains__(self, name: object) -> bool:
        return name in self.names

    def __str__(self) -> str:
        return "(" + ", ".join(self.names) + ")"


def phase_space_chart(n: int) -> Chart:
    """The chart (x1..xn, p1..pn) of T*R^n."""
    return Chart(names=tuple(f"x{i}" for i in range(1, n + 1))
                 + tuple(f"p{i}" for i in range(1, n + 1)))


def base_chart(n: int) -> Chart:
    """The configuration chart (x1..xn)."""
    return Chart(names=tuple(f"x{i}" for i in range(1, n + 1)))


def ensure_same_chart(a: Chart, b: Chart) -> None:
    if a != b:
        raise ChartMismatchError(a.names, b.names)


def _to_fraction(value: object) -> Fraction:
    """Convert a sympy rational (or int/Fraction) coefficient to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    rational = sympy.Rational(value)
    return Fraction(int(rational.p), int(rational.q))


def format_scalar(value: Fraction) -> str:
    """Render a rational as ``n`` or ``n/d`` (no sign handling beyond Fraction's)."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class Polynomial:
    """An immutable polynomial with exact rational coefficients on a chart.

    Equality is structural: two polynomials are equal iff they live on the same
    chart and have the same canonical term map.
    """

    __slots__ = ("_chart", "_poly")

    def __init__(self, chart: Chart, poly: Poly):
        self._chart = chart
        self._poly = poly

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def zero(cls, chart: Chart) -> "Polynomial":
        return cls(chart, Poly(0, *chart.symbols, domain=QQ))

    @classmethod
    def constant(cls, chart: Chart, value: Scalar) -> "Polynomial":
        value = Fraction(value)
        return cls(chart, Poly(sympy.Rational(value.numerator, value.denominator),
                               *chart.symbols, domain=QQ))

    @classmethod
    def coordinate(cls, chart: Chart, name: str) -> "Polynomial":
        exponent = [0] * chart.dim
        exponent[chart.index(name)] = 1
        return cls.from_terms(chart, {tuple(exponent): Fraction(1)})

    @classmethod
    def from_terms(cls, chart: Chart, terms: Mapping[Exponent, Scalar]) -> "Polynomial":
        """Build from a map exponent-vector -> rational; zero coefficients are dropped."""
        rep: Dict[Exponent, sympy.Rational] = {}
        for exponent, coefficient in terms.items():
            if len(exponent) != chart.dim:
                raise DimensionMismatchError(chart.dim, len(exponent), "exponent vector")
            if any(e < 0 for e in exponent):
                raise ValueError(f"Negative exponent in {exponent}")
            coefficient = Fraction(coefficient)
            if coefficient:
                rep[tuple(exponent)] = sympy.Rational(
                    coefficient.numerator, coefficient.denominator
                )
        if not rep:
            return cls.zero(chart)
        return cls(chart, Poly.from_dict(rep, *chart.symbols, domain=QQ))

    @classmethod
    def from_expr(cls, chart: Chart, expr: sympy.Expr) -> "Polynomial":
        """Build from a sympy expression that is polynomial in the chart symbols."""
        return cls(chart, Poly(sympy.expand(expr), *chart.symbols, domain=QQ))

    # ------------------------------------------------------------------
    # Inspection
    # ------------------------------------------------------------------

    @property
    def chart(self) -> Chart:
        return self._chart

    @property
    def terms(self) -> Dict[Exponent, Fraction]:
        """Canonical term map, sorted by exponent vector."""
        if self._poly.is_zero:
            return {}
        return {
            tuple(monom): _to_fraction(coefficient)
            for monom, coefficient in sorted(self._poly.terms())
        }

    @property
    def is_zero(self) -> bool:
        return bool(self._poly.is_zero)

    @property
    def is_constant(self) -> bool:
        return bool(self._poly.is_ground)

    @property
    def total_degree(self) -> int:
        """Total degree; the zero polynomial has degree -1."""
        if self.is_zero:
            return -1
        return int(self._poly.total_degree())

    def constant_value(self) -> Fraction:
        """Value of a constant polynomial.

        Raises:
            ValueError: If the polynomial is not constant
        """
        if not self.is_constant:
            raise ValueError(f"{self} is not constant")
        return self.terms.get((0,) * self._chart.dim, Fraction(0))

    def variables(self) -> List[str]:
        """Coordinates the polynomial actually depends on, in chart order."""
        degrees = self._poly.degree_list() if not self.is_zero else ()
        return [name for name, deg in zip(self._chart.names, degrees) if deg > 0]

    def to_expr(self) -> sympy.Expr:
        return self._poly.as_expr()

    # ------------------------------------------------------------------
    # Ring operations
    # ------------------------------------------------------------------

    def _coerce(self, other: object) -> "Polynomial":
        if isinstance(other, Polynomial):
            ensure_same_chart(self._chart, other._chart)
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self._chart, other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: object) -> "Polynomial":
        other_poly = self._coerce(other)
        if other_poly is NotImplemented:
            return NotImplemented
        return Polynomial(self._chart, self._poly + other_poly._poly)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self._chart, -self._poly)

    def __sub__(self, other: object) -> "Polynomial":
        other_poly = self._coerce(other)
        if other_poly is NotImplemented:
            return NotImplemented
        return Polynomial(self._chart, self._poly - other_poly._poly)

    def __rsub__(self, other: object) -> "Polynomial":
        return -self + other

    def __mul__(self, other: object) -> "Polynomial":
        other_poly = self._coerce(other)
        if other_poly is NotImplemented:
            return NotImplemented
        return Polynomial(self._chart, self._poly * other_poly._poly)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Polynomial":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("Polynomial powers must be nonnegative integers")
        return Polynomial(self._chart, self._poly ** exponent)

    def partial(self, name: str) -> "Polynomial":
        """Formal partial derivative with respect to the coordinate ``name``."""
        index = self._chart.index(name)
        return self.partial_index(index)

    def partial_index(self, index: int) -> "Polynomial":
        return Polynomial(self._chart, self._poly.diff(self._chart.symbols[index]))

    def eval(self, point: Sequence[Union[int, Fraction, float]]) -> Union[Fraction, float]:
        """Value at ``point``; exact when every entry is an int or Fraction.

        Raises:
            DimensionMismatchError: If ``len(point) != chart.dim``
        """
        if len(point) != self._chart.dim:
            raise DimensionMismatchError(self._chart.dim, len(point))
        exact = all(isinstance(v, (int, Fraction)) for v in point)
        total: Union[Fraction, float] = Fraction(0) if exact else 0.0
        for exponent, coefficient in self.terms.items():
            monomial = prod(v ** e for v, e in zip(point, exponent) if e)
            total += (coefficient if exact else float(coefficient)) * monomial
        return total

    def pullback(self, target: Chart) -> "Polynomial":
        """Reinterpret on a chart containing every coordinate of this one."""
        if target == self._chart:
            return self
        positions = [target.index(name) for name in self._chart.names]
        lifted: Dict[Exponent, Fraction] = {}
        for exponent, coefficient in self.terms.items():
            new_exponent = [0] * target.dim
            for position, e in zip(positions, exponent):
                new_exponent[position] = e
            lifted[tuple(new_exponent)] = coefficient
        return Polynomial.from_terms(target, lifted)

    # ------------------------------------------------------------------
    # Comparison and printing
    # ------------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.is_constant and self.constant_value() == other
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._chart == other._chart and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self._chart, tuple(self.terms.items())))

    def __repr__(self) -> str:
        return f"Polynomial({self.pretty()!r} on {self._chart})"

    def __str__(self) -> str:
        return self.pretty()

    def sorted_terms(self) -> List[Tuple[Exponent, Fraction]]:
        """Terms in printing order: descending total degree, then descending lex."""
        return sorted(
            self.terms.items(),
            key=lambda item: (-sum(item[0]), tuple(-e for e in item[0])),
        )

    def monomial_text(self, exponent: Exponent) -> str:
        factors = []
        for name, e in zip(self._chart.names, exponent):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        return "*".join(factors)

    def signed_term_texts(self) -> List[Tuple[bool, str]]:
        """(is_negative, unsigned text) per term, in printing order."""
        texts = []
        for exponent, coefficient in self.sorted_terms():
            magnitude = abs(coefficient)
            monomial = self.monomial_text(exponent)
            if not monomial:
                text = format_scalar(magnitude)
            elif magnitude == 1:
                text = monomial
            else:
                text = f"{format_scalar(magnitude)}*{monomial}"
            texts.append((coefficient < 0, text))
        return texts

    def pretty(self) -> str:
        """Deterministic rendering in the shared text grammar."""
        return join_signed(self.signed_term_texts())


def join_signed(parts: Iterable[Tuple[bool, str]]) -> str:
    """Join (is_negative, text) pieces as ``a + b - c``; empty input prints ``0``."""
    out = ""
    for negative, text in parts:
        if not out:
            out = f"-{text}" if negative else text
        else:
            out += f" - {text}" if negative else f" + {text}"
    return out or "0"


def add(a: Polynomial, b: Polynomial) -> Polynomial:
    return a + b


def mul(a: Polynomial, b: Polynomial) -> Polynomial:
    return a * b


def partial(a: Polynomial, coord: str) -> Polynomial:
    return a.partial(coord)


def eval_at(a: Polynomial, point: Sequence[Union[int, Fraction, float]]) -> Union[Fraction, float]:
    return a.eval(point)
