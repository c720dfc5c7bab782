"""Almost Lie algebras and their Lie-Poisson bivectors on the dual space.

Structure constants use 1-based indices: ``[e_i, e_j] = sum_k c[k][i][j] e_k``.
The dual chart is (c1..cd) and the Lie-Poisson bivector has components
``pi^{ij} = sum_k c[k][i][j] c_k``, so the bracket of the linear functions
``c_i, c_j`` is the linear function of ``[e_i, e_j]``.
"""

import json
import logging
from fractions import Fraction
from itertools import product
from typing import Any, Dict, List, Mapping, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .errors import StructureConstantsError
from .exterior import Multivector, differential, pair, schouten_square
from .poly import Chart, Polynomial, ensure_same_chart

logger = logging.getLogger(__name__)

Triple = Tuple[int, int, int]


class StructureConstants(BaseModel):
    """Sparse table of an almost Lie bracket; keys are 1-based (k, i, j)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    d: int = Field(ge=1, description="Dimension of the algebra")
    entries: Dict[Triple, Fraction] = Field(
        default_factory=dict, description="Nonzero c[k][i][j], keyed by (k, i, j)"
    )

    @field_validator("entries", mode="before")
    @classmethod
    def _exact_values(cls, entries: Mapping[Triple, Any]) -> Dict[Triple, Fraction]:
        exact = {}
        for key, value in entries.items():
            value = Fraction(value)
            if value:
                exact[tuple(key)] = value
        return exact

    def value(self, k: int, i: int, j: int) -> Fraction:
        return self.entries.get((k, i, j), Fraction(0))

    def bracket_vector(self, i: int, j: int) -> List[Fraction]:
        """Coefficients of [e_i, e_j] in the basis e_1..e_d."""
        self.require_index(i, j)
        return [self.value(k, i, j) for k in range(1, self.d + 1)]

    def require_index(self, *indices: int) -> None:
        for index in indices:
            if not 1 <= index <= self.d:
                raise StructureConstantsError(
                    f"Index {index} out of range 1..{self.d}"
                )

    def check_antisymmetry(self) -> None:
        """Raise on out-of-range indices or c[k][i][j] != -c[k][j][i]."""
        for (k, i, j), value in self.entries.items():
            self.require_index(k, i, j)
            if self.value(k, j, i) != -value:
                raise StructureConstantsError(
                    f"Antisymmetry violated: c[{k}][{i}][{j}] = {value}, "
                    f"c[{k}][{j}][{i}] = {self.value(k, j, i)}"
                )

    def __hash__(self) -> int:
        return hash((self.d, tuple(sorted(self.entries.items()))))


def so3() -> StructureConstants:
    """so(3): c[k][i][j] = epsilon_{ijk}."""
    entries = {}
    for i, j, k in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
        entries[(k, i, j)] = Fraction(1)
        entries[(k, j, i)] = Fraction(-1)
    return StructureConstants(d=3, entries=entries)


def abelian(d: int) -> StructureConstants:
    return StructureConstants(d=d)


def perturb(s: StructureConstants, k: int, i: int, j: int, amount: Union[int, Fraction]) -> StructureConstants:
    """Add ``amount`` to c[k][i][j] and subtract it from c[k][j][i]."""
    s.require_index(k, i, j)
    if i == j:
        raise StructureConstantsError("Cannot perturb a diagonal entry c[k][i][i]")
    entries = dict(s.entries)
    entries[(k, i, j)] = entries.get((k, i, j), Fraction(0)) + Fraction(amount)
    entries[(k, j, i)] = entries.get((k, j, i), Fraction(0)) - Fraction(amount)
    return StructureConstants(d=s.d, entries=entries)


def from_json(data: Union[str, Mapping[str, Any]]) -> StructureConstants:
    """Read ``{"d": n, "c": [[k, i, j, value], ...]}``; values may be ints or "p/q" strings.

    Raises:
        StructureConstantsError: On malformed tables
    """
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as e:
            raise StructureConstantsError(f"Invalid structure-constant JSON: {e}") from e
    try:
        d = int(data["d"])
        entries: Dict[Triple, Fraction] = {}
        for row in data["c"]:
            k, i, j, value = row
            key = (int(k), int(i), int(j))
            entries[key] = entries.get(key, Fraction(0)) + Fraction(value)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        raise StructureConstantsError(f"Malformed structure-constant table: {e}") from e
    return StructureConstants(d=d, entries=entries)


def to_json(s: StructureConstants) -> Dict[str, Any]:
    rows = []
    for (k, i, j), value in sorted(s.entries.items()):
        rows.append([k, i, j, value.numerator if value.denominator == 1 else str(value)])
    return {"d": s.d, "c": rows}


def dual_chart(d: int) -> Chart:
    """Coordinates (c1..cd) on the dual space."""
    return Chart(names=tuple(f"c{k}" for k in range(1, d + 1)))


def linear_function(chart: Chart, vector: Sequence[Fraction]) -> Polynomial:
    """The linear function sum_l vector[l] c_l on the dual."""
    total = Polynomial.zero(chart)
    for name, coefficient in zip(chart.names, vector):
        if coefficient:
            total = total + Polynomial.coordinate(chart, name) * coefficient
    return total


def algebra_jacobi_defect(s: StructureConstants, i: int, j: int, k: int) -> List[Fraction]:
    """Components of [[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]."""
    s.require_index(i, j, k)
    s.check_antisymmetry()
    defect = [Fraction(0)] * s.d
    for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
        for m, coefficient in enumerate(s.bracket_vector(a, b), start=1):
            if not coefficient:
                continue
            for l in range(1, s.d + 1):
                defect[l - 1] += coefficient * s.value(l, m, c)
    return defect


def is_lie_algebra(s: StructureConstants) -> bool:
    return all(
        not any(algebra_jacobi_defect(s, i, j, k))
        for i, j, k in product(range(1, s.d + 1), repeat=3)
    )


def lie_poisson(s: StructureConstants) -> Multivector:
    """pi^{ij}(c) = sum_k c[k][i][j] c_k on the dual chart."""
    s.check_antisymmetry()
    chart = dual_chart(s.d)
    components = {}
    for i in range(1, s.d + 1):
        for j in range(i + 1, s.d + 1):
            coefficient = linear_function(chart, s.bracket_vector(i, j))
            if not coefficient.is_zero:
                components[(i - 1, j - 1)] = coefficient
    pi = Multivector(chart, 2, components)
    logger.debug(f"Lie-Poisson bivector: {pi}")
    return pi


def dual_bracket(s: StructureConstants, f: Polynomial, g: Polynomial) -> Polynomial:
    """{f, g}(c) = c([df(c), dg(c)])."""
    pi = lie_poisson(s)
    ensure_same_chart(pi.chart, f.chart)
    ensure_same_chart(pi.chart, g.chart)
    return pair(pi, differential(f), differential(g))


def dual_jacobi_defect(s: StructureConstants, f: Polynomial, g: Polynomial, h: Polynomial) -> Polynomial:
    """Jacobiator of the Lie-Poisson bracket."""
    pi = lie_poisson(s)
    for function in (f, g, h):
        ensure_same_chart(pi.chart, function.chart)

    def br(a: Polynomial, b: Polynomial) -> Polynomial:
        return pair(pi, differential(a), differential(b))

    return br(br(f, g), h) + br(br(g, h), f) + br(br(h, f), g)


def lie_poisson_schouten(s: StructureConstants) -> Multivector:
    """[pi, pi] of the Lie-Poisson bivector; zero exactly for Lie algebras."""
    return schouten_square(lie_poisson(s))
