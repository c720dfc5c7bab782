"""Seeded random polynomials, forms and structure constants for property checks."""

import logging
import random
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from typing import Dict, List, Optional, Sequence

from .config import RANDOM_SEED
from .exterior import DifferentialForm
from .liealg import StructureConstants, perturb
from .poly import Chart, Polynomial, base_chart, phase_space_chart

logger = logging.getLogger(__name__)


def make_rng(seed: Optional[int] = None) -> random.Random:
    """Random generator seeded with ``seed``, or with TWISTKIT_SEED when unset.

    When neither is given, generation is nondeterministic.
    """
    if seed is None:
        seed = RANDOM_SEED
    if seed is not None:
        logger.debug(f"Random generator seeded with {seed}")
    return random.Random(seed)


def _exponents(dim: int, max_degree: int) -> List[tuple]:
    exponents = []
    for degree in range(max_degree + 1):
        for combo in combinations_with_replacement(range(dim), degree):
            exponent = [0] * dim
            for index in combo:
                exponent[index] += 1
            exponents.append(tuple(exponent))
    return exponents


def random_polynomial(
    rng: random.Random,
    chart: Chart,
    max_degree: int = 3,
    n_terms: int = 4,
    coefficient_range: int = 3,
    variables: Optional[Sequence[str]] = None,
) -> Polynomial:
    """A sparse polynomial with small integer coefficients.

    Args:
        rng: Random generator
        chart: Target chart
        max_degree: Largest total degree of a term
        n_terms: Number of terms drawn (duplicates merge)
        coefficient_range: Coefficients are drawn from [-r, r] without 0
        variables: Restrict terms to these coordinates (default: all)
    """
    allowed = [chart.index(name) for name in variables] if variables is not None else None
    pool = [
        exponent
        for exponent in _exponents(chart.dim, max_degree)
        if allowed is None or all(e == 0 or i in allowed for i, e in enumerate(exponent))
    ]
    nonzero = [c for c in range(-coefficient_range, coefficient_range + 1) if c]
    terms: Dict[tuple, Fraction] = {}
    for _ in range(n_terms):
        exponent = rng.choice(pool)
        terms[exponent] = terms.get(exponent, Fraction(0)) + rng.choice(nonzero)
    return Polynomial.from_terms(chart, terms)


def random_magnetic_form(rng: random.Random, n: int = 3, max_degree: int = 2) -> DifferentialForm:
    """A 2-form in the x-coordinates with polynomial coefficients in x only."""
    chart = phase_space_chart(n)
    positions = base_chart(n).names
    components = {
        key: random_polynomial(rng, chart, max_degree, n_terms=2, variables=positions)
        for key in combinations(range(n), 2)
    }
    return DifferentialForm(chart, 2, components)


def random_one_form(rng: random.Random, n: int = 3, max_degree: int = 3) -> DifferentialForm:
    """A 1-form A in the x-coordinates; dA is a closed magnetic form."""
    chart = phase_space_chart(n)
    positions = base_chart(n).names
    components = {
        (i,): random_polynomial(rng, chart, max_degree, n_terms=2, variables=positions)
        for i in range(n)
    }
    return DifferentialForm(chart, 1, components)


def random_perturbation(rng: random.Random, s: StructureConstants) -> StructureConstants:
    """Add a nonzero antisymmetric entry c[k][i][j] with k in {i, j}.

    On so(3) such a perturbation always breaks the Jacobi identity.
    """
    i, j = rng.sample(range(1, s.d + 1), 2)
    k = rng.choice([i, j])
    amount = rng.choice([-2, -1, 1, 2])
    logger.debug(f"Perturbing c[{k}][{i}][{j}] by {amount}")
    return perturb(s, k, i, j, amount)
