"""Tests for the magnetic phase space and its twisted identities."""

from fractions import Fraction

import pytest
import sympy

from twistkit.counterexample import EXAMPLE_ANCHORS
from twistkit.errors import DegenerateFormError, MagneticFormError, UnsupportedInversionError
from twistkit.exterior import apply_vf, d, differential, pair, schouten_square
from twistkit.generators import make_rng, random_magnetic_form, random_one_form, random_polynomial
from twistkit.magnetic import (
    CHAIN_SIGN,
    SIGMA_5,
    SIGMA_J,
    SIGMA_S,
    base_magnetic_form,
    bracket,
    calibrate_signs,
    canonical_bivector,
    canonical_form,
    check_twisted,
    energy_check,
    eq_brackets_check,
    eq_jacobi_check,
    ham_vf,
    invert_two_form,
    is_inverse_pair,
    jacobi_defect,
    liouville_check,
    make_phase_space,
    recorded_signs,
)
from twistkit.parsing import parse_form
from twistkit.poly import phase_space_chart


def triple(seed, chart, max_degree=2):
    rng = make_rng(seed)
    return tuple(random_polynomial(rng, chart, max_degree=max_degree, n_terms=3) for _ in range(3))


class TestExampleAnchors:
    """The worked example prints exactly as displayed."""

    def test_bivector(self, example):
        """pi_B of the monopole field."""
        assert example.piB.pretty() == EXAMPLE_ANCHORS["pi_B"]

    def test_phi(self, example):
        """phi = dB = -x1 dx1^dx2^dx3."""
        assert example.phi.pretty() == EXAMPLE_ANCHORS["phi"]

    def test_hamiltonian_fields(self, example, poly):
        """H_f for the angular momentum and the momenta p3, p1."""
        assert ham_vf(example, poly("x1*p2 - x2*p1")).pretty() == EXAMPLE_ANCHORS["hamiltonian_f"]
        assert ham_vf(example, poly("p3")).pretty() == EXAMPLE_ANCHORS["hamiltonian_a"]
        assert ham_vf(example, poly("p1")).pretty() == EXAMPLE_ANCHORS["hamiltonian_b"]

    def test_base_magnetic_form(self, example):
        """B restricted to the base chart keeps its coefficients."""
        assert base_magnetic_form(example).pretty() == "x1*x2*dx1^dx3 + x2^2*dx2^dx3"


class TestInversion:
    """Test the bivector inverse of omega_B."""

    def test_canonical_inverts_to_canonical(self):
        """sum dx_i^dp_i inverts to sum @x_i^@p_i."""
        assert invert_two_form(canonical_form(3)) == canonical_bivector(3)

    def test_inverse_pair_check(self, example):
        """omega_B and pi_B pass the inverse check."""
        assert is_inverse_pair(example.omegaB, example.piB)

    def test_inverse_pair_uses_momentum_reflection(self, example):
        """The check is omega (S pi S) = I, so only the reflected inverse passes."""
        assert example.omegaB.matrix() * example.piB.matrix() != sympy.eye(6)
        assert not is_inverse_pair(example.omegaB, -example.piB)

    def test_brackets_of_coordinates(self, example, poly):
        """{x_i, p_i} = 1 and {p_i, p_j} = B_ij."""
        assert bracket(example, poly("x1"), poly("p1")) == 1
        assert bracket(example, poly("x1"), poly("p2")) == 0
        assert bracket(example, poly("p1"), poly("p3")) == poly("x1*x2")
        assert bracket(example, poly("p2"), poly("p3")) == poly("x2^2")

    def test_degenerate_form(self):
        """A 2-form with zero determinant cannot be inverted."""
        chart = phase_space_chart(2)
        with pytest.raises(DegenerateFormError):
            invert_two_form(parse_form("dx1^dx2", chart))

    def test_nonconstant_determinant(self):
        """Inverses with rational-function coefficients are not supported."""
        chart = phase_space_chart(2)
        with pytest.raises(UnsupportedInversionError):
            invert_two_form(parse_form("x1*dx1^dp1 + dx2^dp2", chart))


class TestPhaseSpace:
    """Test construction and validation of magnetic forms."""

    def test_momentum_components_rejected(self, chart):
        """B must not have dp components."""
        with pytest.raises(MagneticFormError):
            make_phase_space(3, parse_form("dx1^dp1", chart))

    def test_momentum_dependence_rejected(self, chart):
        """B coefficients must not depend on momenta."""
        with pytest.raises(MagneticFormError):
            make_phase_space(3, parse_form("p1*dx1^dx2", chart))

    def test_base_chart_form_accepted(self, base):
        """B may be given on the configuration chart."""
        ps = make_phase_space(3, parse_form("x3*dx1^dx2", base))
        assert ps.B.pretty() == "x3*dx1^dx2"
        assert ps.phi.pretty() == "dx1^dx2^dx3"

    def test_canonical_phase_space(self, canonical):
        """B = 0 gives the canonical structure and phi = 0."""
        assert canonical.piB == canonical_bivector(3)
        assert canonical.phi.is_zero


class TestTwistedCondition:
    """[pi, pi] = 2 wedge^3 sharp(phi)."""

    def test_example(self, example):
        """Holds with both sides 2 x1 @p1^@p2^@p3."""
        report = check_twisted(example)
        assert report.passed
        assert report.lhs == EXAMPLE_ANCHORS["schouten"]
        assert report.rhs == report.lhs

    def test_zero_field(self, canonical):
        """B = 0: both sides are 0."""
        report = check_twisted(canonical)
        assert report.passed
        assert (report.lhs, report.rhs) == ("0", "0")

    @pytest.mark.parametrize("seed", range(10))
    def test_random_magnetic_forms(self, seed):
        """Holds for random degree-2 magnetic forms, closed or not."""
        B = random_magnetic_form(make_rng(seed), n=3, max_degree=2)
        assert check_twisted(make_phase_space(3, B)).passed

    def test_two_dimensional_base(self):
        """n = 2 has no 3-forms on the base, so pi_B is Poisson."""
        chart = phase_space_chart(2)
        report = check_twisted(make_phase_space(2, parse_form("x1*x2*dx1^dx2", chart)))
        assert report.passed
        assert report.lhs == "0"


class TestJacobi:
    """Jacobi defect and its twisted form."""

    def test_example_defect(self, example, poly):
        """J(p1, p2, p3) = -x1."""
        assert jacobi_defect(example, poly("p1"), poly("p2"), poly("p3")) == poly("-x1")

    @pytest.mark.parametrize("seed", range(10))
    def test_closed_field_recovers_jacobi(self, seed, chart):
        """B = dA is closed, so the bracket is Poisson."""
        rng = make_rng(seed)
        ps = make_phase_space(3, d(random_one_form(rng, n=3, max_degree=2)))
        for _ in range(2):
            f, g, h = (random_polynomial(rng, chart, max_degree=2, n_terms=3) for _ in range(3))
            assert jacobi_defect(ps, f, g, h).is_zero

    @pytest.mark.parametrize("seed", range(20))
    def test_twisted_jacobi(self, seed, example, chart):
        """J(f, g, h) = SIGMA_J phi(H_f, H_g, H_h) for cubic triples."""
        report = eq_jacobi_check(example, *triple(seed, chart, max_degree=3))
        assert report.passed, report
        assert report.meta["sigma_J"] == SIGMA_J

    @pytest.mark.parametrize("seed", range(20))
    def test_hamiltonian_brackets(self, seed, example, chart):
        """H_{f,g} + [H_f, H_g] = SIGMA_5 sharp(phi(H_f, H_g, .))."""
        f, g, _ = triple(seed, chart)
        assert eq_brackets_check(example, f, g).passed

    @pytest.mark.parametrize("seed", range(6))
    def test_schouten_pairing(self, seed, chart):
        """1/2 [pi, pi](df, dg, dh) = SIGMA_S J(f, g, h) for random B."""
        rng = make_rng(seed)
        ps = make_phase_space(3, random_magnetic_form(rng, n=3, max_degree=2))
        schouten = schouten_square(ps.piB)
        for _ in range(3):
            f, g, h = (random_polynomial(rng, chart, max_degree=2, n_terms=3) for _ in range(3))
            paired = pair(schouten, differential(f), differential(g), differential(h))
            assert paired * Fraction(1, 2) == jacobi_defect(ps, f, g, h) * SIGMA_S

    def test_uniform_monopole(self, uniform_monopole, poly):
        """With div B = 1 the momentum triple has defect of magnitude 1."""
        defect = jacobi_defect(uniform_monopole, poly("p1"), poly("p2"), poly("p3"))
        assert defect.is_constant
        assert abs(defect.constant_value()) == 1


class TestLiouville:
    """Liouville volume and energy conservation."""

    def test_example(self, example, poly):
        """H_f preserves omega_B^3; L_{H_f} omega_B is as displayed."""
        report = liouville_check(example, poly("x1*p2 - x2*p1"))
        assert report.passed
        assert report.lhs == "0"
        assert report.meta["lie_derivative_omega"] == EXAMPLE_ANCHORS["lie_derivative"]
        assert report.meta["factored"] == "0"

    @pytest.mark.parametrize("seed", range(5))
    def test_random_hamiltonians(self, seed, example, chart):
        """Every hamiltonian field preserves the Liouville volume."""
        f = random_polynomial(make_rng(seed), chart, max_degree=3)
        assert liouville_check(example, f).passed

    def test_energy(self, example, poly):
        """H_f(f) = 0."""
        f = poly("1/2*(p1^2 + p2^2 + p3^2)")
        assert energy_check(example, f).passed
        assert apply_vf(ham_vf(example, f), f).is_zero


class TestSigns:
    """Recorded global signs."""

    def test_calibration_matches_recorded(self):
        """The constants equal their recomputation from the worked example."""
        assert calibrate_signs() == recorded_signs()

    def test_recorded_values(self):
        """The signs under the bundled conventions."""
        assert (SIGMA_S, SIGMA_J, SIGMA_5, CHAIN_SIGN) == (-1, 1, -1, -1)


class TestExampleIdentities:
    """Individual identities on the worked example."""

    def test_obstruction_field(self, example, poly):
        """For (p3, p1) the right side of the bracket identity is -x1 @p2."""
        report = eq_brackets_check(example, poly("p3"), poly("p1"))
        assert report.passed
        assert report.rhs == EXAMPLE_ANCHORS["sharp"]

    def test_self_bracket(self, example, poly):
        """{f, f} = 0."""
        f = poly("x1*p2 - x2*p1 + x3^2*p3")
        assert bracket(example, f, f).is_zero

    def test_momentum_liouville(self, example, poly):
        """H_p3 preserves the Liouville volume."""
        assert liouville_check(example, poly("p3")).passed

    def test_canonical_jacobi(self, canonical, poly):
        """B = 0 gives 0 = 0."""
        report = eq_jacobi_check(canonical, poly("p1"), poly("p2"), poly("p3"))
        assert report.passed
        assert (report.lhs, report.rhs) == ("0", "0")
