"""Tests for the Ĉ_λ polynomials and the hierarchy identities."""

from fractions import Fraction

import pytest

from app.core.exceptions import ValidationError, WindowError
from app.services import ckp
from app.services.partitions import OddPartition, d_squared, enumerate_op
from app.services.ring import SuperPoly, drop_generators


def lam(text: str) -> OddPartition:
    return OddPartition.parse(text)


@pytest.mark.unit
class TestCLambda:
    """Ĉ_λ in the engine normalization"""

    def test_single_box(self, theta):
        """Ĉ_(1) = t_{1/2}/2, or t_{1/2} with doubled odd times."""
        cl = ckp.c_lambda(lam("1"))
        assert cl.hatC == theta(1).scale(Fraction(1, 2))
        assert cl.normalized("vertex") == theta(1)
        assert cl.D == 1

    def test_small_partitions(self, t, theta):
        """Known low-weight polynomials."""
        half = Fraction(1, 2)
        assert ckp.c_lambda(lam("1,1")).hatC == t(1)
        assert ckp.c_lambda(lam("3")).hatC == theta(3).scale(Fraction(-3, 2)) + (t(1) * theta(1)).scale(half)
        assert ckp.c_lambda(lam("3,1")).hatC == (t(1) ** 2).scale(half) + (theta(1) * theta(3)).scale(Fraction(3, 4))
        assert ckp.c_lambda(lam("1,1,1,1")).hatC == (t(1) ** 2).scale(3) + (theta(1) * theta(3)).scale(3)
        assert ckp.c_lambda(lam("1,1,1")).hatC == theta(3).scale(-3) + (t(1) * theta(1)).scale(Fraction(3, 2))

    def test_closed_mode_is_even_part(self, t):
        """The closed form drops odd times."""
        assert ckp.c_lambda(lam("3,1"), "closed").hatC == (t(1) ** 2).scale(Fraction(1, 2))
        assert not ckp.c_lambda(lam("3"), "closed").hatC

    def test_empty_partition(self):
        """Ĉ_∅ = 1."""
        assert ckp.c_lambda(OddPartition(())).hatC == 1

    @pytest.mark.parametrize("partition", enumerate_op(7), ids=lambda p: str(p) or "empty")
    def test_oracle_and_half_time(self, partition):
        """Engine agrees with both Hafnian closed forms."""
        assert ckp.oracle_check(partition)
        assert ckp.half_time_check(partition)

    @pytest.mark.parametrize("partition", enumerate_op(8), ids=lambda p: str(p) or "empty")
    def test_homogeneity(self, partition):
        """Weight |λ|/2 and parity ℓ mod 2."""
        assert ckp.homogeneity_check(partition)

    def test_parity_law(self):
        """The sign law holds with exponent |λ|/2."""
        assert all(ckp.c_parity_check(p) for p in enumerate_op(8))

    def test_literal_parity_law_fails(self):
        """Exponent (|λ|+ℓ)/2 fails already for (1,1)."""
        assert not ckp.c_parity_literal(lam("1,1"))


@pytest.mark.unit
class TestSkew:
    """Skew polynomials"""

    def test_trivial_skews(self):
        """Ĉ_{λ/λ} = D_λ and Ĉ_{λ/∅}(s) = Ĉ_λ(s)."""
        partition = lam("3,1")
        assert ckp.c_skew(partition, partition) == d_squared(partition)
        s1 = SuperPoly.gen("s", 1)
        assert ckp.c_skew(lam("1,1"), OddPartition(())) == s1

    def test_non_contained_skew_vanishes(self):
        """μ ⊄ λ gives zero."""
        assert not ckp.c_skew(lam("1,1"), lam("3"))

    @pytest.mark.parametrize("text", ["1,1", "3,1", "3,1,1", "1,1,1,1"])
    def test_branching(self, text):
        """Ĉ_λ(t+s) expands over skews."""
        assert ckp.skew_branching_check(lam(text))


@pytest.mark.unit
class TestScalarProduct:
    """Scalar product and orthogonality"""

    def test_time_pairings(self, t, theta):
        """Diagonal pairing of single times."""
        assert ckp.scalar_product(t(1), t(1)) == 2
        assert ckp.scalar_product(theta(1), theta(1)) == 4
        assert ckp.scalar_product(theta(1) * theta(3), theta(1) * theta(3)) == Fraction(-16, 3)
        assert ckp.scalar_product(t(1), t(3)) == 0

    def test_engine_matches_formula(self, t, theta):
        """The Fock realization reproduces the diagonal pairing."""
        for p in (t(1), theta(1), theta(3), theta(1) * theta(3), t(1) ** 2, t(1) * theta(1)):
            assert ckp.scalar_product_engine(p, p) == ckp.scalar_product(p, p)

    def test_norm_of_c_three(self):
        """⟨Ĉ_(3), Ĉ_(3)⟩ = D_(3) = -1."""
        hatC = ckp.c_lambda(lam("3")).hatC
        assert ckp.scalar_product(hatC, hatC) == -1

    def test_rejects_foreign_generators(self, a_param):
        """Only times may be paired."""
        with pytest.raises(ValidationError):
            ckp.scalar_product(a_param, a_param)

    def test_orthonormality(self):
        """⟨Ĉ_λ, Ĉ_μ⟩ = D_λ δ_{λμ} up to size 6."""
        assert ckp.orthonormality_check(enumerate_op(6))


@pytest.mark.unit
class TestCauchyLittlewood:
    """Cauchy-Littlewood identities"""

    def test_formal(self):
        """Formal identity to weight 2."""
        assert ckp.cauchy_littlewood_check(2)

    def test_one_miwa_pair(self):
        """Product formula for one pair."""
        assert ckp.super_miwa_cl_check(1, 3)
        assert ckp.super_miwa_cl_check(1, 3, with_tags=False)

    def test_rejects_no_pairs(self):
        """At least one pair is needed."""
        with pytest.raises(ValidationError):
            ckp.super_miwa_cl_check(0, 2)

    @pytest.mark.parametrize("text", ["1", "3", "1,1", "3,1", "1,1,1", "1,1,1,1", "3,1,1"])
    def test_single_super_miwa(self, text):
        """Closed forms at one super Miwa pair."""
        assert ckp.c_single_supermiwa(lam(text))


@pytest.mark.unit
class TestCounts:
    """Hafnian path counts"""

    @pytest.mark.parametrize("text", ["1,1", "3,1", "1,1,1,1", "5,1", "3,3", "3,1,1,1"])
    def test_count_formula(self, text):
        """Ĉ_λ(1,0,…) matches the Hafnian and the path count."""
        assert ckp.count_formula_check(lam(text))

    def test_count_hafnian(self):
        """Hf for (3,1) is 1/2."""
        assert ckp.count_hafnian(lam("3,1")) == Fraction(1, 2)

    def test_odd_length_rejected(self):
        """The count formula needs even length."""
        with pytest.raises(ValidationError):
            ckp.count_formula_check(lam("3"))


@pytest.mark.unit
class TestTau:
    """τ coefficients and expansions"""

    def test_heat_tau_coefficient(self, heat_spec, a_param):
        """τ_(3,1) of exp(aφ_{1/2}²) at t = 0."""
        value = ckp.tau_coefficient(lam("3,1"), heat_spec, 2)
        constant = drop_generators(value, lambda gen, odd: gen[0] == "t")
        assert constant == (a_param * a_param).scale(Fraction(-3, 2))

    def test_tau_coefficient_needs_distinct_parts(self, heat_spec):
        """Repeated parts are rejected."""
        with pytest.raises(ValidationError):
            ckp.tau_coefficient(lam("1,1"), heat_spec, 2)

    def test_heat_series(self, heat_spec, a_param):
        """g_(1,1) = 2a and g_(1^4) = 12a²."""
        series = ckp.tau_series(heat_spec, 2)
        assert series.coefficients[lam("1,1")] == a_param.scale(2)
        assert series.coefficients[lam("1,1,1,1")] == (a_param * a_param).scale(12)
        assert series.D(lam("1,1")) == 2

    @pytest.mark.parametrize("fixture", ["identity_spec", "heat_spec", "soliton_spec", "diag_spec"])
    def test_resummation(self, fixture, request):
        """sum D^{-1} g_λ Ĉ_λ equals the vacuum expectation."""
        spec = request.getfixturevalue(fixture)
        assert ckp.tau_from_series(ckp.tau_series(spec, 2))

    def test_diagonal_pattern(self, diag_spec):
        """Diagonal elements only reach even multiplicities."""
        assert ckp.diagonal_pattern_check(diag_spec, 3)

    def test_diagonal_pattern_rejects_other_kinds(self, heat_spec):
        """The pattern applies to diagonal elements only."""
        with pytest.raises(ValidationError):
            ckp.diagonal_pattern_check(heat_spec, 2)

    def test_soliton(self):
        """One-soliton τ against its closed form."""
        assert ckp.soliton_tau_check(Fraction(1, 2), Fraction(1, 3), "1", 3)

    def test_heat_kernel(self):
        """(1 - 2a t_1)^(-1/2)."""
        assert ckp.heat_kernel_check(4)

    def test_basis_vector_is_not_tau(self):
        """Ĉ_(1,1) alone is not a τ function."""
        assert ckp.c_lambda_not_tau_check(lam("1,1"), 2)


@pytest.mark.unit
class TestWaveFunctions:
    """Wave functions g_α and ŵ_α"""

    def test_vacuum_wave(self, identity_spec):
        """g_(1) = e^ξ/2 for the identity."""
        wave = ckp.wave_coefficient(lam("1"), identity_spec, 2)
        expected = ckp.exp_xi_series(Fraction(2))
        for e in range(-2, 3):
            assert wave.coefficient(e) == expected.coefficient(e).scale(Fraction(1, 2)), e

    def test_normalized_vacuum_wave(self, identity_spec):
        """ŵ_(1) = 1 for the identity."""
        assert ckp.normalized_wave_check(lam("1"), identity_spec, 2)

    def test_window_too_low(self, identity_spec):
        """The window must reach the top power."""
        with pytest.raises(WindowError):
            ckp.wave_coefficient(lam("3"), identity_spec, 2, (-2, 2))

    def test_even_length_rejected(self, identity_spec):
        """Wave functions need odd length."""
        with pytest.raises(ValidationError):
            ckp.wave_coefficient(lam("3,1"), identity_spec, 2)

    def test_engine_agrees(self, identity_spec):
        """Assembled and direct g_(1) agree."""
        assert ckp.wave_engine_check(lam("1"), identity_spec, 2, -2)

    def test_normalized_heat_wave(self, heat_spec):
        """ŵ_(1) = 1 + O(1/z) for the heat element."""
        assert ckp.normalized_wave_check(lam("1"), heat_spec, 1)

    def test_bilinear_residue(self, heat_spec):
        """Res_z g_(1)(t,z) g_(1)(s,-z) vanishes."""
        assert ckp.bilinear_residue_check(lam("1"), lam("1"), heat_spec, 1)


@pytest.mark.unit
class TestCorrelators:
    """Super correlators and Wick's theorem"""

    def test_two_point_values(self):
        """⟨J_{j}J_{-j}⟩ = (-1)^(j-1/2) j/2."""
        assert ckp.two_point_value(1, -1) == Fraction(1, 4)
        assert ckp.two_point_value(3, -3) == Fraction(-3, 4)
        assert ckp.two_point_value(1, 1) == 0
        assert ckp.two_point_value(-1, 1) == 0

    @pytest.mark.parametrize("modes", [(1, -1), (3, 1, -1, -3), (1, 3, -3, -1), (1,)])
    def test_mode_wick(self, modes):
        """Vacuum expectations are Pfaffians of two-point values."""
        assert ckp.mode_wick_check(modes)

    def test_super_correlator_two_points(self):
        """D_2 against its closed form, explicit form and inverse."""
        assert ckp.super_correlator_check([Fraction(1, 2), Fraction(1, 3)], 4)

    def test_super_correlator_needs_two_points(self):
        """One point is rejected."""
        with pytest.raises(ValidationError):
            ckp.super_correlator_check([Fraction(1)], 2)

    def test_pfaffian_correlator_two_points(self):
        """θ and φ two-point correlators."""
        assert ckp.pfaffian_correlator_check([Fraction(1), Fraction(2)], 4)

    def test_pfaffian_correlator_odd_points(self):
        """Odd numbers of points are rejected."""
        with pytest.raises(ValidationError):
            ckp.pfaffian_correlator_check([Fraction(1)], 2)


@pytest.mark.slow
class TestHeavyIdentities:
    """Larger instances"""

    def test_two_miwa_pairs(self):
        """Product formula for two pairs."""
        assert ckp.super_miwa_cl_check(2, 2)

    def test_four_point_correlators(self):
        """Four-point Pfaffian and super correlators."""
        points = [Fraction(1), Fraction(2), Fraction(1, 3), Fraction(3, 2)]
        assert ckp.pfaffian_correlator_check(points, 3)
        assert ckp.super_correlator_check(points, 3)

    def test_heat_wave_engine(self, heat_spec):
        """Assembled and direct g_(1) for the heat element."""
        assert ckp.wave_engine_check(lam("1"), heat_spec, 2, -2)

    def test_orthonormality_to_eight(self):
        """⟨Ĉ_λ, Ĉ_μ⟩ = D_λ δ_{λμ} up to size 8."""
        assert ckp.orthonormality_check(enumerate_op(8))
