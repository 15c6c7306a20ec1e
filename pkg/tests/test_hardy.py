import math

import numpy as np
import pytest

from gaussian_littlewood import (
    CoefficientSeries,
    ValidationError,
    eval_on_grid,
    hp_norm_even_oracle,
    hp_norm_grid,
    l2_norm,
    make_boundary_example,
    make_lacunary,
)
from gaussian_littlewood.hardy import LacunarySeries, default_grid_size, gap_ratio, horner_on_grid

from conftest import random_coeffs


def horner_at(coeffs, z):
    acc = 0j
    for a in coeffs[::-1]:
        acc = acc * z + a
    return acc


class TestCoefficientSeries:
    def test_degree_counts_trailing_zeros(self):
        assert CoefficientSeries([1, 2, 0, 0]).degree == 3

    @pytest.mark.parametrize("bad", [[1, np.nan], [np.inf], [1, complex(0, np.inf)]])
    def test_rejects_non_finite(self, bad):
        with pytest.raises(ValidationError):
            CoefficientSeries(bad)

    def test_rejects_empty(self):
        with pytest.raises(ValidationError):
            CoefficientSeries([])

    def test_coefficients_are_read_only(self):
        f = CoefficientSeries([1.0, 2.0])
        with pytest.raises(ValueError):
            f.coeffs[0] = 5

    def test_input_is_copied(self):
        a = np.array([1.0, 2.0])
        f = CoefficientSeries(a)
        a[0] = 9
        assert f.coeffs[0] == 1

    def test_monomial(self):
        f = CoefficientSeries.monomial(3, 2.0)
        assert f.degree == 3
        np.testing.assert_array_equal(f.coeffs, [0, 0, 0, 2])


class TestEvalOnGrid:
    def test_constant(self):
        vals = eval_on_grid(CoefficientSeries([2.5 - 1j]), 7).values
        np.testing.assert_allclose(vals, np.full(7, 2.5 - 1j), rtol=0, atol=1e-15)

    def test_z_on_four_points(self):
        vals = eval_on_grid(CoefficientSeries([0, 1]), 4).values
        np.testing.assert_allclose(vals, [1, 1j, -1, -1j], atol=1e-15)

    def test_matches_horner(self, rng):
        a = random_coeffs(rng, 8)
        bv = eval_on_grid(CoefficientSeries(a), 32)
        z = np.exp(2j * np.pi * np.arange(32) / 32)
        ref = np.array([horner_at(a, zk) for zk in z])
        assert bv.grid_size == 32
        np.testing.assert_allclose(bv.values, ref, rtol=1e-12, atol=1e-12 * np.abs(ref).max())

    def test_aliasing_when_grid_is_coarse(self, rng):
        a = random_coeffs(rng, 20)
        np.testing.assert_allclose(eval_on_grid(CoefficientSeries(a), 7).values,
                                   horner_on_grid(CoefficientSeries(a), 7), atol=1e-12)

    def test_zero_grid_is_invalid(self):
        with pytest.raises(ValidationError, match="M"):
            eval_on_grid(CoefficientSeries([1]), 0)


class TestHpNorm:
    def test_constant_any_p(self):
        res = hp_norm_grid(CoefficientSeries([-3 + 4j]), 3.7)
        assert res.value == pytest.approx(5.0, rel=1e-14)

    def test_one_plus_z_at_p4(self):
        res = hp_norm_grid(CoefficientSeries([1, 1]), 4, 9)
        assert res.value == pytest.approx(6**0.25, rel=1e-13)
        assert res.exact

    def test_exact_flag(self):
        f = CoefficientSeries([1, 2, 3])
        assert hp_norm_grid(f, 2, 5).exact
        assert not hp_norm_grid(f, 2, 4).exact
        assert hp_norm_grid(f, 6, 13).exact
        assert not hp_norm_grid(f, 6, 12).exact
        assert not hp_norm_grid(f, 3, 1024).exact

    def test_parseval(self, rng):
        f = CoefficientSeries(random_coeffs(rng, 40))
        assert hp_norm_grid(f, 2, 81).value == pytest.approx(l2_norm(f), rel=1e-12)

    def test_default_grid(self):
        assert default_grid_size(0) == 64
        assert default_grid_size(7) == 64
        assert default_grid_size(8) == 128
        assert default_grid_size(1000) == 8192

    def test_non_even_p_converges_under_refinement(self, rng):
        f = CoefficientSeries(random_coeffs(rng, 10))
        a, b = hp_norm_grid(f, 3.3, 256).value, hp_norm_grid(f, 3.3, 512).value
        assert a == pytest.approx(b, rel=1e-3)

    def test_quasi_norm_allowed(self):
        assert hp_norm_grid(CoefficientSeries([1, 1]), 0.5).value > 0

    @pytest.mark.parametrize("p", [0, -1, np.nan])
    def test_invalid_p(self, p):
        with pytest.raises(ValidationError):
            hp_norm_grid(CoefficientSeries([1]), p)

    def test_zero_series(self):
        assert hp_norm_grid(CoefficientSeries([0, 0]), 4).value == 0


class TestEvenOracle:
    def test_one_plus_z(self):
        assert hp_norm_even_oracle(CoefficientSeries([1, 1]), 2) == pytest.approx(6**0.25, rel=1e-14)

    @pytest.mark.parametrize("m", [1, 2, 5])
    def test_monomial(self, m):
        assert hp_norm_even_oracle(CoefficientSeries.monomial(6), m) == pytest.approx(1.0, rel=1e-14)

    def test_agrees_with_grid(self, rng):
        f = CoefficientSeries(random_coeffs(rng, 6))
        assert hp_norm_grid(f, 6, 37).value == pytest.approx(hp_norm_even_oracle(f, 3), rel=1e-10)

    def test_m_must_be_positive(self):
        with pytest.raises(ValidationError):
            hp_norm_even_oracle(CoefficientSeries([1]), 0)


class TestL2:
    def test_unit(self):
        assert l2_norm(CoefficientSeries([1, 0])) == 1

    def test_three_four_five(self):
        assert l2_norm(CoefficientSeries([3, 4])) == pytest.approx(5)


class TestBoundaryExample:
    def test_first_coefficient(self):
        assert make_boundary_example(4).coeffs[0].real == pytest.approx(1 / math.log(2), rel=1e-14)

    def test_decreasing(self):
        a = make_boundary_example(500).coeffs.real
        assert np.all(np.diff(a) < 0)

    def test_partial_norms_settle(self):
        small, big = l2_norm(make_boundary_example(2**14)), l2_norm(make_boundary_example(2**15))
        assert big > small
        assert big / small < 1.01


class TestLacunary:
    def test_powers_of_two(self):
        f = make_lacunary([2**k for k in range(11)])
        assert isinstance(f, LacunarySeries)
        assert f.gap_ratio == 2.0
        assert f.is_lacunary()
        assert np.count_nonzero(f.coeffs) == 11

    def test_one_two_three(self):
        # Ratios are 2 and 3/2; the infimum is 3/2, still above 1.
        f = make_lacunary([1, 2, 3])
        assert f.gap_ratio == pytest.approx(1.5)
        assert f.is_lacunary()

    def test_squares_approach_one(self):
        support = [k * k for k in range(1, 60)]
        assert gap_ratio(support) == pytest.approx((59 / 58) ** 2)
        assert not make_lacunary(support).is_lacunary(threshold=1.05)

    def test_amplitudes_placed_on_support(self):
        f = make_lacunary([1, 4], [0.5, -2])
        np.testing.assert_array_equal(f.coeffs, [0, 0.5, 0, 0, -2])

    @pytest.mark.parametrize("support", [[3, 2], [1, 1], [-1, 2]])
    def test_rejects_bad_support(self, support):
        with pytest.raises(ValidationError):
            make_lacunary(support)
