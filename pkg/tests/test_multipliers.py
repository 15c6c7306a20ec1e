import math

import numpy as np
import pytest

from gaussian_littlewood import (
    Band,
    CoefficientSeries,
    Diagonal,
    Hilbert,
    Identity,
    RankOne,
    SequenceSpec,
    ToeplitzGeometric,
    ValidationError,
    duren_rate,
    lacunary_hp_criterion,
    linf_bound,
    make_lacunary,
    multiplier_test,
    necessary_decay_diagnostic,
    wiener_check,
)

INV_SQRT = SequenceSpec.power(-0.5)


class TestLinf:
    def test_constant(self):
        assert linf_bound(SequenceSpec.constant(1), 50) == 1

    def test_square_root_growth(self):
        seq = SequenceSpec.power(0.5)
        assert linf_bound(seq, 99) == pytest.approx(10.0)
        assert not multiplier_test(seq, 2, 99).stable

    def test_harmonic(self):
        seq = SequenceSpec.power(-1)
        assert linf_bound(seq, 1000) == 1
        rep = multiplier_test(seq, 1.5, 1000)
        assert rep.name == "linf" and rep.stable

    def test_monotone_in_n(self):
        seq = SequenceSpec.cyclic([0.1, -3, 2])
        vals = [linf_bound(seq, N) for N in range(6)]
        assert vals == sorted(vals)


class TestDuren:
    def test_inverse_square_root_bounded(self):
        rep = multiplier_test(INV_SQRT, 4, 500)
        assert rep.name == "duren_rate" and rep.stable
        assert rep.value <= 1

    def test_constant_grows(self):
        assert duren_rate(SequenceSpec.constant(1), 4, 256) == pytest.approx(256**0.25)
        assert not multiplier_test(SequenceSpec.constant(1), 4, 256).stable

    def test_exponents_cancel(self):
        p = 6
        seq = SequenceSpec.power(-0.5 + 1 / p, offset=0)
        n = np.arange(1, 200)
        np.testing.assert_allclose(np.abs(seq.values(199, start=1)) * n ** (0.5 - 1 / p), 1.0, rtol=1e-13)
        assert duren_rate(seq, p, 199) == pytest.approx(1.0, rel=1e-13)

    def test_needs_p_above_two(self):
        with pytest.raises(ValidationError, match="p"):
            duren_rate(INV_SQRT, 2, 10)


class TestDecay:
    def test_identity(self):
        rep = necessary_decay_diagnostic(Identity(), 0, 0.25, 2, 64)
        assert rep.applicable
        assert all(s == 0 for s in rep.window_sups)
        assert rep.partial_sum == 0

    def test_toeplitz_decays(self):
        rep = necessary_decay_diagnostic(ToeplitzGeometric(1.0, 0.5), 0, 0.25, 2, 256)
        assert rep.applicable and rep.trend_ok and rep.series_stable

    def test_rank_one_grows(self):
        rep = necessary_decay_diagnostic(RankOne(SequenceSpec.constant(1)), 0, 0.25, 2, 256)
        assert rep.applicable and not rep.trend_ok
        sups = rep.window_sups
        assert sups[-1] / sups[-2] == pytest.approx(2**0.25, rel=0.05)

    def test_not_applicable_when_row_increases(self):
        model = RankOne(SequenceSpec.power(0.5))
        rep = necessary_decay_diagnostic(model, 0, 0.25, 2, 32)
        assert not rep.applicable and not rep.trend_ok

    @pytest.mark.parametrize("model", [Band(3), Hilbert()], ids=["band", "hilbert"])
    def test_bounded_families_trend_to_zero(self, model):
        rep = necessary_decay_diagnostic(model, 0, 0.25, 2, 1024)
        assert rep.window_sups[-1] <= 0.1 * max(rep.window_sups)


class TestWiener:
    def test_identity_unit_vector(self):
        a = np.array([3.0, -1, 2])
        rep = wiener_check(Identity(), [1, 0, 0], a, 2)
        assert rep.wiener_sum == 3
        assert rep.l2_inequality

    def test_hilbert_random(self, rng):
        rep = wiener_check(Hilbert(), rng.standard_normal(65), rng.standard_normal(65), 64)
        assert rep.l2_inequality

    def test_rank_one_diverges_logarithmically(self):
        sums = []
        for N in (256, 512, 1024):
            lam = np.zeros(N + 1)
            lam[0] = 1
            sums.append(wiener_check(RankOne(INV_SQRT), lam, INV_SQRT.values(N), N).wiener_sum)
        assert sums[1] - sums[0] == pytest.approx(math.log(2), rel=0.01)
        assert sums[2] - sums[1] == pytest.approx(math.log(2), rel=0.01)


class TestLacunary:
    def test_identity(self):
        ks = range(11)
        f = make_lacunary([2**k for k in ks], [2 ** (-k / 2) for k in ks])
        rep = lacunary_hp_criterion(f, Identity(), 5000, 3)
        assert rep.expected == pytest.approx(sum(2.0**-k for k in ks))
        assert rep.expected < 2
        assert rep.matches_expected and rep.below_bound

    def test_zero_series(self):
        f = make_lacunary([1, 2, 4], [0, 0, 0])
        rep = lacunary_hp_criterion(f, Identity(), 10, 0)
        assert rep.mean == 0 and rep.stderr == 0

    def test_diagonal_scaling(self):
        f = make_lacunary([1, 3, 9, 27], [1, 0.5, 0.25, 0.125])
        rep = lacunary_hp_criterion(f, Diagonal(SequenceSpec.constant(3)), 5000, 8)
        assert rep.expected == pytest.approx(9 * np.sum(np.abs(f.coeffs) ** 2))
        assert rep.matches_expected

    def test_plain_series_gets_gap_ratio_from_support(self):
        # Any finite increasing support has ratio > 1; here the minimum is 4/3.
        rep = lacunary_hp_criterion(CoefficientSeries([0, 1, 1, 1, 1]), Identity(), 10, 0)
        assert rep.gap_ratio == pytest.approx(4 / 3)
