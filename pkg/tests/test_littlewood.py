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
    SeedSpec,
    SequenceSpec,
    ToeplitzGeometric,
    ValidationError,
    c_q,
    estimate_mixed_norm,
    exp_integral_estimate,
    hp_norm_grid,
    improvement_sweep,
    l2_norm,
    make_boundary_example,
    mean_part,
    moment_equivalence_check,
    randomize,
    sample_process,
    verify_bounds,
)
from gaussian_littlewood.littlewood import BoundReport, hill_tail_index, trial_norms

from conftest import random_coeffs

ONES = RankOne(SequenceSpec.constant(1))


class TestRandomize:
    def test_unit_sample_is_identity(self, rng):
        f = CoefficientSeries(random_coeffs(rng, 5))
        assert randomize(f, np.ones(6)) == f

    def test_single_coefficient(self):
        s = sample_process(Hilbert(), 4, 3)
        np.testing.assert_array_equal(randomize(CoefficientSeries([1, 0, 0, 0, 0]), s).coeffs,
                                      [s.values[0], 0, 0, 0, 0])

    @pytest.mark.parametrize("p", [1, 2, 3.5, 4])
    def test_rank_one_scales_norm(self, p, rng):
        f = CoefficientSeries(random_coeffs(rng, 12))
        s = sample_process(ONES, 12, SeedSpec(5, 2))
        ratio = hp_norm_grid(randomize(f, s), p).value / hp_norm_grid(f, p).value
        assert ratio == pytest.approx(abs(s.values[0]), rel=1e-12)

    def test_longer_sample_truncated(self):
        assert randomize(CoefficientSeries([1, 2]), [3, 4, 5]).degree == 1

    def test_shorter_sample_needs_zero_tail(self):
        assert randomize(CoefficientSeries([1, 2, 0]), [3, 4]).degree == 1
        with pytest.raises(ValidationError, match="sample"):
            randomize(CoefficientSeries([1, 2, 3]), [3, 4])


class TestMeanPart:
    def test_zero_mean(self):
        assert l2_norm(mean_part(CoefficientSeries([1, 2, 3]), np.zeros(3))) == 0

    def test_unit_mean(self):
        f = CoefficientSeries([1, 2, 3])
        assert mean_part(f, np.ones(3)) == f

    def test_sign_flip_is_isometry(self, rng):
        f = CoefficientSeries(random_coeffs(rng, 9))
        g = mean_part(f, (-1.0) ** np.arange(10))
        np.testing.assert_array_equal(g.coeffs, f.coeffs * (-1.0) ** np.arange(10))
        assert l2_norm(g) == pytest.approx(l2_norm(f), rel=1e-15)


class TestMixedNorm:
    def test_diagonal_p2_identity(self, rng):
        sigma = SequenceSpec.cyclic([0.5, 1, 2])
        a = rng.standard_normal(24)
        est = estimate_mixed_norm(CoefficientSeries(a), Diagonal(sigma), 2, 2, 10**4, 11)
        exact = float(np.sum(a**2 * sigma.values(23) ** 2))
        assert abs(est.raw_moment - exact) <= 4 * est.raw_stderr

    def test_zero_series(self):
        est = estimate_mixed_norm(CoefficientSeries([0, 0, 0]), Hilbert(), 3, 2, 50, 1)
        assert est.mean == 0 and est.stderr == 0

    def test_identity_unit_norm(self):
        f = CoefficientSeries(np.array([1, 1]) / math.sqrt(2))
        est = estimate_mixed_norm(f, Identity(), 2, 2, 10**4, 3)
        assert abs(est.mean - 1) <= 4 * est.stderr

    def test_deterministic_and_batch_invariant(self, monkeypatch):
        f = make_boundary_example(20)
        a = estimate_mixed_norm(f, Band(3), 3, 2, 300, SeedSpec(4, 10))
        import gaussian_littlewood.littlewood as lw
        monkeypatch.setattr(lw, "_CHUNK_CELLS", 64 * 7)
        b = estimate_mixed_norm(f, Band(3), 3, 2, 300, SeedSpec(4, 10))
        assert a == b

    def test_trials_use_consecutive_streams(self):
        f = CoefficientSeries([1, -2, 0.5])
        norms = trial_norms(f, Hilbert(), 4, 5, SeedSpec(8, 100))
        direct = [hp_norm_grid(randomize(f, sample_process(Hilbert(), 2, SeedSpec(8, 100 + t))), 4).value
                  for t in range(5)]
        np.testing.assert_allclose(norms, direct, rtol=1e-14)

    def test_quasi_norm_warns(self):
        with pytest.warns(UserWarning, match="quasi"):
            est = estimate_mixed_norm(CoefficientSeries([1, 1]), Identity(), 0.5, 2, 20, 0)
        assert est.quasi_norm

    @pytest.mark.parametrize("kw", [dict(q=0.5), dict(T=1), dict(p=0)])
    def test_validation(self, kw):
        args = dict(p=2, q=2, T=10)
        args.update(kw)
        with pytest.raises(ValidationError):
            estimate_mixed_norm(CoefficientSeries([1]), Identity(), args["p"], args["q"], args["T"], 0)


class TestVerifyBounds:
    def test_identity_p2_exact(self, rng):
        f = CoefficientSeries(rng.standard_normal(16))
        reports = {r.bound_name: r for r in verify_bounds(f, Identity(), 2, 4000, 6)}
        exact = reports["exact_p2"]
        assert exact.kind == "equal" and exact.satisfied
        assert exact.bound_value == pytest.approx(l2_norm(f))

    def test_band_p15_upper(self, rng):
        f = CoefficientSeries(rng.standard_normal(30))
        reports = {r.bound_name: r for r in verify_bounds(f, Band(3), 1.5, 2000, 2)}
        assert set(reports) == {"upper_bessel", "upper_c2"}
        assert reports["upper_bessel"].satisfied

    def test_identity_p4_lower(self, rng):
        f = CoefficientSeries(rng.standard_normal(30))
        reports = {r.bound_name: r for r in verify_bounds(f, Identity(), 4, 2000, 2)}
        assert reports["lower_c1"].bound_value == pytest.approx(l2_norm(f) / 4)
        assert all(r.satisfied for r in reports.values())
        assert "upper_c2" not in reports

    def test_gamma_constant_value(self):
        f = CoefficientSeries([1.0])
        (upper, _) = verify_bounds(f, Identity(), 4, 10, 0)
        expected = 2 * math.gamma(2.5) ** 0.25 / math.pi ** (1 / 8)
        assert upper.bound_value == pytest.approx(expected, rel=1e-14)

    def test_suppressed_below_one(self):
        assert verify_bounds(CoefficientSeries([1, 1]), Identity(), 0.5, 10, 0) == []

    def test_report_kinds(self):
        up = BoundReport.make("x", "upper", 1.0, 0.1, 1.5, p=2, q=2, trials=2, grid_size=1, seed=0)
        lo = BoundReport.make("x", "lower", 1.0, 0.1, 0.7, p=2, q=2, trials=2, grid_size=1, seed=0)
        assert up.satisfied and up.margin == pytest.approx(0.1)
        assert not lo.satisfied and lo.margin == pytest.approx(-0.1)
        with pytest.raises(ValidationError):
            BoundReport.make("x", "sideways", 1, 0, 1, p=2, q=2, trials=2, grid_size=1, seed=0)


class TestCq:
    def test_values(self):
        assert c_q(2) == pytest.approx(1.0, abs=1e-14)
        assert c_q(4) == pytest.approx(3**0.25, abs=1e-12)
        assert c_q(1) == pytest.approx(math.sqrt(2 / math.pi), abs=1e-12)

    @pytest.mark.parametrize("q", [1.3, 7.5, 33, 64])
    def test_against_scipy_free_closed_form(self, q):
        expected = (2 ** (q / 2) * math.gamma((q + 1) / 2) / math.sqrt(math.pi)) ** (1 / q)
        assert c_q(q) == pytest.approx(expected, rel=1e-12)

    def test_domain(self):
        with pytest.raises(ValidationError):
            c_q(0.5)


class TestMomentEquivalence:
    def test_q2_trivial(self):
        lo, up = moment_equivalence_check(CoefficientSeries([1, 2]), Identity(), 2, 2, 20, 0)
        assert lo.estimate == up.estimate == 1
        assert lo.satisfied and up.satisfied

    def test_q4(self, rng):
        f = CoefficientSeries(rng.standard_normal(33))
        lo, up = moment_equivalence_check(f, Identity(), 2, 4, 10**4, 5)
        assert up.bound_value == pytest.approx(2 * 3**0.25)
        assert lo.satisfied and up.satisfied

    def test_q1(self, rng):
        f = CoefficientSeries(rng.standard_normal(33))
        lo, up = moment_equivalence_check(f, Identity(), 2, 1, 10**4, 5)
        assert up.bound_value == pytest.approx(2 / math.sqrt(2 / math.pi))
        assert lo.satisfied and up.satisfied

    def test_monotone_in_q(self, rng):
        f = CoefficientSeries(rng.standard_normal(10))
        ests = [estimate_mixed_norm(f, ToeplitzGeometric(1, 0.5), 3, q, 4000, 9) for q in (1, 2, 4)]
        # Same trials for every q, so Jensen holds exactly, not just at MC tolerance.
        assert ests[0].mean <= ests[1].mean <= ests[2].mean


class TestExpIntegral:
    def test_zero_lambda(self):
        est = exp_integral_estimate(CoefficientSeries([1, 2]), Hilbert(), 0, 50)
        assert est.mean == 1 and est.stderr == 0 and not est.blow_up

    def test_finite_regime(self):
        est = exp_integral_estimate(CoefficientSeries([1.0]), Identity(), 0.25, 20000, seed=3)
        assert abs(est.mean - math.sqrt(2)) <= 4 * est.stderr
        assert est.threshold == pytest.approx(0.5, abs=1e-12)
        assert not est.blow_up

    def test_divergent_regime(self):
        est = exp_integral_estimate(CoefficientSeries([1.0]), Identity(), 0.75, 20000, seed=3)
        assert est.blow_up
        assert "heavy_tail" in est.reasons

    def test_overflow_is_flagged(self):
        est = exp_integral_estimate(CoefficientSeries([30.0]), Identity(), 5.0, 200, seed=1)
        assert est.overflow_trials > 0
        assert est.blow_up and "overflow" in est.reasons
        assert est.mean == math.inf

    def test_hill_index_of_pareto(self):
        u = np.random.default_rng(0).random(10**5)
        x = u ** (-1 / 1.5)
        assert hill_tail_index(x, k=2000) == pytest.approx(1.5, rel=0.1)


class TestSweep:
    def test_monomial_is_flat(self):
        rows = improvement_sweep(lambda N: CoefficientSeries.monomial(N), Identity(), 4, [4, 16, 64], 100, 2)
        for r in rows:
            assert r.deterministic_norm == pytest.approx(1.0, rel=1e-12)
        meds = [r.randomized_median for r in rows]
        assert max(meds) / min(meds) < 1.5

    def test_rank_one_tracks_deterministic(self):
        rows = improvement_sweep(make_boundary_example, ONES, 4, [16, 64, 256], 50, 7)
        ratios = [r.randomized_median / r.deterministic_norm for r in rows]
        assert ratios == pytest.approx([ratios[0]] * 3, rel=1e-10)
        assert rows[2].randomized_median > rows[0].randomized_median
