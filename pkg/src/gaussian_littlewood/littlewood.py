"""The randomisation operator ``R f = Σ a_n X_n z^n`` and Monte Carlo checks.

Almost-sure membership ``Rf ∈ H^p`` cannot be decided from finitely many
samples.  What can be checked is quantitative: moments of ``||Rf||_{H^p}``
against the operator-norm constants, the moment-equivalence constants of
Gaussian vectors, and exponential integrability below the analytic
threshold.  Every estimator here is deterministic given its seed; trial ``t``
draws from ``stream_id = seed.stream_id + t``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._validation import check_int, check_real, check_vector
from .covops import factor_model, op_norm_power_iter, truncate
from .exceptions import ValidationError
from .gp import GaussianSample, as_seed, sample_block
from .hardy import CoefficientSeries, _as_series, default_grid_size, grid_values, power_mean

# Upper bound on trials × grid points held in memory at once.
_CHUNK_CELLS = 1 << 21
_LOG_MAX = math.log(np.finfo(float).max)
SIGMA_MARGIN = 4.0


@dataclass(frozen=True)
class MomentEstimate:
    """Monte Carlo estimate of ``||Rf||_{L^q(Ω, H^p)}``.

    ``raw_moment`` estimates ``E||Rf||_{H^p}^q``; ``mean`` is its ``1/q``
    power, with ``stderr`` propagated by the delta method.
    """

    p: float
    q: float
    mean: float
    stderr: float
    raw_moment: float
    raw_stderr: float
    trials: int
    grid_size: int
    seed: int
    quasi_norm: bool = False


@dataclass(frozen=True)
class BoundReport:
    """A Monte Carlo quantity compared against a bound at ``SIGMA_MARGIN`` sigma.

    ``kind`` is ``upper`` (estimate + 4 se <= bound), ``lower``
    (estimate - 4 se >= bound) or ``equal`` (|estimate - bound| <= 4 se).
    ``margin`` is positive exactly when the report is satisfied.
    """

    bound_name: str
    kind: str
    estimate: float
    stderr: float
    bound_value: float
    satisfied: bool
    margin: float
    p: float
    q: float
    trials: int
    grid_size: int
    seed: int

    @classmethod
    def make(cls, bound_name, kind, estimate, stderr, bound_value, **context):
        spread = SIGMA_MARGIN * stderr
        if kind == "upper":
            margin = bound_value - (estimate + spread)
        elif kind == "lower":
            margin = (estimate - spread) - bound_value
        elif kind == "equal":
            margin = spread - abs(estimate - bound_value)
        else:
            raise ValidationError("kind", f"unknown bound kind {kind!r}")
        return cls(bound_name, kind, float(estimate), float(stderr), float(bound_value),
                   bool(margin >= 0), float(margin), **context)


def randomize(f, sample):
    """Coefficientwise product ``a_n X_n``.

    A longer sample is truncated to the series.  A shorter sample is only
    allowed when every coefficient it cannot reach is zero.
    """
    f = _as_series(f)
    X = sample.values if isinstance(sample, GaussianSample) else check_vector("sample", sample)
    n = f.coeffs.size
    if X.size < n:
        if np.any(f.coeffs[X.size:] != 0):
            raise ValidationError("sample", f"has {X.size} values but the series needs {n}")
        return CoefficientSeries(f.coeffs[: X.size] * X)
    return CoefficientSeries(f.coeffs * X[:n])


def mean_part(f, mu):
    """The deterministic series ``Σ a_n μ_n z^n``."""
    f = _as_series(f)
    mu = check_vector("mu", mu)
    if mu.size < f.coeffs.size:
        raise ValidationError("mu", f"needs at least {f.coeffs.size} entries")
    return CoefficientSeries(f.coeffs * mu[: f.coeffs.size])


def _resolve(f, model, M):
    f = _as_series(f)
    M = default_grid_size(f.degree) if M is None else check_int("M", M, minimum=1)
    return f, M


def _trial_chunks(T, M):
    size = max(1, _CHUNK_CELLS // max(M, 1))
    for start in range(0, T, size):
        yield start, min(T, start + size)


def trial_grid_map(f, model, T, seed, M, fn, mean=None, factor=None):
    """Apply ``fn`` to boundary values of ``Rf`` for trials ``0..T-1``.

    ``fn`` maps a ``(chunk, M)`` complex array to a length-``chunk`` array.
    Returns the concatenated per-trial results.
    """
    seed = as_seed(seed)
    N = f.degree
    L = factor_model(model, N) if factor is None else factor
    out = np.empty(T)
    for lo, hi in _trial_chunks(T, M):
        streams = seed.stream_id + np.arange(lo, hi, dtype=np.uint64)
        X = sample_block(model, N, seed.root_seed, streams, mean=mean, factor=L)
        out[lo:hi] = fn(grid_values(f.coeffs * X, M))
    return out


def trial_norms(f, model, p, T, seed, M=None, mean=None, factor=None):
    """Per-trial ``||Rf||_{H^p}`` on the grid."""
    f, M = _resolve(f, model, M)
    p = check_real("p", p, low=0, low_inclusive=False)
    return trial_grid_map(f, model, T, seed, M, lambda v: power_mean(v, p), mean, factor)


def _moment_from_norms(norms, p, q, M, seed):
    T = norms.size
    powers = norms**q
    raw = float(np.mean(powers))
    raw_se = float(np.std(powers, ddof=1) / math.sqrt(T))
    if raw > 0:
        mean = raw ** (1.0 / q)
        se = mean / (q * raw) * raw_se
    else:
        mean, se = 0.0, 0.0
    return MomentEstimate(p, q, mean, se, raw, raw_se, T, M, as_seed(seed).root_seed, p < 1)


def estimate_mixed_norm(f, model, p, q, T, seed, M=None, mean=None):
    """Monte Carlo ``||Rf||_{L^q(Ω, H^p)}`` over ``T`` independent samples."""
    f, M = _resolve(f, model, M)
    p = check_real("p", p, low=0, low_inclusive=False)
    q = check_real("q", q, low=1)
    T = check_int("trials", T, minimum=2)
    if p < 1:
        warnings.warn("p < 1: H^p is only a quasi-norm; no bounds apply", stacklevel=2)
    norms = trial_norms(f, model, p, T, seed, M, mean)
    return _moment_from_norms(norms, p, q, M, seed)


def bessel_bound(model, N):
    """Bessel bound surrogate: the power-iteration norm of the ``N``-th section."""
    return op_norm_power_iter(truncate(model, N)).estimate


def gamma_constant(p):
    """``2 Γ((p+1)/2)^{1/p} / π^{1/(2p)}`` (multiplies ``sqrt(C_BES)`` for ``p >= 2``)."""
    return 2.0 * math.exp((math.lgamma((p + 1) / 2.0) - 0.5 * math.log(math.pi)) / p)


def verify_bounds(f, model, p, T, seed, M=None, c_bes=None):
    """Check ``||Rf||_{L^2(Ω, H^p)}`` against every bound that applies at ``p``.

    Upper bounds scale ``||f||_{H^2}``; ``C_BES`` defaults to the section
    norm at the degree of ``f``.  Returns an empty list for ``p < 1``.
    """
    f, M = _resolve(f, model, M)
    p = check_real("p", p, low=0, low_inclusive=False)
    T = check_int("trials", T, minimum=2)
    if p < 1:
        return []
    N = f.degree
    norms = trial_norms(f, model, p, T, seed, M)
    est = _moment_from_norms(norms, p, 2.0, M, seed)
    fnorm = float(np.linalg.norm(f.coeffs))
    c_bes = bessel_bound(model, N) if c_bes is None else float(c_bes)
    sig = np.sqrt(np.maximum(model.diagonal(N), 0.0))
    ctx = dict(p=p, q=2.0, trials=T, grid_size=M, seed=est.seed)
    reports = []
    if p < 2:
        reports.append(BoundReport.make("upper_bessel", "upper", est.mean, est.stderr,
                                        2.0 * math.sqrt(2.0 * c_bes) * fnorm, **ctx))
    else:
        reports.append(BoundReport.make("upper_bessel_gamma", "upper", est.mean, est.stderr,
                                        math.sqrt(c_bes) * gamma_constant(p) * fnorm, **ctx))
        reports.append(BoundReport.make("lower_c1", "lower", est.mean, est.stderr,
                                        0.25 * float(sig.min()) * fnorm, **ctx))
    if p <= 2:
        reports.append(BoundReport.make("upper_c2", "upper", est.mean, est.stderr,
                                        2.0 * math.sqrt(2.0) * float(sig.max()) * fnorm, **ctx))
    if p == 2:
        exact = math.sqrt(float(np.sum(np.abs(f.coeffs) ** 2 * sig**2)))
        reports.append(BoundReport.make("exact_p2", "equal", est.mean, est.stderr, exact, **ctx))
    return reports


def c_q(q):
    """``(E|ξ|^q)^{1/q} = sqrt(2) (Γ((q+1)/2) / sqrt(π))^{1/q}`` for standard normal ``ξ``."""
    q = check_real("q", q, low=1)
    return math.sqrt(2.0) * math.exp((math.lgamma((q + 1) / 2.0) - 0.5 * math.log(math.pi)) / q)


def _ratio_with_stderr(y, q):
    """``(mean y^q)^{1/q} / (mean y^2)^{1/2}`` and a delta-method standard error."""
    T = y.size
    a, b = y**q, y**2
    ma, mb = a.mean(), b.mean()
    if ma == 0 or mb == 0:
        return 1.0, 0.0
    r = ma ** (1 / q) / mb**0.5
    grad = np.array([r / (q * ma), -r / (2 * mb)])
    cov = np.cov(np.vstack([a, b]), ddof=1)
    var = float(grad @ cov @ grad) / T
    return float(r), math.sqrt(max(var, 0.0))


def moment_equivalence_check(f, model, p, q, T, seed, M=None):
    """Two-sided check of the Gaussian moment-equivalence constants.

    For ``q >= 2`` the ratio ``||·||_{L^q} / ||·||_{L^2}`` must lie in
    ``[1, 2 c_q]``; for ``1 <= q < 2`` the ratio ``||·||_{L^2} / ||·||_{L^q}``
    must lie in ``[1, 2 / c_q]``.  Returns ``(lower, upper)`` reports.
    """
    f, M = _resolve(f, model, M)
    q = check_real("q", q, low=1)
    T = check_int("trials", T, minimum=2)
    y = trial_norms(f, model, p, T, seed, M)
    ctx = dict(p=float(p), q=q, trials=T, grid_size=M, seed=as_seed(seed).root_seed)
    if q == 2:
        ratio, se = 1.0, 0.0
        upper = 2.0 * c_q(q)
    elif q > 2:
        ratio, se = _ratio_with_stderr(y, q)
        upper = 2.0 * c_q(q)
    else:
        inv, se_inv = _ratio_with_stderr(y, q)
        ratio, se = 1.0 / inv, se_inv / inv**2
        upper = 2.0 / c_q(q)
    name = f"moment_ratio_q{q:g}"
    return (BoundReport.make(name + "_lower", "lower", ratio, se, 1.0, **ctx),
            BoundReport.make(name + "_upper", "upper", ratio, se, upper, **ctx))


@dataclass(frozen=True)
class ExpEstimate:
    """Monte Carlo ``E (1/M) Σ_k exp(λ |Rf(ω^k)|^2)`` with tail diagnostics."""

    lam: float
    mean: float
    stderr: float
    trials: int
    grid_size: int
    seed: int
    threshold: float
    blow_up: bool
    overflow_trials: int
    half_mean: float
    tail_index: float
    reasons: tuple = field(default=())


def hill_tail_index(values, k=None):
    """Hill estimate of the tail index from the ``k`` largest values.

    ``k`` defaults to ``max(10, floor(sqrt(T)))``.  Returns ``inf`` when the
    top order statistics are all equal.
    """
    x = np.sort(np.asarray(values, dtype=float))[::-1]
    x = x[np.isfinite(x)]
    if k is None:
        k = max(10, int(math.sqrt(x.size)))
    if x.size <= k or x[k] <= 0:
        return math.inf
    h = float(np.mean(np.log(x[:k] / x[k])))
    return math.inf if h == 0 else 1.0 / h


def exp_integral_estimate(f, model, lam, T, M=None, seed=0):
    """Per-trial grid average of ``exp(λ|Rf|^2)`` and its mean over trials.

    ``threshold`` is ``1 / (2 ||K_N||^2 ||f||_2^2)``, below which the
    expectation is finite for every process with that covariance bound.
    ``blow_up`` is set when any trial overflows, when the running mean
    doubles between ``T/2`` and ``T``, or when the Hill tail index of the
    per-trial values is below 1 (an infinite-mean tail).
    """
    f, M = _resolve(f, model, M)
    lam = check_real("lam", lam, low=0)
    T = check_int("trials", T, minimum=2)
    knorm = op_norm_power_iter(truncate(model, f.degree)).estimate
    a2 = float(np.sum(np.abs(f.coeffs) ** 2))
    threshold = math.inf if knorm * a2 == 0 else 1.0 / (2.0 * knorm**2 * a2)

    def per_trial(values):
        expo = lam * np.abs(values) ** 2
        with np.errstate(over="ignore"):
            return np.where(expo.max(axis=-1) > _LOG_MAX, np.inf, np.mean(np.exp(np.minimum(expo, _LOG_MAX)), axis=-1))

    vals = trial_grid_map(f, model, T, seed, M, per_trial)
    overflow = int(np.sum(~np.isfinite(vals)))
    mean = float(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / math.sqrt(T)) if overflow == 0 else math.inf
    half = float(np.mean(vals[: T // 2]))
    tail = hill_tail_index(vals) if lam > 0 else math.inf
    reasons = []
    if overflow:
        reasons.append("overflow")
    if overflow == 0 and mean >= 2.0 * half:
        reasons.append("running_mean_doubled")
    if tail < 1.0:
        reasons.append("heavy_tail")
    return ExpEstimate(lam, mean, stderr, T, M, as_seed(seed).root_seed, threshold,
                       bool(reasons), overflow, half, tail, tuple(reasons))


@dataclass(frozen=True)
class SweepRow:
    degree: int
    deterministic_norm: float
    randomized_median: float


def improvement_sweep(family: Callable[[int], CoefficientSeries], model, p, degrees, T, seed, M=None):
    """Deterministic ``||f_N||_{H^p}`` next to the median of ``||R f_N||_{H^p}``.

    ``family`` maps a degree ``N`` to the series ``f_N``.  The same seed is
    used for every degree.
    """
    rows = []
    for N in degrees:
        fN = _as_series(family(check_int("degree", N, minimum=0)))
        grid = default_grid_size(fN.degree) if M is None else M
        det = float(power_mean(grid_values(fN.coeffs, grid), p))
        norms = trial_norms(fN, model, p, T, seed, grid)
        rows.append(SweepRow(int(N), det, float(np.median(norms))))
    return rows
