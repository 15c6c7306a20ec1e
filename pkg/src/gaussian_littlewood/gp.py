"""Seedable sampling of ``X = L ξ + μ``.

Standard normals come from a counter-based generator so that a variate is a
pure function of ``(root_seed, stream_id, index)``.  The construction, in
unsigned 64-bit arithmetic (all operations mod 2^64):

``mix(z)``
    the SplitMix64 finaliser::

        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
        z = (z ^ (z >> 27)) * 0x94D049BB133111EB
        z =  z ^ (z >> 31)

``key``
    ``mix(mix(root_seed) ^ mix(stream_id + GOLDEN))`` with
    ``GOLDEN = 0x9E3779B97F4A7C15``.
``word_i``
    ``mix(key + (i + 1) * GOLDEN)`` for counter ``i = 0, 1, 2, ...``.
``u_i``
    ``((word_i >> 11) + 1) * 2^-53``, a double in ``(0, 1]``.

Box–Muller turns each pair ``(u_{2j}, u_{2j+1})`` into
``r cos θ, r sin θ`` with ``r = sqrt(-2 log u_{2j})`` and
``θ = 2π u_{2j+1}``; an odd ``count`` drops the final sine.  Monte Carlo
trial ``t`` of any experiment uses ``stream_id = base + t``, so estimates do
not depend on how trials are batched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_int, check_seed, check_vector
from .covops import CovarianceModel, factor_model
from .exceptions import ValidationError

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class SeedSpec:
    root_seed: int = 0
    stream_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "root_seed", check_seed("root_seed", self.root_seed))
        object.__setattr__(self, "stream_id", check_seed("stream_id", self.stream_id))

    def __str__(self):
        return f"{self.root_seed}:{self.stream_id}"


def as_seed(seed):
    if isinstance(seed, SeedSpec):
        return seed
    return SeedSpec(check_seed("seed", seed), 0)


def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _keys(root_seed, stream_ids):
    with np.errstate(over="ignore"):
        root = _mix(np.array([root_seed], dtype=np.uint64))
        streams = _mix(np.asarray(stream_ids, dtype=np.uint64) + GOLDEN)
        return _mix(root ^ streams)


def uniform_block(root_seed, stream_ids, count):
    """``(len(stream_ids), count)`` uniforms in ``(0, 1]``."""
    keys = _keys(root_seed, stream_ids)
    counters = np.arange(1, count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        words = _mix(keys[:, None] + counters[None, :] * GOLDEN)
    return ((words >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53


def gaussian_block(root_seed, stream_ids, count):
    """Standard normals, one row per stream; row ``s`` equals
    ``gaussian_stream(SeedSpec(root_seed, stream_ids[s]), count)``."""
    root_seed = check_seed("root_seed", root_seed)
    count = check_int("count", count, minimum=0)
    stream_ids = np.atleast_1d(np.asarray(stream_ids, dtype=np.uint64))
    pairs = (count + 1) // 2
    u = uniform_block(root_seed, stream_ids, 2 * pairs)
    r = np.sqrt(-2.0 * np.log(u[:, 0::2]))
    theta = _TWO_PI * u[:, 1::2]
    out = np.empty((stream_ids.size, 2 * pairs))
    out[:, 0::2] = r * np.cos(theta)
    out[:, 1::2] = r * np.sin(theta)
    return out[:, :count]


def gaussian_stream(seed, count):
    seed = as_seed(seed)
    return gaussian_block(seed.root_seed, [seed.stream_id], count)[0]


@dataclass(frozen=True, eq=False)
class GaussianSample:
    values: np.ndarray
    model_id: str
    seed: SeedSpec
    mean: np.ndarray = None

    def __post_init__(self):
        vals = check_vector("values", self.values).copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def N(self):
        return self.values.size - 1


def _check_mean(mean, N):
    if mean is None:
        return None
    mean = check_vector("mean", mean)
    if mean.size != N + 1:
        raise ValidationError("mean", f"needs N+1={N + 1} entries, got {mean.size}")
    return mean


def sample_block(model, N, root_seed, stream_ids, mean=None, factor=None):
    """Realisations for several streams at once, shape ``(len(stream_ids), N+1)``."""
    N = check_int("N", N, minimum=0)
    L = factor_model(model, N) if factor is None else factor
    X = L.apply(gaussian_block(root_seed, stream_ids, N + 1))
    mean = _check_mean(mean, N)
    if mean is not None:
        X = X + mean
    return X


def sample_process(model, N, seed, mean=None, factor=None):
    """One realisation ``X_0..X_N`` of the process with covariance ``model``.

    ``factor`` may be passed to reuse a precomputed :class:`FactorMatrix`.
    """
    if not isinstance(model, CovarianceModel):
        raise ValidationError("model", f"expected a CovarianceModel, got {type(model).__name__}")
    seed = as_seed(seed)
    mean = _check_mean(mean, check_int("N", N, minimum=0))
    X = sample_block(model, N, seed.root_seed, [seed.stream_id], mean, factor)[0]
    return GaussianSample(X, model.describe(), seed, mean)


@dataclass(frozen=True)
class CovEstimate:
    value: float
    stderr: float
    trials: int


def empirical_cov(samples, i, j):
    """``(1/T) Σ_t X_i^{(t)} X_j^{(t)}`` for centred samples, with its standard error.

    ``samples`` is a sequence of :class:`GaussianSample` or a 2-D array with
    one realisation per row.
    """
    if isinstance(samples, np.ndarray):
        arr = samples
    else:
        arr = np.stack([s.values for s in samples])
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise ValidationError("samples", "need a non-empty collection of equal-length samples")
    T = arr.shape[0]
    prod = arr[:, i] * arr[:, j]
    return CovEstimate(float(prod.mean()), float(np.sqrt(np.mean(prod**2) / T)), T)


def radius_statistic(sample, n0):
    """``max_{n0 <= n <= N} |X_n|^{1/n}``; a zero entry contributes 0."""
    values = sample.values if isinstance(sample, GaussianSample) else check_vector("sample", sample)
    N = values.size - 1
    n0 = check_int("n0", n0, minimum=1)
    if n0 > N:
        raise ValidationError("n0", f"must be <= N={N}")
    n = np.arange(n0, N + 1)
    mag = np.abs(values[n0:])
    with np.errstate(divide="ignore"):
        stat = np.where(mag > 0, np.exp(np.log(mag) / n), 0.0)
    return float(stat.max())
