"""Coefficient-multiplier tests and necessary-condition diagnostics.

Statements such as "λ is bounded" or "K(n, m) = o(n^{-1/2+ε})" are about
infinite sequences.  Each diagnostic therefore reports finite-range values
together with how they move when the range is doubled, and the pass/fail
flags encode documented thresholds rather than proofs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_int, check_real, check_vector
from .covops import apply, op_norm_power_iter, truncate
from .exceptions import ValidationError
from .gp import as_seed, sample_block
from .hardy import LacunarySeries, _as_series, gap_ratio
from .littlewood import SIGMA_MARGIN

# Relative growth under N-doubling still counted as "stable".
STABILITY_RTOL = 1e-2
# Dyadic windows must shrink at least this fast after the burn-in.
DECAY_FACTOR = 0.9
DECAY_BURN_IN = 2


@dataclass(frozen=True)
class MultiplierReport:
    name: str
    p: float
    value: float
    value_doubled: float
    stable: bool


def linf_bound(seq, N):
    """``sup_{n<=N} |λ_n|``."""
    return float(np.max(np.abs(seq.values(check_int("N", N, minimum=0)))))


def duren_rate(seq, p, N):
    """``sup_{1<=n<=N} |c_n| n^{1/2 - 1/p}``; bounded rates give (H^2, H^p) multipliers."""
    p = check_real("p", p, low=2, low_inclusive=False)
    N = check_int("N", N, minimum=1)
    n = np.arange(1, N + 1)
    return float(np.max(np.abs(seq.values(N, start=1)) * n ** (0.5 - 1.0 / p)))


def multiplier_test(seq, p, N):
    """Bounded under doubling ⇒ passes: ℓ^∞ for ``p <= 2``, Duren's rate for ``p > 2``."""
    p = check_real("p", p, low=0, low_inclusive=False)
    if p <= 2:
        name, fn = "linf", lambda M: linf_bound(seq, M)
    else:
        name, fn = "duren_rate", lambda M: duren_rate(seq, p, M)
    v, v2 = fn(N), fn(2 * N)
    stable = math.isfinite(v2) and v2 <= v * (1 + STABILITY_RTOL) + 1e-300
    return MultiplierReport(name, p, v, v2, bool(stable))


@dataclass(frozen=True)
class DecayReport:
    m: int
    eps: float
    p: float
    N: int
    applicable: bool
    window_sups: tuple
    trend_ok: bool
    partial_sum: float
    partial_sum_doubled: float
    series_stable: bool


def _row(model, m, N):
    n = np.arange(N + 1)
    return np.abs(model.block(n, np.full_like(n, m)))


def _window_sups(weighted, N):
    sups = []
    j = 0
    while (1 << (j + 1)) - 1 <= N:
        lo, hi = 1 << j, 1 << (j + 1)
        sups.append(float(weighted[lo:hi].max()))
        j += 1
    return tuple(sups)


def _trend_ok(sups):
    tail = sups[DECAY_BURN_IN:]
    if len(tail) < 2:
        return False
    return all(b <= DECAY_FACTOR * a for a, b in zip(tail, tail[1:]) if a > 0) and all(
        b == 0 for a, b in zip(tail, tail[1:]) if a == 0
    )


def _series(row, eps, p, N):
    n = np.arange(1, N + 1)
    return float(np.sum((n + 1.0) ** (p - 2) * (row[1 : N + 1] / n ** (0.5 + eps)) ** p))


def necessary_decay_diagnostic(model, m, eps, p, N):
    """Decay of the covariance row ``|K(n, m)|`` against ``n^{-1/2+ε}``.

    The row must be nonincreasing from index ``m`` on; otherwise the report is
    marked not applicable.  ``window_sups`` holds the sup of
    ``|K(n, m)| n^{1/2-ε}`` over each dyadic window ``[2^j, 2^{j+1})``;
    ``trend_ok`` asks every window after ``DECAY_BURN_IN`` to be at most
    ``DECAY_FACTOR`` times the previous one.  The partial sums of
    ``Σ (n+1)^{p-2} (|K(n,m)| / n^{1/2+ε})^p`` are reported at ``N`` and ``2N``.
    """
    m = check_int("m", m, minimum=0)
    eps = check_real("eps", eps, low=0, low_inclusive=False)
    p = check_real("p", p, low=1)
    N = check_int("N", N, minimum=1)
    row = _row(model, m, 2 * N)
    tail = row[m:]
    applicable = bool(np.all(np.diff(tail) <= 1e-12 * max(tail.max(), 1.0)))
    n = np.arange(N + 1)
    weighted = row[: N + 1] * np.where(n > 0, n, 1) ** (0.5 - eps)
    sups = _window_sups(weighted, N)
    s1, s2 = _series(row, eps, p, N), _series(row, eps, p, 2 * N)
    stable = s2 <= s1 * (1 + STABILITY_RTOL) + 1e-300
    return DecayReport(m, eps, p, N, applicable, sups, applicable and _trend_ok(sups), s1, s2, bool(stable))


@dataclass(frozen=True)
class WienerReport:
    N: int
    wiener_sum: float
    row_norm: float
    op_norm: float
    lam_norm: float
    l2_inequality: bool


def wiener_check(model, lam, a, N):
    """Row ``E(X X_n) = (Kλ)_n`` for ``X = Σ λ_k X_k`` and its summability against ``a``.

    Reports ``Σ |(Kλ)_n a_n|`` and whether ``||Kλ||_2 <= ||K_N|| ||λ||_2 + 1e-9``.
    """
    N = check_int("N", N, minimum=0)
    lam = _pad(check_vector("lam", lam), N)
    a = _pad(check_vector("a", a, dtype=complex), N)
    T = truncate(model, N)
    row = apply(T, lam)
    norm = op_norm_power_iter(T).estimate
    lam_norm = float(np.linalg.norm(lam))
    row_norm = float(np.linalg.norm(row))
    return WienerReport(N, float(np.sum(np.abs(row * a))), row_norm, norm, lam_norm,
                        bool(row_norm <= norm * lam_norm + 1e-9))


def _pad(v, N):
    if v.size > N + 1:
        return v[: N + 1]
    return np.pad(v, (0, N + 1 - v.size))


@dataclass(frozen=True)
class LacunaryReport:
    gap_ratio: float
    mean: float
    stderr: float
    expected: float
    bound: float
    trials: int
    seed: int
    matches_expected: bool
    below_bound: bool


def lacunary_hp_criterion(f, model, T, seed):
    """Monte Carlo ``E Σ |a_n X_n|^2`` for a lacunary series.

    ``expected`` is ``Σ |a_n|^2 K(n,n)``; ``bound`` is
    ``sup_n K(n,n) · Σ |a_n|^2``.
    """
    f = _as_series(f)
    T = check_int("trials", T, minimum=2)
    support = np.flatnonzero(f.coeffs)
    ratio = f.gap_ratio if isinstance(f, LacunarySeries) else gap_ratio(support.tolist())
    if not ratio > 1:
        raise ValidationError("f", f"support is not lacunary (gap ratio {ratio})")
    seed = as_seed(seed)
    N = f.degree
    a2 = np.abs(f.coeffs) ** 2
    diag = model.diagonal(N)
    if support.size == 0:
        vals = np.zeros(T)
    else:
        streams = seed.stream_id + np.arange(T, dtype=np.uint64)
        X = sample_block(model, N, seed.root_seed, streams)
        vals = (X**2) @ a2
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(T))
    expected = float(a2 @ diag)
    bound = float(diag.max() * a2.sum())
    return LacunaryReport(ratio, mean, se, expected, bound, T, seed.root_seed,
                          bool(abs(mean - expected) <= SIGMA_MARGIN * se + 1e-12),
                          bool(mean - SIGMA_MARGIN * se <= bound + 1e-12))
