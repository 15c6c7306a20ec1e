"""Truncated power series on the unit disk and their H^p norms.

A series ``f(z) = a_0 + a_1 z + ... + a_N z^N`` is stored as its coefficient
vector.  H^p norms are computed on the boundary circle with the normalised
measure ``dθ/2π``, approximated by the equal-weight rule on the ``M``-th roots
of unity::

    ||f||_p ≈ ( (1/M) Σ_k |f(ω^k)|^p )^(1/p),   ω = exp(2πi/M).

For ``|f|^2`` (a trigonometric polynomial of degree ``N``) this rule is exact
once ``M >= 2N+1``; for ``|f|^{2m} = |f^m|^2`` once ``M >= 2mN+1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_int, check_real, check_vector
from .exceptions import ValidationError


@dataclass(frozen=True, eq=False)
class CoefficientSeries:
    """Coefficients ``a_0..a_N`` of a polynomial in ``z``.

    Trailing zeros are kept, so ``degree`` is the index of the last *stored*
    coefficient rather than the algebraic degree.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        arr = check_vector("coeffs", self.coeffs, dtype=complex).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @property
    def degree(self):
        return self.coeffs.size - 1

    def __len__(self):
        return self.coeffs.size

    def __eq__(self, other):
        if not isinstance(other, CoefficientSeries):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def scale(self, c):
        return CoefficientSeries(c * self.coeffs)

    def truncate(self, degree):
        return CoefficientSeries(self.coeffs[: degree + 1])

    @classmethod
    def monomial(cls, k, amplitude=1.0):
        coeffs = np.zeros(check_int("k", k, minimum=0) + 1, dtype=complex)
        coeffs[k] = amplitude
        return cls(coeffs)


@dataclass(frozen=True, eq=False)
class LacunarySeries(CoefficientSeries):
    """A series supported on a strictly increasing index set.

    ``gap_ratio`` is ``inf n_{k+1}/n_k`` over the positive support indices
    (``inf`` when fewer than two positive indices are present).
    """

    support: tuple = field(default=())
    gap_ratio: float = float("inf")

    def is_lacunary(self, threshold=1.0):
        """True when the recorded gap ratio exceeds ``threshold``."""
        return self.gap_ratio > threshold


@dataclass(frozen=True)
class BoundaryValues:
    values: np.ndarray
    grid_size: int


@dataclass(frozen=True)
class NormResult:
    p: float
    value: float
    grid_size: int
    exact: bool


def default_grid_size(degree):
    """Smallest power of two that is at least ``max(8(N+1), 64)``."""
    target = max(8 * (degree + 1), 64)
    return 1 << (target - 1).bit_length()


def _as_series(f):
    if isinstance(f, CoefficientSeries):
        return f
    return CoefficientSeries(f)


def grid_values(coeffs, M):
    """Evaluate coefficient rows on the ``M`` roots of unity.

    ``coeffs`` may be 1-D or 2-D (rows are independent series).  Coefficients
    beyond index ``M-1`` are folded onto their residue class, which is exact
    because ``ω^{nk}`` only depends on ``n mod M``.
    """
    coeffs = np.asarray(coeffs)
    n = coeffs.shape[-1]
    if n > M:
        pad = (-n) % M
        if pad:
            widths = [(0, 0)] * (coeffs.ndim - 1) + [(0, pad)]
            coeffs = np.pad(coeffs, widths)
        coeffs = coeffs.reshape(coeffs.shape[:-1] + (-1, M)).sum(axis=-2)
        n = M
    # Σ_n a_n ω^{nk} with ω = exp(+2πi/M) is M times the inverse DFT.
    return np.fft.ifft(coeffs, n=M, axis=-1) * M


def power_mean(values, p, axis=-1):
    """``((1/M) Σ |v|^p)^(1/p)`` along ``axis``, scaled to avoid overflow."""
    mag = np.abs(values)
    top = mag.max(axis=axis, keepdims=True)
    safe = np.where(top > 0, top, 1.0)
    ratio = np.mean((mag / safe) ** p, axis=axis)
    return np.squeeze(safe, axis=axis) * ratio ** (1.0 / p)


def eval_on_grid(f, M):
    f = _as_series(f)
    M = check_int("M", M, minimum=1)
    return BoundaryValues(grid_values(f.coeffs, M), M)


def horner_on_grid(f, M):
    """Pointwise Horner evaluation at ``exp(2πik/M)``; slow reference path."""
    f = _as_series(f)
    M = check_int("M", M, minimum=1)
    z = np.exp(2j * np.pi * np.arange(M) / M)
    acc = np.zeros(M, dtype=complex)
    for a in f.coeffs[::-1]:
        acc = acc * z + a
    return acc


def _is_exact(p, degree, M):
    if p == 2:
        return M >= 2 * degree + 1
    if float(p).is_integer() and int(p) % 2 == 0:
        return M >= int(p) * degree + 1
    return False


def hp_norm_grid(f, p, M=None):
    """Grid approximation of ``||f||_{H^p}``.

    ``0 < p < 1`` is accepted and returns the quasi-norm.  ``exact`` is set
    only when the quadrature is provably exact for this ``(p, N, M)``.
    """
    f = _as_series(f)
    p = check_real("p", p, low=0, low_inclusive=False)
    M = default_grid_size(f.degree) if M is None else check_int("M", M, minimum=1)
    values = grid_values(f.coeffs, M)
    return NormResult(p, float(power_mean(values, p)), M, _is_exact(p, f.degree, M))


def hp_norm(f, p, M=None):
    """Shortcut for ``hp_norm_grid(f, p, M).value``."""
    return hp_norm_grid(f, p, M).value


def hp_norm_even_oracle(f, m):
    """``||f||_{2m}`` as ``||f^m||_2^{1/m}``, by repeated coefficient convolution."""
    f = _as_series(f)
    m = check_int("m", m, minimum=1)
    scale = float(np.abs(f.coeffs).max())
    if scale == 0:
        return 0.0
    unit = f.coeffs / scale
    power = unit
    for _ in range(m - 1):
        power = np.convolve(power, unit)
    return scale * float(np.linalg.norm(power) ** (1.0 / m))


def l2_norm(f):
    f = _as_series(f)
    return float(np.linalg.norm(f.coeffs))


def make_boundary_example(N):
    """``a_n = 1 / (sqrt(n+1) log(n+2))``: square-summable but only barely."""
    N = check_int("N", N, minimum=0)
    n = np.arange(N + 1)
    return CoefficientSeries(1.0 / (np.sqrt(n + 1.0) * np.log(n + 2.0)))


def gap_ratio(support):
    positive = [k for k in support if k > 0]
    if len(positive) < 2:
        return float("inf")
    return min(b / a for a, b in zip(positive, positive[1:]))


def make_lacunary(support, amplitudes=None):
    """Series with nonzero coefficients only on ``support``.

    ``amplitudes`` defaults to ones.  The support must be strictly increasing
    and nonnegative.
    """
    support = tuple(int(k) for k in support)
    if not support:
        raise ValidationError("support", "must not be empty")
    if support[0] < 0 or any(b <= a for a, b in zip(support, support[1:])):
        raise ValidationError("support", "must be strictly increasing and nonnegative")
    if amplitudes is None:
        amplitudes = np.ones(len(support))
    amplitudes = check_vector("amplitudes", amplitudes, dtype=complex)
    if amplitudes.size != len(support):
        raise ValidationError("amplitudes", "length must match support")
    coeffs = np.zeros(support[-1] + 1, dtype=complex)
    coeffs[list(support)] = amplitudes
    return LacunarySeries(coeffs, support=support, gap_ratio=gap_ratio(support))
