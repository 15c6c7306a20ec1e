"""Covariance families on ℓ², their finite sections, norms and factors.

Every family is a frozen dataclass exposing ``entry(i, j)`` and a vectorised
``block(i, j)``; ``truncate(model, N)`` builds the dense ``(N+1) x (N+1)``
section.  Norms of the infinite operators are never claimed: the module
reports finite-section estimates and, where one exists, the closed-form
limit of the Schur row-sum bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from ._validation import check_int, check_real, check_vector
from .exceptions import NotACovarianceError, ValidationError
from .sequences import SequenceSpec

DEFAULT_PSD_TOL = 1e-10


class CovarianceModel:
    """Base class; subclasses implement ``block`` and ``params``."""

    tag = "abstract"

    def block(self, i, j):
        raise NotImplementedError

    def params(self):
        return {}

    def entry(self, i, j):
        i = check_int("i", i, minimum=0)
        j = check_int("j", j, minimum=0)
        return float(self.block(np.asarray(i), np.asarray(j)))

    def diagonal(self, N):
        n = np.arange(N + 1)
        return self.block(n, n)

    def schur_limit(self):
        """Closed-form ``sup_i Σ_j |K(i,j)|`` of the infinite matrix, if known."""
        return None

    def describe(self):
        inner = ",".join(f"{k}={_fmt(v)}" for k, v in self.params().items())
        return f"{self.tag}({inner})"


def _fmt(value):
    if isinstance(value, SequenceSpec):
        return value.describe()
    if isinstance(value, (tuple, list)):
        return "[" + ";".join(f"{x:g}" for x in value) + "]"
    if isinstance(value, float):
        return f"{value:g}"
    return str(value)


@dataclass(frozen=True)
class Identity(CovarianceModel):
    tag = "identity"

    def block(self, i, j):
        return (np.asarray(i) == np.asarray(j)).astype(float)

    def schur_limit(self):
        return 1.0


@dataclass(frozen=True)
class Diagonal(CovarianceModel):
    """Independent coordinates with standard deviations ``sigma_n``."""

    sigma: SequenceSpec
    tag = "diagonal"

    def block(self, i, j):
        i, j = np.broadcast_arrays(np.asarray(i), np.asarray(j))
        out = np.zeros(i.shape)
        if i.size:
            sig = self.sigma.values(int(max(i.max(), j.max())))
            on = i == j
            out[on] = sig[i[on]] ** 2
        return out

    def params(self):
        return {"sigma": self.sigma}


def bartlett_template(bandwidth):
    """``1 - k/M`` for ``k < M``; positive definite as a Toeplitz band."""
    return tuple(1.0 - k / bandwidth for k in range(bandwidth))


@dataclass(frozen=True)
class Band(CovarianceModel):
    """Toeplitz band: ``K(i,j) = template[|i-j|]`` when ``|i-j| < M``, else 0.

    The default template is the Bartlett (triangular) kernel.
    """

    bandwidth: int = 3
    template: tuple = None
    tag = "band"

    def __post_init__(self):
        M = check_int("bandwidth", self.bandwidth, minimum=1)
        template = bartlett_template(M) if self.template is None else self.template
        template = tuple(float(x) for x in check_vector("template", template))
        if len(template) != M:
            raise ValidationError("template", f"needs exactly bandwidth={M} entries")
        object.__setattr__(self, "template", template)

    def block(self, i, j):
        d = np.abs(np.asarray(i) - np.asarray(j))
        table = np.asarray(self.template + (0.0,))
        return table[np.minimum(d, self.bandwidth)]

    def params(self):
        return {"bandwidth": self.bandwidth, "template": self.template}

    def schur_limit(self):
        t = np.abs(self.template)
        return float(t[0] + 2 * t[1:].sum())


@dataclass(frozen=True)
class Hilbert(CovarianceModel):
    tag = "hilbert"

    def block(self, i, j):
        return 1.0 / (np.asarray(i) + np.asarray(j) + 1.0)


@dataclass(frozen=True)
class ToeplitzGeometric(CovarianceModel):
    """Stationary Markov covariance ``sigma2 * c^{|i-j|}``."""

    sigma2: float = 1.0
    c: float = 0.5
    tag = "toeplitz_geometric"

    def __post_init__(self):
        object.__setattr__(self, "sigma2", check_real("sigma2", self.sigma2, low=0, low_inclusive=False))
        object.__setattr__(self, "c", check_real("c", self.c, low=-1, high=1, low_inclusive=False, high_inclusive=False))

    def block(self, i, j):
        d = np.abs(np.asarray(i) - np.asarray(j))
        return self.sigma2 * self.c ** d.astype(float)

    def params(self):
        return {"sigma2": self.sigma2, "c": self.c}

    def schur_limit(self):
        c = abs(self.c)
        return self.sigma2 * (1 + c) / (1 - c)


@dataclass(frozen=True)
class RankOne(CovarianceModel):
    """``K(i,j) = c_i c_j``: the process ``X_n = c_n ξ`` driven by one variable."""

    c: SequenceSpec
    tag = "rank_one"

    def block(self, i, j):
        i, j = np.broadcast_arrays(np.asarray(i), np.asarray(j))
        if not i.size:
            return np.zeros(i.shape)
        vals = self.c.values(int(max(i.max(), j.max())))
        return vals[i] * vals[j]

    def params(self):
        return {"c": self.c}


@dataclass(frozen=True)
class TriangularFactor(CovarianceModel):
    """``K = B B^T`` for a lower-triangular rule ``B[n, k] = b_k^n``.

    Without ``rule`` the geometric factor ``b_k^n = a c^{n-k}`` is used;
    ``a=1, c=1/2`` gives ``2^{k-n}``.  ``rule(n, k)`` must accept
    broadcastable integer arrays with ``k <= n``.
    """

    a: float = 1.0
    c: float = 0.5
    rule: Callable = field(default=None, compare=False)
    tag = "triangular_factor"

    @classmethod
    def dyadic(cls):
        return cls(a=1.0, c=0.5)

    def b(self, n, k):
        n, k = np.broadcast_arrays(np.asarray(n), np.asarray(k))
        if self.rule is not None:
            out = np.asarray(self.rule(n, k), dtype=float)
        else:
            out = self.a * float(self.c) ** np.maximum(n - k, 0).astype(float)
        return np.where(k <= n, out, 0.0)

    def factor_block(self, N):
        n = np.arange(N + 1)
        return self.b(n[:, None], n[None, :])

    def block(self, i, j):
        i, j = np.broadcast_arrays(np.asarray(i), np.asarray(j))
        out = np.empty(i.shape)
        for idx in np.ndindex(i.shape):
            k = np.arange(min(i[idx], j[idx]) + 1)
            out[idx] = float(np.dot(self.b(i[idx], k), self.b(j[idx], k)))
        return out

    def params(self):
        if self.rule is not None:
            return {"rule": getattr(self.rule, "__name__", "custom")}
        return {"a": self.a, "c": self.c}


FAMILIES = {
    cls.tag: cls
    for cls in (Identity, Diagonal, Band, Hilbert, ToeplitzGeometric, RankOne, TriangularFactor)
}


def make_model(family, **params):
    """Build a family from its tag, e.g. ``make_model("toeplitz_geometric", c=0.5)``.

    Sequence-valued parameters (``sigma`` for diagonal, ``c`` for rank_one)
    may be given as :class:`SequenceSpec` or in its text form.
    """
    try:
        cls = FAMILIES[family]
    except KeyError:
        raise ValidationError("family", f"unknown family {family!r}; choose from {sorted(FAMILIES)}") from None
    if cls is Diagonal:
        seq = params.pop("sigma", "const:1")
        params["sigma"] = seq if isinstance(seq, SequenceSpec) else SequenceSpec.parse(seq)
    if cls is RankOne:
        seq = params.pop("c", "const:1")
        params["c"] = seq if isinstance(seq, SequenceSpec) else SequenceSpec.parse(seq)
    if cls is Band and params.get("template") is not None:
        params["template"] = tuple(params["template"])
    try:
        return cls(**params)
    except TypeError as exc:
        raise ValidationError("family", f"bad parameters for {family}: {exc}") from None


@dataclass(frozen=True, eq=False)
class TruncatedMatrix:
    """Dense symmetric finite section ``K(i,j)``, ``0 <= i,j <= N``."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValidationError("matrix", f"must be square, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("matrix", "entries must be finite")
        if not np.array_equal(arr, arr.T):
            raise ValidationError("matrix", "must be exactly symmetric")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def order(self):
        return self.values.shape[0]

    @property
    def max_abs(self):
        return float(np.abs(self.values).max()) if self.values.size else 0.0


@dataclass(frozen=True, eq=False)
class FactorMatrix:
    """Lower-triangular ``L`` with ``L L^T ≈ K_N``.

    Stored densely, as a diagonal, or (for rank-one covariances) as a single
    first column; ``lower`` always materialises the dense matrix.
    """

    order: int
    dense: np.ndarray = None
    diag: np.ndarray = None
    column: np.ndarray = None

    @property
    def lower(self):
        if self.dense is not None:
            return self.dense
        if self.diag is not None:
            return np.diag(self.diag)
        out = np.zeros((self.order, self.order))
        out[:, 0] = self.column
        return out

    def apply(self, xi):
        """``X = L ξ`` for one vector or a stack of row vectors ``ξ``."""
        xi = np.asarray(xi, dtype=float)
        if self.diag is not None:
            return xi * self.diag
        if self.column is not None:
            return xi[..., :1] * self.column
        # Fixed summation order per row: a BLAS product may round a lone row
        # differently from the same row inside a larger batch.
        out = np.zeros(xi.shape[:-1] + (self.order,))
        for k in range(self.order):
            out[..., k:] += xi[..., k : k + 1] * self.dense[k:, k]
        return out

    def reconstruction(self):
        L = self.lower
        return L @ L.T


def truncate(model, N):
    N = check_int("N", N, minimum=0)
    if isinstance(model, TriangularFactor):
        B = model.factor_block(N)
        K = B @ B.T
        K = np.triu(K) + np.triu(K, 1).T
        return TruncatedMatrix(K)
    n = np.arange(N + 1)
    K = model.block(n[:, None], n[None, :])
    # Some kernels are only symmetric up to rounding; mirror the upper triangle.
    K = np.triu(K) + np.triu(K, 1).T
    return TruncatedMatrix(K)


class PowerIterationResult(NamedTuple):
    estimate: float
    iterations: int
    converged: bool
    residual: float


def _power_run(A, x, tol, max_iter):
    rho = 0.0
    residual = math.inf
    eps = np.finfo(float).eps
    for it in range(1, max_iter + 1):
        y = A @ x
        ynorm = np.linalg.norm(y)
        if ynorm == 0.0:
            return 0.0, it, True, 0.0
        rho_new = float(x @ y)
        previous = residual
        residual = float(np.linalg.norm(y - rho_new * x)) / max(abs(rho_new), np.finfo(float).tiny)
        if residual <= tol:
            return rho_new, it, True, residual
        # Rayleigh quotient frozen and residual no longer shrinking: the
        # iterate is cycling (e.g. a ±λ pair) rather than converging.
        frozen = abs(rho_new - rho) <= 8 * eps * max(abs(rho_new), 1e-300)
        if it > 1 and frozen and residual >= 0.99 * previous:
            rho = rho_new
            break
        rho = rho_new
        x = y / ynorm
    return rho, it, False, residual


def op_norm_power_iter(T, tol=1e-10, max_iter=10_000):
    """Largest-magnitude eigenvalue of a symmetric section by power iteration.

    Starts from the normalised all-ones vector and stops when the relative
    Rayleigh residual ``||Tx - ρx|| / |ρ|`` is at most ``tol``.  A second
    pass from the alternating-sign vector always follows, and the larger
    converged estimate wins: a clean convergence from the ones vector can
    still miss the top eigenvalue when its eigenvector is orthogonal to
    (1, ..., 1), as happens for Toeplitz sections with negative ratio.
    For a PSD section the returned estimate is its ℓ² operator norm.
    """
    A = T.values if isinstance(T, TruncatedMatrix) else TruncatedMatrix(T).values
    tol = check_real("tol", tol, low=0, low_inclusive=False)
    max_iter = check_int("max_iter", max_iter, minimum=1)
    n = A.shape[0]
    starts = [np.ones(n)]
    if n > 1:
        starts.append(np.where(np.arange(n) % 2 == 0, 1.0, -1.0))
    runs = [_power_run(A, x / math.sqrt(n), tol, max_iter) for x in starts]
    total = sum(r[1] for r in runs)
    converged = [r for r in runs if r[2]]
    if converged:
        rho, _, _, res = max(converged, key=lambda r: abs(r[0]))
    else:
        rho, _, _, res = min(runs, key=lambda r: r[3])
    return PowerIterationResult(abs(rho), total, bool(converged), res)


def op_norm(T, tol=1e-10, max_iter=10_000):
    """Power-iteration estimate only (ignores the convergence flag)."""
    return op_norm_power_iter(T, tol, max_iter).estimate


def schur_bound(model, N):
    """``max_{i<=N} Σ_{j<=N} |K(i,j)|`` (Schur test with unit weights)."""
    K = truncate(model, N).values
    return float(np.abs(K).sum(axis=1).max())


def _scale(T):
    return max(1.0, float(np.abs(T).max())) if T.size else 1.0


def psd_check(T, psd_tol=DEFAULT_PSD_TOL):
    A = T.values if isinstance(T, TruncatedMatrix) else TruncatedMatrix(T).values
    return bool(np.linalg.eigvalsh(A)[0] >= -psd_tol * _scale(A))


def factor(T, psd_tol=DEFAULT_PSD_TOL):
    """Lower-triangular factor of a PSD section.

    Positive-definite input goes through Cholesky directly.  Otherwise the
    eigendecomposition is used: eigenvalues within ``psd_tol`` (relative) of
    zero are set to zero, ``B = V sqrt(Λ)`` and the QR decomposition
    ``B^T = QR`` gives ``L = R^T``.  Eigenvalues are clipped rather than
    jittered so the sampled law is unchanged.
    """
    A = T.values if isinstance(T, TruncatedMatrix) else TruncatedMatrix(T).values
    n = A.shape[0]
    try:
        L = np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        pass
    else:
        return FactorMatrix(n, dense=L)
    w, V = np.linalg.eigh(A)
    cut = psd_tol * _scale(A)
    if w[0] < -cut:
        raise NotACovarianceError(f"smallest eigenvalue {w[0]:.3e} is below -{cut:.3e}")
    w = np.where(w > cut, w, 0.0)
    B = V * np.sqrt(w)
    R = np.linalg.qr(B.T, mode="r")
    signs = np.where(np.diag(R) < 0, -1.0, 1.0)
    L = (signs[:, None] * R).T
    return FactorMatrix(n, dense=np.tril(L))


def factor_model(model, N, psd_tol=DEFAULT_PSD_TOL):
    """Factor of ``truncate(model, N)`` with structure-aware shortcuts.

    Diagonal families give a diagonal factor, rank-one families a single
    column and triangular-factor families their own rule ``B``.
    """
    N = check_int("N", N, minimum=0)
    if isinstance(model, Identity):
        return FactorMatrix(N + 1, diag=np.ones(N + 1))
    if isinstance(model, Diagonal):
        return FactorMatrix(N + 1, diag=np.abs(model.sigma.values(N)))
    if isinstance(model, RankOne):
        return FactorMatrix(N + 1, column=model.c.values(N))
    if isinstance(model, TriangularFactor):
        return FactorMatrix(N + 1, dense=model.factor_block(N))
    return factor(truncate(model, N), psd_tol)


def apply(T, v):
    A = T.values if isinstance(T, TruncatedMatrix) else np.asarray(T, dtype=float)
    v = check_vector("v", v)
    if v.size != A.shape[1]:
        raise ValidationError("v", f"length {v.size} does not match order {A.shape[1]}")
    return A @ v


def quadratic_form(T, v):
    v = check_vector("v", v)
    return float(v @ apply(T, v))


def rank_one_norm(c, N):
    """Exact norm ``Σ_{n<=N} c_n^2`` of the rank-one section ``c c^T``."""
    vals = c.values(N) if isinstance(c, SequenceSpec) else check_vector("c", c)[: N + 1]
    return float(np.sum(vals**2))
