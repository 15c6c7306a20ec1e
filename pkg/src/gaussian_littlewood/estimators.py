"""scikit-learn compatible wrappers.

Rows of ``X`` are coefficient vectors ``(a_0, ..., a_N)``, so the pieces
compose in a :class:`~sklearn.pipeline.Pipeline`::

    Pipeline([("R", GaussianRandomizer(model=Hilbert(), seed=3)),
              ("norm", HardyNorm(p=4))]).fit_transform(X)
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from ._validation import check_coefficient_array, check_int, check_real, check_seed
from .covops import DEFAULT_PSD_TOL, CovarianceModel, Identity, factor_model
from .exceptions import ValidationError
from .gp import gaussian_block
from .hardy import CoefficientSeries, default_grid_size, grid_values, power_mean
from .littlewood import estimate_mixed_norm


def _check_model(model):
    model = Identity() if model is None else model
    if not isinstance(model, CovarianceModel):
        raise ValidationError("model", f"expected a CovarianceModel, got {type(model).__name__}")
    return model


class HardyNorm(TransformerMixin, BaseEstimator):
    """Map each coefficient row to its grid ``H^p`` norm (output shape ``(n, 1)``)."""

    def __init__(self, p=2.0, grid_size=None):
        self.p = p
        self.grid_size = grid_size

    def fit(self, X, y=None):
        X = check_coefficient_array(X)
        check_real("p", self.p, low=0, low_inclusive=False)
        if self.grid_size is not None:
            check_int("grid_size", self.grid_size, minimum=1)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        if not hasattr(self, "n_features_in_"):
            raise NotFittedError("HardyNorm is not fitted yet")
        X = check_coefficient_array(X)
        M = self.grid_size or default_grid_size(X.shape[1] - 1)
        return power_mean(grid_values(X, M), float(self.p)).reshape(-1, 1)


class GaussianRandomizer(TransformerMixin, BaseEstimator):
    """Multiply each coefficient row by an independent realisation of the process.

    Row ``i`` of every ``transform`` call uses stream ``stream_offset + i``,
    so transforming the same ``X`` twice gives the same output.

    Parameters
    ----------
    model : CovarianceModel, default=None
        Covariance family; ``None`` means the identity (iid standard normals).
    seed : int, default=0
        Root seed of the counter-based generator.
    stream_offset : int, default=0
    psd_tol : float, default=1e-10
    """

    def __init__(self, model=None, seed=0, stream_offset=0, psd_tol=DEFAULT_PSD_TOL):
        self.model = model
        self.seed = seed
        self.stream_offset = stream_offset
        self.psd_tol = psd_tol

    def fit(self, X, y=None):
        X = check_coefficient_array(X)
        self.model_ = _check_model(self.model)
        check_seed("seed", self.seed)
        check_seed("stream_offset", self.stream_offset)
        self.n_features_in_ = X.shape[1]
        self.factor_ = factor_model(self.model_, X.shape[1] - 1, self.psd_tol)
        return self

    def sample(self, n_samples):
        """Process realisations for streams ``stream_offset .. stream_offset + n - 1``."""
        if not hasattr(self, "factor_"):
            raise NotFittedError("GaussianRandomizer is not fitted yet")
        streams = self.stream_offset + np.arange(n_samples, dtype=np.uint64)
        return self.factor_.apply(gaussian_block(self.seed, streams, self.n_features_in_))

    def transform(self, X):
        X = check_coefficient_array(X)
        if not hasattr(self, "factor_"):
            raise NotFittedError("GaussianRandomizer is not fitted yet")
        if X.shape[1] != self.n_features_in_:
            raise ValidationError("X", f"expected {self.n_features_in_} coefficients per row, got {X.shape[1]}")
        return X * self.sample(X.shape[0])


class MixedNormEstimator(BaseEstimator):
    """Monte Carlo ``||R f||_{L^q(Ω, H^p)}`` for every row of ``X``.

    Nothing is learned from data; ``fit`` validates the parameters and
    ``predict`` runs one estimate per row with the same seed.
    """

    def __init__(self, model=None, p=2.0, q=2.0, trials=1000, seed=0, grid_size=None):
        self.model = model
        self.p = p
        self.q = q
        self.trials = trials
        self.seed = seed
        self.grid_size = grid_size

    def fit(self, X=None, y=None):
        self.model_ = _check_model(self.model)
        check_real("p", self.p, low=0, low_inclusive=False)
        check_real("q", self.q, low=1)
        check_int("trials", self.trials, minimum=2)
        check_seed("seed", self.seed)
        return self

    def estimate(self, X):
        """One :class:`~gaussian_littlewood.littlewood.MomentEstimate` per row."""
        if not hasattr(self, "model_"):
            raise NotFittedError("MixedNormEstimator is not fitted yet")
        X = check_coefficient_array(X)
        return [
            estimate_mixed_norm(CoefficientSeries(row), self.model_, self.p, self.q,
                                self.trials, self.seed, self.grid_size)
            for row in X
        ]

    def predict(self, X):
        return np.array([e.mean for e in self.estimate(X)])
