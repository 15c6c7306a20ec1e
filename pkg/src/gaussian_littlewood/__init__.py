"""Gaussian randomisation of Hardy-space power series.

Build covariance operators, sample the (generally dependent) Gaussian
processes they define, randomise power-series coefficients with them and
check the resulting H^p moment bounds numerically.
"""

from .covops import (
    Band,
    CovarianceModel,
    Diagonal,
    FactorMatrix,
    Hilbert,
    Identity,
    RankOne,
    ToeplitzGeometric,
    TriangularFactor,
    TruncatedMatrix,
    apply,
    factor,
    factor_model,
    make_model,
    op_norm_power_iter,
    psd_check,
    rank_one_norm,
    schur_bound,
    truncate,
)
from .estimators import GaussianRandomizer, HardyNorm, MixedNormEstimator
from .exceptions import NonConvergenceError, NotACovarianceError, ValidationError
from .gp import GaussianSample, SeedSpec, empirical_cov, gaussian_stream, radius_statistic, sample_process
from .hardy import (
    CoefficientSeries,
    eval_on_grid,
    hp_norm,
    hp_norm_even_oracle,
    hp_norm_grid,
    l2_norm,
    make_boundary_example,
    make_lacunary,
)
from .littlewood import (
    BoundReport,
    MomentEstimate,
    c_q,
    estimate_mixed_norm,
    exp_integral_estimate,
    improvement_sweep,
    mean_part,
    moment_equivalence_check,
    randomize,
    verify_bounds,
)
from .multipliers import (
    duren_rate,
    lacunary_hp_criterion,
    linf_bound,
    multiplier_test,
    necessary_decay_diagnostic,
    wiener_check,
)
from .sequences import SequenceSpec

__all__ = [
    "Band",
    "BoundReport",
    "CoefficientSeries",
    "CovarianceModel",
    "Diagonal",
    "FactorMatrix",
    "GaussianRandomizer",
    "GaussianSample",
    "HardyNorm",
    "Hilbert",
    "Identity",
    "MixedNormEstimator",
    "MomentEstimate",
    "NonConvergenceError",
    "NotACovarianceError",
    "RankOne",
    "SeedSpec",
    "SequenceSpec",
    "ToeplitzGeometric",
    "TriangularFactor",
    "TruncatedMatrix",
    "ValidationError",
    "apply",
    "c_q",
    "duren_rate",
    "empirical_cov",
    "estimate_mixed_norm",
    "eval_on_grid",
    "exp_integral_estimate",
    "factor",
    "factor_model",
    "gaussian_stream",
    "hp_norm",
    "hp_norm_even_oracle",
    "hp_norm_grid",
    "improvement_sweep",
    "l2_norm",
    "lacunary_hp_criterion",
    "linf_bound",
    "make_boundary_example",
    "make_lacunary",
    "make_model",
    "mean_part",
    "moment_equivalence_check",
    "multiplier_test",
    "necessary_decay_diagnostic",
    "op_norm_power_iter",
    "psd_check",
    "radius_statistic",
    "randomize",
    "rank_one_norm",
    "sample_process",
    "schur_bound",
    "truncate",
    "verify_bounds",
    "wiener_check",
]

__version__ = "0.1.0"
