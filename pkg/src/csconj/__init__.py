"""Conjugate Bayesian inference for Gaussian models with compound-symmetric structure."""

from importlib.metadata import PackageNotFoundError, version

from .conjugate import (
    MeanPrecisionPrior,
    MeanVariancePrior,
    PrecisionPrior,
    SuffStatsKnownMean,
    SuffStatsUnknownMean,
    VariancePrior,
    log_density_eta,
    log_density_sigma,
    log_evidence_known_mean,
    sample_eta,
    sample_sigma,
    suff_stats_known_mean,
    suff_stats_unknown_mean,
    update_mean_precision_prior,
    update_mean_variance_prior,
    update_precision_prior,
    update_variance_prior,
)
from .errors import CsError, DataError, DimensionError, DomainError, MethodError, NumericError, SingularMatrixError
from .intercept import GibbsConfig, GroupedData, RiParams, TestReport, em_fit, gibbs_run, test_positivity
from .linalg import CsPair, SymmetricSummary, cone_contains, cs_determinant, cs_inverse, nearest_cs
from .rng import RngStream

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"
