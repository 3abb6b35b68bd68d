"""
Conjugate prior families for Gaussian models with compound-symmetric structure.

Two parameterisations of the Gaussian are used:

* precision form, with the half-precision ``H = Sigma^{-1} / 2`` written as
  the CS pair ``eta = (eta1, eta2)``; the density of one observation is
  ``pi^{-d/2} |H|^{1/2} exp(-(x - mu)^T H (x - mu))``;
* covariance form, with ``Sigma`` written as ``sigma = (sigma1, sigma2)``.

Each family is the image of two independent (inverse-)gamma variables
under the cone transform ``(y1, y2) -> (y1 + y2, y1 - y2/(d-1))``.  The
canonical hyperparameters are the shapes ``alpha1, alpha2`` and rates
``lambda1, lambda2`` of those two variables.  ``alpha1`` goes with the
eigenvalue along ``1`` and ``alpha2`` with the ``d - 1`` fold eigenvalue,
so data add ``n/2`` to ``alpha1`` and ``n(d-1)/2`` to ``alpha2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DomainError
from .linalg import (
    CsPair,
    _to_cone,
    cs_inverse,
    cs_log_determinant,
    cs_quadratic_form,
)
from .rng import RngStream, sample_cs_mvn, sample_gamma, sample_inverse_gamma
from .special import (
    ConvolvedGammaParams,
    KummerBetaParams,
    convolved_gamma_logpdf,
    kummer_beta_shifted_logpdf,
    log_gamma,
)

LOG_PI = math.log(math.pi)


# ---------------------------------------------------------------- statistics


def _as_data(data, d=None) -> np.ndarray:
    x = np.asarray(data, dtype=float)
    if x.ndim == 1 and x.size == 0:
        x = x.reshape(0, d if d is not None else 0)
    if x.ndim != 2:
        raise DimensionError(f"data must be an (n, d) array, got shape {x.shape}")
    if d is not None and x.shape[1] != d:
        raise DimensionError(f"data has {x.shape[1]} columns, expected {d}")
    return x


def _scatter_summary(centred: np.ndarray) -> tuple[float, float]:
    """``(tr s, 1^T s 1)`` of ``s = sum_i c_i c_i^T`` with compensated sums."""
    tr = math.fsum((centred * centred).ravel())
    grand = math.fsum(centred.sum(axis=1) ** 2)
    return tr, grand


@dataclass(frozen=True)
class SuffStatsKnownMean:
    """``n``, ``tr s_n`` and ``1^T s_n 1`` for ``s_n = sum_i (x_i - mu)(x_i - mu)^T``."""

    d: int
    n: int
    tr_s: float
    grand_s: float

    def __add__(self, other: "SuffStatsKnownMean") -> "SuffStatsKnownMean":
        if other.d != self.d:
            raise DimensionError(f"dimension mismatch: {self.d} vs {other.d}")
        return SuffStatsKnownMean(
            self.d, self.n + other.n, self.tr_s + other.tr_s, self.grand_s + other.grand_s
        )


@dataclass(frozen=True)
class SuffStatsUnknownMean:
    """``n``, sample mean and the trace/grand sum of the centred scatter."""

    d: int
    n: int
    xbar: np.ndarray
    tr_s: float
    grand_s: float

    def __add__(self, other: "SuffStatsUnknownMean") -> "SuffStatsUnknownMean":
        if other.d != self.d:
            raise DimensionError(f"dimension mismatch: {self.d} vs {other.d}")
        if other.n == 0:
            return self
        if self.n == 0:
            return other
        n = self.n + other.n
        delta = other.xbar - self.xbar
        w = self.n * other.n / n
        xbar = self.xbar + delta * (other.n / n)
        return SuffStatsUnknownMean(
            self.d,
            n,
            xbar,
            self.tr_s + other.tr_s + w * float(delta @ delta),
            self.grand_s + other.grand_s + w * float(delta.sum()) ** 2,
        )


def suff_stats_known_mean(data, mu) -> SuffStatsKnownMean:
    mu = np.asarray(mu, dtype=float)
    if mu.ndim != 1:
        raise DimensionError("mu must be a vector")
    x = _as_data(data, mu.size)
    tr, grand = _scatter_summary(x - mu)
    return SuffStatsKnownMean(mu.size, x.shape[0], tr, grand)


def suff_stats_unknown_mean(data, d: int | None = None) -> SuffStatsUnknownMean:
    x = _as_data(data, d)
    d = x.shape[1]
    n = x.shape[0]
    if n == 0:
        return SuffStatsUnknownMean(d, 0, np.zeros(d), 0.0, 0.0)
    xbar = np.array([math.fsum(col) / n for col in x.T])
    tr, grand = _scatter_summary(x - xbar)
    return SuffStatsUnknownMean(d, n, xbar, tr, grand)


# --------------------------------------------------------------------- priors


def _check_positive(name, **vals):
    for k, v in vals.items():
        if not (v > 0 and math.isfinite(v)):
            raise DomainError(f"{name}: {k} must be finite and > 0, got {v}")


def _check_d(d):
    if int(d) != d or d < 2:
        raise DimensionError(f"dimension must be an integer >= 2, got {d!r}")


def _check_rate_cone(d, beta1, beta2):
    if not (beta1 > 0 and -beta1 < beta2 < (d - 1) * beta1):
        raise DomainError(f"(beta1, beta2) = ({beta1}, {beta2}) is outside the rate cone for d={d}")


def mbeta_to_shape_rate(d: int, m: float, beta1: float, beta2: float):
    """``(m, beta1, beta2) -> (alpha1, alpha2, lambda1, lambda2)``."""
    return (m + 2) / 2, (m * (d - 1) + 2) / 2, beta1 + beta2, beta1 - beta2 / (d - 1)


@dataclass(frozen=True)
class PrecisionPrior:
    """Prior on the half-precision pair ``eta = C_d (Y1, Y2)``, ``Yj ~ Gamma(alpha_j, lambda_j)``."""

    d: int
    alpha1: float
    alpha2: float
    lambda1: float
    lambda2: float

    def __post_init__(self):
        _check_d(self.d)
        _check_positive("PrecisionPrior", alpha1=self.alpha1, alpha2=self.alpha2,
                        lambda1=self.lambda1, lambda2=self.lambda2)

    @classmethod
    def from_mbeta(cls, d: int, m: float, beta1: float, beta2: float) -> "PrecisionPrior":
        """Build from the exponential-family form with ``beta1 = tr B`` and ``beta2`` its off-diagonal sum."""
        _check_d(d)
        _check_rate_cone(d, beta1, beta2)
        return cls(d, *mbeta_to_shape_rate(d, m, beta1, beta2))

    def to_mbeta(self) -> tuple[float, float, float]:
        """Inverse of :meth:`from_mbeta`; only defined when the shapes are tied through ``m``."""
        d = self.d
        m = 2 * self.alpha1 - 2
        if not math.isclose(self.alpha2, (m * (d - 1) + 2) / 2, rel_tol=1e-12, abs_tol=1e-12):
            raise DomainError("shapes are not of the (m, beta) form")
        beta1 = (self.lambda1 + (d - 1) * self.lambda2) / d
        beta2 = (d - 1) * (self.lambda1 - self.lambda2) / d
        return m, beta1, beta2


@dataclass(frozen=True)
class VariancePrior:
    """Prior on the covariance pair ``sigma = C_d (Z1, Z2)``, ``Zj ~ InvGamma(alpha_j, lambda_j)``."""

    d: int
    alpha1: float
    alpha2: float
    lambda1: float
    lambda2: float

    def __post_init__(self):
        _check_d(self.d)
        _check_positive("VariancePrior", alpha1=self.alpha1, alpha2=self.alpha2,
                        lambda1=self.lambda1, lambda2=self.lambda2)


def _check_nu(d, nu):
    nu = np.asarray(nu, dtype=float)
    if nu.shape != (d,):
        raise DimensionError(f"nu has shape {nu.shape}, expected ({d},)")
    return nu


@dataclass(frozen=True)
class MeanPrecisionPrior:
    """``mu | H ~ N(nu, (2 m_mu H)^{-1})`` with ``H`` from the ``(m_H, beta1, beta2)`` precision prior."""

    d: int
    m_H: float
    beta1: float
    beta2: float
    m_mu: float
    nu: np.ndarray = field(compare=False)

    def __post_init__(self):
        _check_d(self.d)
        _check_positive("MeanPrecisionPrior", m_H=self.m_H, m_mu=self.m_mu)
        _check_rate_cone(self.d, self.beta1, self.beta2)
        object.__setattr__(self, "nu", _check_nu(self.d, self.nu))

    def precision_part(self) -> PrecisionPrior:
        return PrecisionPrior.from_mbeta(self.d, self.m_H, self.beta1, self.beta2)


@dataclass(frozen=True)
class MeanVariancePrior:
    """``mu | Sigma ~ N(nu, Sigma / m_mu)`` with ``Sigma`` from the ``(m_Sigma, lambda1, lambda2)`` variance prior."""

    d: int
    m_Sigma: float
    lambda1: float
    lambda2: float
    m_mu: float
    nu: np.ndarray = field(compare=False)

    def __post_init__(self):
        _check_d(self.d)
        _check_positive("MeanVariancePrior", m_Sigma=self.m_Sigma, lambda1=self.lambda1,
                        lambda2=self.lambda2, m_mu=self.m_mu)
        object.__setattr__(self, "nu", _check_nu(self.d, self.nu))

    def variance_part(self) -> VariancePrior:
        m, d = self.m_Sigma, self.d
        return VariancePrior(d, (m + 2) / 2, (m * (d - 1) + 2) / 2, self.lambda1, self.lambda2)


# -------------------------------------------------------------------- updates


def _match(prior_d, s_d):
    if prior_d != s_d:
        raise DimensionError(f"prior has d={prior_d} but statistics have d={s_d}")


def update_precision_prior(prior: PrecisionPrior, s: SuffStatsKnownMean) -> PrecisionPrior:
    _match(prior.d, s.d)
    d, n = prior.d, s.n
    return PrecisionPrior(
        d,
        prior.alpha1 + n / 2,
        prior.alpha2 + n * (d - 1) / 2,
        prior.lambda1 + s.grand_s,
        prior.lambda2 + (d * s.tr_s - s.grand_s) / (d - 1),
    )


def update_variance_prior(prior: VariancePrior, s: SuffStatsKnownMean) -> VariancePrior:
    _match(prior.d, s.d)
    d, n = prior.d, s.n
    return VariancePrior(
        d,
        prior.alpha1 + n / 2,
        prior.alpha2 + n * (d - 1) / 2,
        prior.lambda1 + s.grand_s / (2 * d * d),
        prior.lambda2 + (d - 1) * (d * s.tr_s - s.grand_s) / (2 * d * d),
    )


def _shrinkage(m_mu, n, xbar, nu):
    """Weight ``m_mu n / (m_mu + n)``, ``|xbar - nu|^2`` and ``(1^T (xbar - nu))^2``."""
    delta = xbar - nu
    return m_mu * n / (m_mu + n), float(delta @ delta), float(delta.sum()) ** 2


def update_mean_precision_prior(prior: MeanPrecisionPrior, s: SuffStatsUnknownMean) -> MeanPrecisionPrior:
    _match(prior.d, s.d)
    if s.n == 0:
        return prior
    n = s.n
    w, sq, tot = _shrinkage(prior.m_mu, n, s.xbar, prior.nu)
    return MeanPrecisionPrior(
        prior.d,
        prior.m_H + n,
        prior.beta1 + s.tr_s + w * sq,
        prior.beta2 + (s.grand_s - s.tr_s) + w * (tot - sq),
        prior.m_mu + n,
        (prior.m_mu * prior.nu + n * s.xbar) / (prior.m_mu + n),
    )


def update_mean_variance_prior(prior: MeanVariancePrior, s: SuffStatsUnknownMean) -> MeanVariancePrior:
    _match(prior.d, s.d)
    if s.n == 0:
        return prior
    d, n = prior.d, s.n
    w, sq, tot = _shrinkage(prior.m_mu, n, s.xbar, prior.nu)
    k = 2 * d * d
    return MeanVariancePrior(
        d,
        prior.m_Sigma + n,
        prior.lambda1 + s.grand_s / k + w * tot / k,
        prior.lambda2 + (d - 1) * (d * s.tr_s - s.grand_s) / k + (d - 1) * w * (d * sq - tot) / k,
        prior.m_mu + n,
        (prior.m_mu * prior.nu + n * s.xbar) / (prior.m_mu + n),
    )


# ------------------------------------------------------------------- samplers


def sample_eta(prior: PrecisionPrior, rng: RngStream, count: int) -> np.ndarray:
    """``count`` draws of ``(eta1, eta2)`` as a ``(count, 2)`` array; every row is conic."""
    y1 = sample_gamma(rng, prior.alpha1, prior.lambda1, count)
    y2 = sample_gamma(rng, prior.alpha2, prior.lambda2, count)
    return np.column_stack(_to_cone(y1, y2, prior.d))


def sample_sigma(prior: VariancePrior, rng: RngStream, count: int) -> np.ndarray:
    """``count`` draws of ``(sigma1, sigma2)`` as a ``(count, 2)`` array; every row is conic."""
    z1 = sample_inverse_gamma(rng, prior.alpha1, prior.lambda1, count)
    z2 = sample_inverse_gamma(rng, prior.alpha2, prior.lambda2, count)
    return np.column_stack(_to_cone(z1, z2, prior.d))


def as_pairs(draws: np.ndarray, d: int) -> list[CsPair]:
    """Convert a ``(count, 2)`` draw array into :class:`CsPair` values."""
    return [CsPair(d, a1, a2) for a1, a2 in np.asarray(draws)]


def _mean_cov(prior, cov_or_prec: CsPair) -> CsPair:
    """Covariance of ``mu`` given the supplied pair: ``Sigma / m_mu``."""
    if cov_or_prec.d != prior.d:
        raise DimensionError(f"pair has d={cov_or_prec.d}, prior has d={prior.d}")
    if not cov_or_prec.is_conic():
        raise DomainError(f"pair is not conic: {cov_or_prec}")
    if isinstance(prior, MeanPrecisionPrior):
        inv = cs_inverse(cov_or_prec)
        sigma = CsPair(prior.d, inv.a1 / 2, inv.a2 / 2)
    elif isinstance(prior, MeanVariancePrior):
        sigma = cov_or_prec
    else:
        raise TypeError(f"unsupported prior type {type(prior).__name__}")
    return CsPair(prior.d, sigma.a1 / prior.m_mu, sigma.a2 / prior.m_mu)


def sample_mean_given_cov(prior, cov_or_prec: CsPair, rng: RngStream, size: int | None = None):
    """Draw ``mu ~ N(nu, Sigma / m_mu)``.

    For a :class:`MeanPrecisionPrior` the pair is the half-precision ``H``
    and ``Sigma = H^{-1} / 2``; for a :class:`MeanVariancePrior` it is
    ``Sigma`` itself.
    """
    return sample_cs_mvn(rng, prior.nu, _mean_cov(prior, cov_or_prec), size)


def _sample_joint(prior, pairs: np.ndarray, rng: RngStream):
    count = pairs.shape[0]
    mus = np.empty((count, prior.d))
    for i, (a1, a2) in enumerate(pairs):
        mus[i] = sample_mean_given_cov(prior, CsPair(prior.d, a1, a2), rng)
    return mus, pairs


def sample_mean_precision(prior: MeanPrecisionPrior, rng: RngStream, count: int):
    """Joint draws ``(mu, eta)`` as arrays of shape ``(count, d)`` and ``(count, 2)``."""
    return _sample_joint(prior, sample_eta(prior.precision_part(), rng, count), rng)


def sample_mean_variance(prior: MeanVariancePrior, rng: RngStream, count: int):
    """Joint draws ``(mu, sigma)`` as arrays of shape ``(count, d)`` and ``(count, 2)``."""
    return _sample_joint(prior, sample_sigma(prior.variance_part(), rng, count), rng)


def precision_prior_from_variance(prior: VariancePrior) -> PrecisionPrior:
    """Law of ``H = Sigma^{-1} / 2`` when ``Sigma`` follows ``prior``.

    Inverting and halving maps the cone coordinates ``(z1, z2)`` of
    ``Sigma`` to ``(1 / (2 d^2 z1), (d-1)^2 / (2 d^2 z2))``, so the shapes
    carry over and the rates are rescaled.
    """
    d = prior.d
    k = 2.0 * d * d
    return PrecisionPrior(d, prior.alpha1, prior.alpha2, k * prior.lambda1, k * prior.lambda2 / (d - 1) ** 2)


# ------------------------------------------------------------------ densities


def log_normalizer_eta(prior: PrecisionPrior) -> float:
    """``ln K`` for the eta density; ``K`` multiplies the unnormalised kernel."""
    d, a1, a2 = prior.d, prior.alpha1, prior.alpha2
    return (
        a2 * math.log(d - 1)
        - (a1 + a2 - 1) * math.log(d)
        + a1 * math.log(prior.lambda1)
        + a2 * math.log(prior.lambda2)
        - log_gamma(a1)
        - log_gamma(a2)
    )


def log_normalizer_mbeta(d: int, m: float, beta1: float, beta2: float) -> float:
    """``ln Z_d(m, beta1, beta2)``, the normaliser of ``|H|^{m/2} exp(-eta1 beta1 - eta2 beta2)`` on the cone."""
    _check_d(d)
    _check_rate_cone(d, beta1, beta2)
    s1, s2 = (m + 2) / 2, (m * (d - 1) + 2) / 2
    return (
        s1 * math.log(beta1 + beta2)
        + s2 * math.log((d - 1) * beta1 - beta2)
        - (m * d + 2) / 2 * math.log(d)
        - log_gamma(s2)
        - log_gamma(s1)
    )


def log_density_eta(prior: PrecisionPrior, eta: CsPair) -> float:
    """Log-density of the precision prior at ``eta``; ``-inf`` off the open cone."""
    d = prior.d
    if eta.d != d:
        raise DimensionError(f"eta has d={eta.d}, prior has d={d}")
    lam_one, lam_rest = eta.eigenvalues
    if not (lam_one > 0 and lam_rest > 0):
        return -math.inf
    c1 = (prior.lambda1 + (d - 1) * prior.lambda2) / d
    c2 = (d - 1) * (prior.lambda1 - prior.lambda2) / d
    return (
        log_normalizer_eta(prior)
        + (prior.alpha2 - 1) * math.log(lam_rest)
        + (prior.alpha1 - 1) * math.log(lam_one)
        - c1 * eta.a1
        - c2 * eta.a2
    )


def log_density_sigma(prior: VariancePrior, sigma: CsPair) -> float:
    """Log-density of the variance prior at ``sigma``; ``-inf`` off the open cone."""
    d = prior.d
    if sigma.d != d:
        raise DimensionError(f"sigma has d={sigma.d}, prior has d={d}")
    lam_one, lam_rest = sigma.eigenvalues
    if not (lam_one > 0 and lam_rest > 0):
        return -math.inf
    a1, a2, l1, l2 = prior.alpha1, prior.alpha2, prior.lambda1, prior.lambda2
    return (
        (a1 + a2 + 1) * math.log(d)
        - a2 * math.log(d - 1)
        + a1 * math.log(l1)
        + a2 * math.log(l2)
        - log_gamma(a1)
        - log_gamma(a2)
        - (a2 + 1) * math.log(lam_rest)
        - (a1 + 1) * math.log(lam_one)
        - d * l1 / lam_one
        - d / (d - 1) * l2 / lam_rest
    )


def _log_normal_cs(x, mean, cov: CsPair) -> float:
    d = cov.d
    diff = np.asarray(x, dtype=float) - mean
    return -0.5 * (d * math.log(2 * math.pi) + cs_log_determinant(cov)
                   + cs_quadratic_form(cs_inverse(cov), diff))


def log_density_mean_precision(prior: MeanPrecisionPrior, mu, eta: CsPair) -> float:
    lp = log_density_eta(prior.precision_part(), eta)
    if lp == -math.inf:
        return lp
    return lp + _log_normal_cs(mu, prior.nu, _mean_cov(prior, eta))


def log_density_mean_variance(prior: MeanVariancePrior, mu, sigma: CsPair) -> float:
    lp = log_density_sigma(prior.variance_part(), sigma)
    if lp == -math.inf:
        return lp
    return lp + _log_normal_cs(mu, prior.nu, _mean_cov(prior, sigma))


def loglik_precision(eta: CsPair, data, mu) -> float:
    """Gaussian log-likelihood with half-precision ``eta``: ``sum_i ln[pi^{-d/2} |H|^{1/2} e^{-(x-mu)^T H (x-mu)}]``."""
    x = _as_data(data, eta.d)
    n, d = x.shape
    q = cs_quadratic_form(eta, x - np.asarray(mu, dtype=float)) if n else np.zeros(0)
    return -n * d / 2 * LOG_PI + n / 2 * cs_log_determinant(eta) - math.fsum(np.atleast_1d(q))


def loglik_covariance(sigma: CsPair, data, mu) -> float:
    """Gaussian log-likelihood with covariance ``sigma``."""
    x = _as_data(data, sigma.d)
    n, d = x.shape
    q = cs_quadratic_form(cs_inverse(sigma), x - np.asarray(mu, dtype=float)) if n else np.zeros(0)
    return -0.5 * (n * d * math.log(2 * math.pi) + n * cs_log_determinant(sigma) + math.fsum(np.atleast_1d(q)))


def log_marginal_eta1(prior: PrecisionPrior, eta1: float) -> float:
    """Log-density of ``eta1 = Y1 + Y2``: a convolved gamma."""
    p = ConvolvedGammaParams(prior.alpha2, prior.lambda2, prior.alpha1, prior.lambda2 - prior.lambda1)
    return convolved_gamma_logpdf(eta1, p)


def log_conditional_eta2(prior: PrecisionPrior, eta2: float, eta1: float) -> float:
    """Log-density of ``eta2`` given ``eta1``: a Kummer-Beta on ``(-eta1/(d-1), eta1)``."""
    if not eta1 > 0:
        return -math.inf
    d = prior.d
    p = KummerBetaParams(
        prior.alpha1,
        prior.alpha2,
        eta1 * (prior.lambda1 - prior.lambda2),
        scale=d * eta1 / (d - 1),
        shift=-eta1 / (d - 1),
    )
    return kummer_beta_shifted_logpdf(eta2, p)


def log_evidence_known_mean(prior: PrecisionPrior, s: SuffStatsKnownMean) -> float:
    """``ln p(x_1..x_n)`` under the precision prior with known mean."""
    post = update_precision_prior(prior, s)
    return -s.n * prior.d / 2 * LOG_PI + log_normalizer_eta(prior) - log_normalizer_eta(post)


# ------------------------------------------------------------ MGF diagnostic


@dataclass(frozen=True)
class DistributionCheck:
    """Result of :func:`theorem_distribution_check`."""

    d: int
    m: float
    beta1: float
    beta2: float
    t: np.ndarray = field(compare=False)
    log_discrepancy: np.ndarray = field(compare=False)

    @property
    def max_abs_log_discrepancy(self) -> float:
        return float(np.max(np.abs(self.log_discrepancy))) if self.t.size else 0.0


def mgf_interval(d: int, beta1: float, beta2: float) -> tuple[float, float]:
    """Open interval of ``t`` on which the MGF of ``eta2`` exists."""
    return beta2 - (d - 1) * beta1, beta2 + beta1


def theorem_distribution_check(d: int, m: float, beta1: float, beta2: float, t=None, n_points: int = 20) -> DistributionCheck:
    """Compare the MGF of ``eta2`` from normalisers with the gamma-pair MGF.

    Under the ``(m, beta)`` prior, ``E exp(t eta2)`` equals
    ``Z_d(beta2) / Z_d(beta2 - t)`` and also
    ``(l1 / (l1 - t))^a1 (l2 / (l2 + t/(d-1)))^a2``.  The log difference
    is reported on a grid of ``t`` (default: ``n_points`` interior points).

    Raises
    ------
    DomainError
        If any supplied ``t`` lies outside the open interval
        ``(beta2 - (d-1) beta1, beta2 + beta1)``.
    """
    _check_d(d)
    _check_rate_cone(d, beta1, beta2)
    lo, hi = mgf_interval(d, beta1, beta2)
    if t is None:
        t = lo + (hi - lo) * (np.arange(1, n_points + 1) / (n_points + 1))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any((t <= lo) | (t >= hi)):
        raise DomainError(f"t must lie in ({lo}, {hi})")
    a1, a2, l1, l2 = mbeta_to_shape_rate(d, m, beta1, beta2)
    z0 = log_normalizer_mbeta(d, m, beta1, beta2)
    disc = np.empty_like(t)
    for i, ti in enumerate(t):
        lhs = z0 - log_normalizer_mbeta(d, m, beta1, beta2 - ti)
        rhs = a1 * math.log(l1 / (l1 - ti)) + a2 * math.log(l2 / (l2 + ti / (d - 1)))
        disc[i] = lhs - rhs
    return DistributionCheck(d, m, beta1, beta2, t, disc)
