import math
from dataclasses import replace

import numpy as np
import pytest
from scipy import integrate, interpolate, stats

from csconj.conjugate import (
    MeanPrecisionPrior,
    MeanVariancePrior,
    PrecisionPrior,
    VariancePrior,
    as_pairs,
    log_conditional_eta2,
    log_density_eta,
    log_density_sigma,
    log_evidence_known_mean,
    log_marginal_eta1,
    log_normalizer_eta,
    log_normalizer_mbeta,
    loglik_covariance,
    loglik_precision,
    precision_prior_from_variance,
    sample_eta,
    sample_mean_given_cov,
    sample_mean_precision,
    sample_mean_variance,
    sample_sigma,
    suff_stats_known_mean,
    suff_stats_unknown_mean,
    theorem_distribution_check,
    update_mean_precision_prior,
    update_mean_variance_prior,
    update_precision_prior,
    update_variance_prior,
)
from csconj.errors import DimensionError, DomainError
from csconj.linalg import CsPair, cone_contains, cs_inverse
from csconj.rng import RngStream

from conftest import dense, random_conic
from oracles import FAMILIES, conjugacy_residuals, eta_normalization, evidence_quadrature, random_prior

ONE_ROW = np.array([[1.0, 1.0]])


# --------------------------------------------------------------- statistics


def test_suff_stats_examples():
    assert suff_stats_known_mean(ONE_ROW, [0, 0]) == suff_stats_known_mean([[1, 1]], np.zeros(2))
    s = suff_stats_known_mean(ONE_ROW, [0, 0])
    assert (s.n, s.tr_s, s.grand_s) == (1, 2.0, 4.0)
    e = suff_stats_known_mean(np.zeros((0, 2)), [0, 0])
    assert (e.n, e.tr_s, e.grand_s) == (0, 0.0, 0.0)
    z = suff_stats_known_mean(np.tile([3.0, -1.0], (4, 1)), [3.0, -1.0])
    assert (z.n, z.tr_s, z.grand_s) == (4, 0.0, 0.0)


def test_suff_stats_errors():
    with pytest.raises(DimensionError):
        suff_stats_known_mean(np.ones((3, 2)), [0, 0, 0])
    with pytest.raises(DimensionError):
        suff_stats_unknown_mean(np.ones(3))


def test_suff_stats_additive(nprng):
    x = nprng.normal(size=(30, 4))
    mu = nprng.normal(size=4)
    whole = suff_stats_known_mean(x, mu)
    parts = suff_stats_known_mean(x[:11], mu) + suff_stats_known_mean(x[11:], mu)
    assert parts.n == whole.n
    assert parts.tr_s == pytest.approx(whole.tr_s, rel=1e-13)
    assert parts.grand_s == pytest.approx(whole.grand_s, rel=1e-13)
    u = suff_stats_unknown_mean(x)
    v = suff_stats_unknown_mean(x[:7]) + suff_stats_unknown_mean(x[7:])
    np.testing.assert_allclose(v.xbar, u.xbar, rtol=1e-13)
    assert v.tr_s == pytest.approx(u.tr_s, rel=1e-12)
    assert v.grand_s == pytest.approx(u.grand_s, rel=1e-12)
    scatter = (x - x.mean(0)).T @ (x - x.mean(0))
    assert u.tr_s == pytest.approx(np.trace(scatter), rel=1e-12)
    assert u.grand_s == pytest.approx(scatter.sum(), rel=1e-12)


# ------------------------------------------------------------------ updates


def test_precision_update_examples():
    s = suff_stats_known_mean(ONE_ROW, [0, 0])
    assert update_precision_prior(PrecisionPrior(2, 1, 1, 1, 1), s) == PrecisionPrior(2, 1.5, 1.5, 5, 1)
    # d = 3 separates the two shape increments: x = (1, 2, 3), tr = 14, grand = 36
    s3 = suff_stats_known_mean([[1, 2, 3]], [0, 0, 0])
    assert update_precision_prior(PrecisionPrior(3, 1, 1, 1, 1), s3) == PrecisionPrior(3, 1.5, 2.0, 37, 4)
    p = PrecisionPrior(3, 2, 3, 4, 5)
    assert update_precision_prior(p, suff_stats_known_mean(np.zeros((0, 3)), [0, 0, 0])) == p


def test_variance_update_examples():
    s = suff_stats_known_mean(ONE_ROW, [0, 0])
    assert update_variance_prior(VariancePrior(2, 1, 1, 1, 1), s) == VariancePrior(2, 1.5, 1.5, 1.5, 1)
    p = VariancePrior(4, 2, 3, 4, 5)
    assert update_variance_prior(p, suff_stats_known_mean(np.zeros((0, 4)), np.zeros(4))) == p


def test_mean_precision_update_example():
    prior = MeanPrecisionPrior(2, 1, 1, 0, 1, np.zeros(2))
    post = update_mean_precision_prior(prior, suff_stats_unknown_mean([[2.0, 0.0]]))
    assert (post.m_H, post.m_mu, post.beta1, post.beta2) == (2, 2, 3, 0)
    np.testing.assert_array_equal(post.nu, [1, 0])
    assert update_mean_precision_prior(prior, suff_stats_unknown_mean(np.zeros((0, 2)))) is prior


def test_mean_variance_update_example():
    # delta = (2, 0), weight 1/2: lambda1 += 0.5 * 4 / 8, lambda2 += 1 * 0.5 * (2*4 - 4) / 8
    prior = MeanVariancePrior(2, 1, 1, 1, 1, np.zeros(2))
    post = update_mean_variance_prior(prior, suff_stats_unknown_mean([[2.0, 0.0]]))
    assert (post.m_Sigma, post.m_mu) == (2, 2)
    assert post.lambda1 == pytest.approx(1.25, rel=1e-15)
    assert post.lambda2 == pytest.approx(1.25, rel=1e-15)
    np.testing.assert_array_equal(post.nu, [1, 0])


def test_shrinkage_vanishes_when_mean_matches(nprng):
    x = nprng.normal(size=(5, 3))
    s = suff_stats_unknown_mean(x)
    p = update_mean_precision_prior(MeanPrecisionPrior(3, 1, 2, 0.5, 3, s.xbar), s)
    assert p.beta1 == pytest.approx(2 + s.tr_s, rel=1e-14)
    assert p.beta2 == pytest.approx(0.5 + s.grand_s - s.tr_s, rel=1e-14)
    q = update_mean_variance_prior(MeanVariancePrior(3, 1, 2, 1, 3, s.xbar), s)
    assert q.lambda1 == pytest.approx(2 + s.grand_s / 18, rel=1e-14)
    assert q.lambda2 == pytest.approx(1 + 2 * (3 * s.tr_s - s.grand_s) / 18, rel=1e-14)


@pytest.mark.parametrize("family", FAMILIES)
def test_updates_compose_over_batches(family, nprng):
    d = 3
    prior = random_prior(family, d, nprng)
    x = nprng.normal(size=(9, d))
    mu = nprng.normal(size=d)
    if family in ("eta", "sigma"):
        upd = update_precision_prior if family == "eta" else update_variance_prior
        one = upd(prior, suff_stats_known_mean(x, mu))
        two = upd(upd(prior, suff_stats_known_mean(x[:4], mu)), suff_stats_known_mean(x[4:], mu))
        for k in ("alpha1", "alpha2", "lambda1", "lambda2"):
            assert getattr(two, k) == pytest.approx(getattr(one, k), rel=1e-12)
    else:
        upd = update_mean_precision_prior if family == "mean-eta" else update_mean_variance_prior
        one = upd(prior, suff_stats_unknown_mean(x))
        two = upd(upd(prior, suff_stats_unknown_mean(x[:4])), suff_stats_unknown_mean(x[4:]))
        for k in vars(one):
            a, b = getattr(one, k), getattr(two, k)
            np.testing.assert_allclose(b, a, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("family", FAMILIES)
def test_conjugacy_constant(family, nprng):
    for d, n in [(2, 1), (3, 10), (5, 100)]:
        assert conjugacy_residuals(family, d, n, nprng).std() <= 1e-8


def test_swapped_shape_increments_break_conjugacy(nprng):
    """Swapping the two shape increments leaves a non-constant residual for d > 2."""
    prior = PrecisionPrior(4, 2, 3, 1, 2)
    x = nprng.normal(size=(10, 4))
    s = suff_stats_known_mean(x, np.zeros(4))
    good = update_precision_prior(prior, s)
    swapped = replace(good, alpha1=prior.alpha1 + s.n * 3 / 2, alpha2=prior.alpha2 + s.n / 2)
    res = []
    for _ in range(50):
        th = random_conic(nprng, 4)
        res.append(log_density_eta(prior, th) + loglik_precision(th, x, np.zeros(4)) - log_density_eta(swapped, th))
    assert np.std(res) > 1e-2


def test_updates_preserve_invariants(nprng):
    for _ in range(50):
        d = int(nprng.integers(2, 7))
        x = nprng.normal(size=(int(nprng.integers(1, 20)), d)) * 10
        s = suff_stats_unknown_mean(x)
        p = update_mean_precision_prior(random_prior("mean-eta", d, nprng), s)
        assert -p.beta1 < p.beta2 < (d - 1) * p.beta1
        q = update_mean_variance_prior(random_prior("mean-sigma", d, nprng), s)
        assert q.lambda1 > 0 and q.lambda2 > 0


def test_prior_validation():
    with pytest.raises(DomainError):
        PrecisionPrior(3, 0, 1, 1, 1)
    with pytest.raises(DimensionError):
        VariancePrior(1, 1, 1, 1, 1)
    with pytest.raises(DomainError):
        MeanPrecisionPrior(3, 1, 1, 2.5, 1, np.zeros(3))
    with pytest.raises(DimensionError):
        MeanVariancePrior(3, 1, 1, 1, 1, np.zeros(2))


def test_mbeta_roundtrip():
    p = PrecisionPrior.from_mbeta(4, 3.0, 2.0, 1.5)
    m, b1, b2 = p.to_mbeta()
    assert (m, b1, b2) == pytest.approx((3.0, 2.0, 1.5), rel=1e-14)
    assert log_normalizer_mbeta(4, 3.0, 2.0, 1.5) == pytest.approx(log_normalizer_eta(p), rel=1e-13)
    with pytest.raises(DomainError):
        PrecisionPrior(4, 2, 2, 1, 1).to_mbeta()


# ----------------------------------------------------------------- samplers


def test_sample_eta_cone_and_moments():
    prior = PrecisionPrior(4, 2.5, 3.0, 1.5, 2.0)
    draws = sample_eta(prior, RngStream(10), 100_000)
    assert np.all(cone_contains(4, draws[:, 0], draws[:, 1]))
    n = draws.shape[0]
    m1 = prior.alpha1 / prior.lambda1 + prior.alpha2 / prior.lambda2
    m2 = prior.alpha1 / prior.lambda1 - prior.alpha2 / (3 * prior.lambda2)
    assert abs(draws[:, 0].mean() - m1) < 3 * draws[:, 0].std() / math.sqrt(n)
    assert abs(draws[:, 1].mean() - m2) < 3 * draws[:, 1].std() / math.sqrt(n)
    assert as_pairs(draws[:2], 4)[0] == CsPair(4, *draws[0])


def test_sample_sigma_cone_and_moments():
    prior = VariancePrior(3, 4.0, 5.0, 3.0, 8.0)
    draws = sample_sigma(prior, RngStream(12), 100_000)
    assert np.all(cone_contains(3, draws[:, 0], draws[:, 1]))
    n = draws.shape[0]
    e1, e2 = prior.lambda1 / (prior.alpha1 - 1), prior.lambda2 / (prior.alpha2 - 1)
    v1 = e1**2 / (prior.alpha1 - 2)
    v2 = e2**2 / (prior.alpha2 - 2)
    assert abs(draws[:, 0].mean() - (e1 + e2)) < 3 * math.sqrt((v1 + v2) / n)
    assert abs(draws[:, 1].mean() - (e1 - e2 / 2)) < 3 * math.sqrt((v1 + v2 / 4) / n)


def test_sample_mean_given_cov_moments():
    nu = np.array([1.0, -2.0, 0.5])
    prior = MeanVariancePrior(3, 2, 1, 1, 4.0, nu)
    sigma = CsPair(3, 2.0, 0.7)
    n = 100_000
    x = sample_mean_given_cov(prior, sigma, RngStream(13), n)
    cov = dense(sigma) / 4.0
    assert np.all(np.abs(x.mean(0) - nu) < 3 * np.sqrt(np.diag(cov) / n))
    emp = np.cov(x.T)
    se = np.sqrt((np.outer(np.diag(cov), np.diag(cov)) + cov**2) / n)
    assert np.all(np.abs(emp - cov) < 3 * se)


def test_sample_mean_given_precision_inverts_and_halves():
    nu = np.zeros(2)
    prior = MeanPrecisionPrior(2, 1, 1, 0, 2.0, nu)
    h = CsPair(2, 1.0, 0.25)
    n = 200_000
    x = sample_mean_given_cov(prior, h, RngStream(14), n)
    cov = dense(cs_inverse(h)) / 2 / 2.0
    se = np.sqrt((np.outer(np.diag(cov), np.diag(cov)) + cov**2) / n)
    assert np.all(np.abs(np.cov(x.T) - cov) < 3 * se)


def test_sample_mean_concentrates_for_large_m_mu():
    nu = np.array([3.0, 4.0])
    prior = MeanVariancePrior(2, 1, 1, 1, 1e12, nu)
    x = sample_mean_given_cov(prior, CsPair(2, 1.0, 0.5), RngStream(1), 100)
    assert np.max(np.abs(x - nu)) < 1e-4


def test_sample_mean_errors():
    prior = MeanVariancePrior(2, 1, 1, 1, 1, np.zeros(2))
    with pytest.raises(DomainError):
        sample_mean_given_cov(prior, CsPair(2, 1.0, 1.0), RngStream(1))
    with pytest.raises(DimensionError):
        sample_mean_given_cov(prior, CsPair(3, 1.0, 0.0), RngStream(1))


def test_joint_samplers_shapes():
    mus, pairs = sample_mean_precision(MeanPrecisionPrior(3, 2, 1, 0.5, 1, np.zeros(3)), RngStream(2), 5)
    assert mus.shape == (5, 3) and pairs.shape == (5, 2)
    mus, pairs = sample_mean_variance(MeanVariancePrior(3, 2, 1, 1, 1, np.zeros(3)), RngStream(2), 5)
    assert mus.shape == (5, 3) and np.all(cone_contains(3, pairs[:, 0], pairs[:, 1]))


def test_sampler_reproducible():
    p = PrecisionPrior(3, 2, 3, 1, 1)
    np.testing.assert_array_equal(sample_eta(p, RngStream(7), 5), sample_eta(p, RngStream(7), 5))


def test_variance_to_precision_duality():
    vp = VariancePrior(3, 3.0, 4.0, 2.0, 5.0)
    sig = sample_sigma(vp, RngStream(21), 20_000)
    pushed = np.array([[h.a1 / 2, h.a2 / 2] for h in (cs_inverse(CsPair(3, a, b)) for a, b in sig)])
    direct = sample_eta(precision_prior_from_variance(vp), RngStream(22), 20_000)
    for k in range(2):
        assert stats.ks_2samp(pushed[:, k], direct[:, k]).pvalue > 0.001


def test_posterior_consistency(nprng):
    d = 4
    eta_true = CsPair(d, 1.2, 0.3)
    cov = dense(cs_inverse(eta_true)) / 2
    x = nprng.multivariate_normal(np.zeros(d), cov, size=1000)
    post = update_precision_prior(PrecisionPrior(d, 1, 1, 1, 1), suff_stats_known_mean(x, np.zeros(d)))
    y1, y2 = post.alpha1 / post.lambda1, post.alpha2 / post.lambda2
    assert y1 + y2 == pytest.approx(eta_true.a1, rel=0.1)
    assert y1 - y2 / (d - 1) == pytest.approx(eta_true.a2, rel=0.1)


# ---------------------------------------------------------------- densities


def test_log_density_eta_change_of_variables(nprng):
    for _ in range(100):
        d = int(nprng.integers(2, 8))
        p = random_prior("eta", d, nprng)
        y1, y2 = np.exp(nprng.uniform(-2, 1.5, 2))
        eta = CsPair(d, y1 + y2, y1 - y2 / (d - 1))
        ref = (stats.gamma.logpdf(y1, p.alpha1, scale=1 / p.lambda1)
               + stats.gamma.logpdf(y2, p.alpha2, scale=1 / p.lambda2) + math.log((d - 1) / d))
        assert log_density_eta(p, eta) == pytest.approx(ref, abs=1e-10, rel=1e-12)


def test_log_density_sigma_change_of_variables(nprng):
    for _ in range(100):
        d = int(nprng.integers(2, 8))
        p = random_prior("sigma", d, nprng)
        z1, z2 = np.exp(nprng.uniform(-2, 1.5, 2))
        sigma = CsPair(d, z1 + z2, z1 - z2 / (d - 1))
        ref = (stats.invgamma.logpdf(z1, p.alpha1, scale=p.lambda1)
               + stats.invgamma.logpdf(z2, p.alpha2, scale=p.lambda2) + math.log((d - 1) / d))
        assert log_density_sigma(p, sigma) == pytest.approx(ref, abs=1e-10, rel=1e-12)


def test_log_density_off_cone():
    assert log_density_eta(PrecisionPrior(3, 1, 1, 1, 1), CsPair(3, 1, 1)) == -math.inf
    assert log_density_sigma(VariancePrior(3, 1, 1, 1, 1), CsPair(3, 1, -0.6)) == -math.inf


def test_log_density_eta_matches_mbeta_form(nprng):
    for _ in range(20):
        d = int(nprng.integers(2, 6))
        m = float(nprng.uniform(0.5, 6))
        b1 = float(nprng.uniform(0.5, 3))
        b2 = float(nprng.uniform(-0.9, 0.9 * (d - 1))) * b1
        p = PrecisionPrior.from_mbeta(d, m, b1, b2)
        eta = random_conic(nprng, d)
        lam_one, lam_rest = eta.eigenvalues
        log_det = (d - 1) * math.log(lam_rest) + math.log(lam_one)
        ref = log_normalizer_mbeta(d, m, b1, b2) + m / 2 * log_det - eta.a1 * b1 - eta.a2 * b2
        assert log_density_eta(p, eta) == pytest.approx(ref, rel=1e-11, abs=1e-11)


def test_log_density_eta_normalised():
    assert eta_normalization(PrecisionPrior(3, 2.0, 3.0, 1.5, 0.8)) == pytest.approx(1.0, abs=1e-4)


def test_loglik_matches_dense(nprng):
    d = 4
    x = nprng.normal(size=(6, d))
    mu = nprng.normal(size=d)
    h = random_conic(nprng, d)
    cov = dense(cs_inverse(h)) / 2
    ref = stats.multivariate_normal(mu, cov).logpdf(x).sum()
    assert loglik_precision(h, x, mu) == pytest.approx(ref, rel=1e-11)
    s = random_conic(nprng, d)
    ref = stats.multivariate_normal(mu, dense(s)).logpdf(x).sum()
    assert loglik_covariance(s, x, mu) == pytest.approx(ref, rel=1e-11)


def test_factorisation(nprng):
    for _ in range(100):
        d = int(nprng.integers(2, 7))
        p = random_prior("eta", d, nprng)
        eta = random_conic(nprng, d)
        total = log_marginal_eta1(p, eta.a1) + log_conditional_eta2(p, eta.a2, eta.a1)
        assert total == pytest.approx(log_density_eta(p, eta), abs=1e-9)


def test_marginal_equal_rates_is_gamma():
    p = PrecisionPrior(3, 2.0, 1.5, 0.7, 0.7)
    for x in (0.1, 2.0, 9.0):
        ref = stats.gamma.logpdf(x, 3.5, scale=1 / 0.7)
        assert log_marginal_eta1(p, x) == pytest.approx(ref, abs=1e-12)


def test_conditional_support():
    p = PrecisionPrior(3, 2.0, 1.5, 0.7, 1.1)
    assert log_conditional_eta2(p, 1.5, 1.0) == -math.inf
    assert log_conditional_eta2(p, -0.6, 1.0) == -math.inf
    assert log_conditional_eta2(p, 0.0, -1.0) == -math.inf


def _grid_cdf(logpdf, lo, hi, n=4001):
    grid = np.linspace(lo, hi, n)
    dens = np.array([math.exp(v) if v > -math.inf else 0.0 for v in map(logpdf, grid)])
    cdf = integrate.cumulative_trapezoid(dens, grid, initial=0.0)
    return interpolate.interp1d(grid, cdf / cdf[-1], bounds_error=False, fill_value=(0.0, 1.0))


def test_eta_marginals_ks_against_density():
    d = 3
    p = PrecisionPrior(d, 3.0, 4.0, 2.0, 3.0)
    draws = sample_eta(p, RngStream(30), 100_000)
    hi = draws[:, 0].max() * 1.2
    cdf1 = _grid_cdf(lambda e1: log_marginal_eta1(p, e1), 0.0, hi)
    assert stats.kstest(draws[:, 0], cdf1).pvalue > 0.001

    def eta2_density(e2):
        lo = max(e2, -(d - 1) * e2, 0.0)
        f = lambda e1: math.exp(log_density_eta(p, CsPair(d, e1, e2)))
        return math.log(max(integrate.quad(f, lo, lo + hi, limit=200)[0], 1e-300))

    lo2, hi2 = draws[:, 1].min() * 1.2, draws[:, 1].max() * 1.2
    cdf2 = _grid_cdf(eta2_density, lo2, hi2, n=801)
    assert stats.kstest(draws[:, 1], cdf2).pvalue > 0.001


def test_eta1_histogram_matches_marginal():
    p = PrecisionPrior(4, 2.0, 5.0, 1.0, 2.5)
    draws = sample_eta(p, RngStream(31), 200_000)[:, 0]
    edges = np.linspace(0.5, 6.0, 12)
    counts, _ = np.histogram(draws, edges)
    probs = np.array([integrate.quad(lambda x: math.exp(log_marginal_eta1(p, x)), a, b)[0]
                      for a, b in zip(edges[:-1], edges[1:])])
    expected = probs * draws.size
    assert np.all(np.abs(counts - expected) < 4 * np.sqrt(expected))


# ----------------------------------------------------------------- evidence


def test_evidence_no_data_is_zero():
    p = PrecisionPrior(3, 2, 3, 1, 1)
    assert log_evidence_known_mean(p, suff_stats_known_mean(np.zeros((0, 3)), np.zeros(3))) == 0.0


def test_evidence_toy_quadrature():
    # quadrature value frozen from the dense-likelihood oracle
    x = np.array([[0.3, -1.1], [1.4, 0.2]])
    p = PrecisionPrior(2, 1.5, 2.0, 1.0, 2.0)
    got = log_evidence_known_mean(p, suff_stats_known_mean(x, np.zeros(2)))
    assert got == pytest.approx(evidence_quadrature(p, x, np.zeros(2)), rel=1e-4)


def test_evidence_chain_rule(nprng):
    p = PrecisionPrior(3, 2, 3, 1, 1)
    x = nprng.normal(size=(8, 3))
    mu = np.zeros(3)
    a, b = suff_stats_known_mean(x[:3], mu), suff_stats_known_mean(x[3:], mu)
    whole = log_evidence_known_mean(p, a + b)
    seq = log_evidence_known_mean(p, a) + log_evidence_known_mean(update_precision_prior(p, a), b)
    assert whole == pytest.approx(seq, abs=1e-10)


# --------------------------------------------------------- MGF diagnostic


def test_distribution_check_examples():
    assert theorem_distribution_check(3, 4, 2, 1).max_abs_log_discrepancy <= 1e-10
    assert theorem_distribution_check(2, 3, 1.5, 0.2).max_abs_log_discrepancy <= 1e-10
    at_zero = theorem_distribution_check(3, 4, 2, 1, t=[0.0])
    assert at_zero.log_discrepancy[0] == 0.0


def test_distribution_check_rejects_out_of_range():
    # valid t for (d=3, beta1=2, beta2=1) is (-3, 3)
    with pytest.raises(DomainError):
        theorem_distribution_check(3, 4, 2, 1, t=[3.0])
    with pytest.raises(DomainError):
        theorem_distribution_check(3, 4, 2, 1, t=[-3.5])
    assert theorem_distribution_check(3, 4, 2, 1, t=[2.9, -2.9]).max_abs_log_discrepancy <= 1e-10
