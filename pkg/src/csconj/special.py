"""
Special functions behind the closed-form densities.

Everything is computed in log space; the ``*_pdf`` wrappers exponentiate
only at the boundary.  Kummer's confluent hypergeometric function is
summed directly with a term-ratio recurrence, rescaling the running sum
so that large arguments do not overflow; very large arguments switch to
the asymptotic expansion once it is accurate to working precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, NumericError

MAX_TERMS = 100_000
TAIL_TOL = 1e-16
_RESCALE_AT = 1e200


def log_gamma(x):
    """``ln Gamma(x)`` for ``x > 0`` (scalar or array)."""
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError(f"log_gamma needs x > 0, got {x!r}")
    out = gammaln(arr)
    return float(out) if out.ndim == 0 else out


def log_beta(a, b):
    """``ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a + b)``."""
    return log_gamma(a) + log_gamma(b) - log_gamma(np.add(a, b))


def _log_series(a: float, b: float, x: float) -> tuple[float, int]:
    """Log of the 1F1 series for ``x >= 0`` (all terms non-negative when a, b > 0).

    Returns ``(log_value, terms_used)``.
    """
    if x == 0.0:
        return 0.0, 1
    total = 1.0
    term = 1.0
    log_scale = 0.0
    for n in range(MAX_TERMS):
        ratio = (a + n) * x / ((b + n) * (n + 1))
        term *= ratio
        total += term
        if total > _RESCALE_AT:
            log_scale += math.log(total)
            term /= total
            total = 1.0
        if ratio < 1.0:
            # Ratios are eventually decreasing, so the geometric bound caps the tail.
            if term * ratio / (1.0 - ratio) <= TAIL_TOL * total:
                return log_scale + math.log(total), n + 2
    raise NumericError(
        "1F1 series did not converge",
        a=a, b=b, x=x, terms=MAX_TERMS, last_term=term, partial_log=log_scale + math.log(total),
    )


def _log_asymptotic(a: float, b: float, x: float) -> float | None:
    """Large-``x`` expansion ``ln[Gamma(b)/Gamma(a) e^x x^(a-b) sum_n (b-a)_n (1-a)_n / (n! x^n)]``.

    Returns ``None`` unless the smallest term drops below ``TAIL_TOL``
    before the series starts to diverge.  The exponentially small
    companion term is ignored, which is safe once ``x`` exceeds about 40.
    """
    if x < 40.0:
        return None
    total = 1.0
    term = 1.0
    for n in range(200):
        nxt = term * (b - a + n) * (1 - a + n) / ((n + 1) * x)
        if abs(nxt) >= abs(term) and n > 0:
            return None
        term = nxt
        total += term
        if abs(term) <= TAIL_TOL * abs(total):
            if total <= 0:
                return None
            return float(gammaln(b) - gammaln(a)) + x + (a - b) * math.log(x) + math.log(total)
    return None


def _signed_series(a: float, b: float, x: float) -> tuple[float, float, int]:
    """Series whose terms may change sign; returns ``(sign, log|value|, terms)``.

    Used for ``1F1(b - a; b; -x)`` when ``b < a``: only the first
    ``a - b`` terms alternate, so cancellation stays mild unless the
    value is tiny relative to the largest term.
    """
    total = 1.0
    term = 1.0
    biggest = 1.0
    for n in range(MAX_TERMS):
        ratio = (a + n) * x / ((b + n) * (n + 1))
        term *= ratio
        total += term
        biggest = max(biggest, abs(term))
        if not math.isfinite(total):
            break
        if abs(ratio) < 1.0 and abs(term) * abs(ratio) / (1.0 - abs(ratio)) <= TAIL_TOL * abs(total):
            if total == 0.0 or biggest / abs(total) > 1e6:
                raise NumericError(
                    "1F1 alternating series lost too many digits to cancellation",
                    a=a, b=b, x=x, largest_term=biggest, value=total,
                )
            return math.copysign(1.0, total), math.log(abs(total)), n + 2
    raise NumericError("1F1 series did not converge", a=a, b=b, x=x, terms=MAX_TERMS, last_term=term)


def log_kummer_1f1(a: float, b: float, x: float) -> float:
    """``ln 1F1(a; b; x)`` for ``a, b > 0``.

    Negative arguments go through Kummer's transformation
    ``1F1(a; b; x) = e^x 1F1(b - a; b; -x)`` so that the series has
    non-negative terms whenever ``b > a``.

    Raises
    ------
    NumericError
        If the series does not settle within ``MAX_TERMS`` terms, or the
        value is not positive (its log is then undefined).
    """
    a, b, x = float(a), float(b), float(x)
    if not (a > 0 and b > 0):
        raise DomainError(f"1F1 needs a, b > 0, got a={a}, b={b}")
    if not math.isfinite(x):
        raise DomainError(f"1F1 argument must be finite, got {x}")
    if x >= 0:
        asym = _log_asymptotic(a, b, x)
        return asym if asym is not None else _log_series(a, b, x)[0]
    if b - a > 0:
        asym = _log_asymptotic(b - a, b, -x)
        return x + (asym if asym is not None else _log_series(b - a, b, -x)[0])
    if b == a:
        return x
    sign, logabs, _ = _signed_series(b - a, b, -x)
    if sign < 0:
        raise NumericError("1F1 value is negative; log undefined", a=a, b=b, x=x)
    return x + logabs


def kummer_1f1(a: float, b: float, x: float) -> float:
    """Kummer's confluent hypergeometric function ``1F1(a; b; x)``."""
    a, b, x = float(a), float(b), float(x)
    if x < 0 and b < a:
        if not (a > 0 and b > 0):
            raise DomainError(f"1F1 needs a, b > 0, got a={a}, b={b}")
        sign, logabs, _ = _signed_series(b - a, b, -x)
        return sign * math.exp(x + logabs)
    return math.exp(log_kummer_1f1(a, b, x))


def kummer_beta_log_norm(alpha: float, beta: float, lam: float) -> float:
    """``ln Z`` with ``Z = B(alpha, beta) 1F1(alpha; alpha + beta; -lam)``.

    ``Z`` normalises ``x^(alpha-1) (1-x)^(beta-1) e^(-lam x)`` on ``(0, 1)``.
    """
    if not (alpha > 0 and beta > 0):
        raise DomainError(f"Kummer-Beta needs alpha, beta > 0, got {alpha}, {beta}")
    return log_beta(alpha, beta) + log_kummer_1f1(alpha, alpha + beta, -lam)


@dataclass(frozen=True)
class KummerBetaParams:
    """Kummer-Beta law on ``(0, 1)`` mapped to ``(shift, shift + scale)`` by ``y = scale x + shift``."""

    alpha: float
    beta: float
    lam: float
    scale: float = 1.0
    shift: float = 0.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0 and self.scale > 0):
            raise DomainError(f"invalid Kummer-Beta parameters: {self}")


@dataclass(frozen=True)
class ConvolvedGammaParams:
    """Law of ``Y1 + Y2`` with ``Y1 ~ Gamma(alpha, beta)`` and ``Y2 ~ Gamma(lam, beta - delta)``."""

    alpha: float
    beta: float
    lam: float
    delta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0 and self.lam > 0 and self.delta < self.beta):
            raise DomainError(f"invalid convolved-gamma parameters: {self}")


def kummer_beta_shifted_logpdf(y: float, p: KummerBetaParams) -> float:
    """Log-density of the shifted/scaled Kummer-Beta law; ``-inf`` off ``(b, a + b)``."""
    a, b = p.scale, p.shift
    lo, hi = y - b, a + b - y
    if not (lo > 0 and hi > 0):
        return -math.inf
    return (
        p.lam * b / a
        - (p.alpha + p.beta - 1.0) * math.log(a)
        - kummer_beta_log_norm(p.alpha, p.beta, p.lam)
        + (p.alpha - 1.0) * math.log(lo)
        + (p.beta - 1.0) * math.log(hi)
        - p.lam * y / a
    )


def convolved_gamma_logpdf(x: float, p: ConvolvedGammaParams) -> float:
    """Log-density of the convolved-gamma law at ``x``; ``-inf`` for ``x <= 0``."""
    if not x > 0:
        return -math.inf
    shape = p.alpha + p.lam
    return (
        p.alpha * math.log(p.beta)
        + p.lam * math.log(p.beta - p.delta)
        - log_gamma(shape)
        + (shape - 1.0) * math.log(x)
        - p.beta * x
        + log_kummer_1f1(p.lam, shape, p.delta * x)
    )


def kummer_beta_shifted_pdf(y: float, p: KummerBetaParams) -> float:
    return math.exp(kummer_beta_shifted_logpdf(y, p))


def convolved_gamma_pdf(x: float, p: ConvolvedGammaParams) -> float:
    return math.exp(convolved_gamma_logpdf(x, p))
