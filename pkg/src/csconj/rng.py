"""
Seedable random streams and the variate generators used by the samplers.

A stream is a numpy ``Generator`` over the counter-based Philox bit
generator, keyed by ``(seed, stream_id)`` through ``SeedSequence`` so that
distinct stream ids are independent by construction.  Gamma variates use
the Marsaglia-Tsang squeeze method, written out here rather than taken
from numpy, with the ``U^(1/shape)`` boost for shapes below one.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionError, DomainError
from .linalg import CsPair

_MAX_SEED = 2**64


class RngStream:
    """Single-owner random stream identified by ``(seed, stream_id)``.

    Parameters
    ----------
    seed : int
        Non-negative 64-bit seed.
    stream_id : int
        Substream index; different ids give independent streams.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        if not (0 <= int(seed) < _MAX_SEED) or int(seed) != seed:
            raise DomainError(f"seed must be an integer in [0, 2**64), got {seed!r}")
        if int(stream_id) != stream_id or stream_id < 0:
            raise DomainError(f"stream_id must be a non-negative integer, got {stream_id!r}")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        self.generator = np.random.Generator(np.random.Philox(ss))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"

    def substream(self, stream_id: int) -> "RngStream":
        """A fresh, independent stream sharing this seed."""
        return RngStream(self.seed, stream_id)

    def get_state(self) -> dict:
        return self.generator.bit_generator.state

    def set_state(self, state: dict) -> None:
        self.generator.bit_generator.state = state

    def uniform(self, size=None):
        return self.generator.random(size)

    def normal(self, size=None):
        return self.generator.standard_normal(size)


def _check_shape_rate(shape, rate):
    if not (np.all(np.asarray(shape) > 0) and np.all(np.asarray(rate) > 0)):
        raise DomainError(f"gamma needs shape > 0 and rate > 0, got shape={shape}, rate={rate}")


def standard_gamma(rng: RngStream, shape: float, size: int) -> np.ndarray:
    """``size`` draws from Gamma(shape, 1) by Marsaglia-Tsang rejection."""
    shape = float(shape)
    if not shape > 0:
        raise DomainError(f"gamma needs shape > 0, got {shape}")
    boost = shape < 1.0
    a = shape + 1.0 if boost else shape
    d = a - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    gen = rng.generator
    out = np.empty(size)
    filled = 0
    while filled < size:
        # Acceptance is above 95% for every shape, so a small overdraw fills quickly.
        m = int((size - filled) * 1.06) + 8
        x = gen.standard_normal(m)
        u = gen.random(m)
        v = 1.0 + c * x
        ok = v > 0
        x, u, v = x[ok], u[ok], v[ok] ** 3
        x2 = x * x
        squeeze = u < 1.0 - 0.0331 * x2 * x2
        with np.errstate(divide="ignore"):
            full = np.log(u) < 0.5 * x2 + d * (1.0 - v + np.log(v))
        draws = d * v[squeeze | full]
        take = min(draws.size, size - filled)
        out[filled:filled + take] = draws[:take]
        filled += take
    if boost:
        out *= gen.random(size) ** (1.0 / shape)
    return out


def sample_gamma(rng: RngStream, shape: float, rate: float, size: int | None = None):
    """Draw(s) from Gamma(shape, rate) with density proportional to ``x^(shape-1) e^(-rate x)``.

    Returns a float when ``size`` is None, else an array of that length.
    """
    _check_shape_rate(shape, rate)
    n = 1 if size is None else int(size)
    out = standard_gamma(rng, shape, n) / rate
    # Subnormal shapes can underflow to zero; the law is strictly positive.
    np.maximum(out, np.finfo(float).tiny, out=out)
    return float(out[0]) if size is None else out


def sample_inverse_gamma(rng: RngStream, shape: float, rate: float, size: int | None = None):
    """Reciprocal of a Gamma(shape, rate) draw."""
    g = sample_gamma(rng, shape, rate, size)
    return 1.0 / g


def sample_cs_mvn(rng: RngStream, mean, cov: CsPair, size: int | None = None) -> np.ndarray:
    """Draw from ``N_d(mean, Sigma)`` with compound-symmetric ``Sigma`` in O(d).

    Uses the spectral split
    ``x = mean + sqrt(a1 - a2) (e - mean(e) 1) + sqrt((a1 + (d-1) a2)/d) z 1``.

    Returns shape ``(d,)``, or ``(size, d)`` when ``size`` is given.
    """
    mean = np.asarray(mean, dtype=float)
    d = cov.d
    if mean.shape != (d,):
        raise DimensionError(f"mean has shape {mean.shape}, expected ({d},)")
    if not cov.is_conic():
        raise DomainError(f"covariance is not positive definite: {cov}")
    n = 1 if size is None else int(size)
    if d == 1:
        x = mean + math.sqrt(cov.a1) * rng.normal((n, 1))
    else:
        lam_one, lam_rest = cov.eigenvalues
        eps = rng.normal((n, d))
        z = rng.normal((n, 1))
        x = (
            mean
            + math.sqrt(lam_rest) * (eps - eps.mean(axis=1, keepdims=True))
            + math.sqrt(lam_one / d) * z
        )
    return x[0] if size is None else x
