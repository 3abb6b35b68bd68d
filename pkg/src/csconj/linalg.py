"""
Algebra on compound-symmetric (CS) matrices.

A CS matrix of order ``d`` is ``(a1 - a2) I_d + a2 1 1^T``: one common
diagonal entry ``a1`` and one common off-diagonal entry ``a2``.  Its
eigenvalues are ``a1 + (d - 1) a2`` (eigenvector ``1``) and ``a1 - a2``
(multiplicity ``d - 1``), so every operation here is O(1) on the pair.

The open cone of positive definite CS matrices is

.. math::
    \\mathcal C_d = \\{(a_1, a_2) : a_1 > 0,\\; -a_1/(d-1) < a_2 < a_1\\}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError, SingularMatrixError


@dataclass(frozen=True)
class CsPair:
    """The two distinct entries of a ``d x d`` compound-symmetric matrix.

    ``d == 1`` is accepted so that one-element blocks (a single missing
    observation, say) share the representation; ``a2`` is then inert.
    """

    d: int
    a1: float
    a2: float

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise DimensionError(f"dimension must be a positive integer, got {self.d!r}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "a1", float(self.a1))
        object.__setattr__(self, "a2", float(self.a2))

    @property
    def eigenvalues(self) -> tuple[float, float]:
        """``(a1 + (d-1) a2, a1 - a2)``: along ``1`` and on its complement."""
        return self.a1 + (self.d - 1) * self.a2, self.a1 - self.a2

    def is_conic(self) -> bool:
        if self.d == 1:
            return self.a1 > 0
        return bool(cone_contains(self.d, self.a1, self.a2))


@dataclass(frozen=True)
class SymmetricSummary:
    """Trace and grand sum of a symmetric matrix ``B``.

    These are the only two functionals of ``B`` that a trace against a CS
    matrix can see: ``tr(A B) = (a1 - a2) tr(B) + a2 1^T B 1``.
    """

    d: int
    trace: float
    grand_sum: float

    @classmethod
    def from_matrix(cls, b) -> "SymmetricSummary":
        b = _square(b)
        return cls(b.shape[0], float(np.trace(b)), float(b.sum()))

    @property
    def off_diagonal_sum(self) -> float:
        return self.grand_sum - self.trace

    def satisfies_trace_bounds(self) -> bool:
        """Strict bounds ``-tr < 1^T B 1 - tr < (d-1) tr`` held by every PD matrix."""
        off = self.off_diagonal_sum
        return -self.trace < off < (self.d - 1) * self.trace


def _check_dim(d):
    if int(d) != d or d < 2:
        raise DimensionError(f"cone dimension must be an integer >= 2, got {d!r}")
    return int(d)


def _square(b):
    b = np.asarray(b, dtype=float)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {b.shape}")
    return b


def cone_contains(d, a1, a2):
    """Strict membership in the open cone ``C_d``.

    Works elementwise when ``a1``/``a2`` are arrays.  Boundary points are
    excluded; no tolerance is applied.
    """
    d = _check_dim(d)
    a1 = np.asarray(a1, dtype=float)
    a2 = np.asarray(a2, dtype=float)
    inside = (a1 > 0) & (a2 < a1) & (-a1 < (d - 1) * a2)
    return bool(inside) if inside.ndim == 0 else inside


def cs_determinant(m: CsPair) -> float:
    return (m.a1 - m.a2) ** (m.d - 1) * (m.a1 + (m.d - 1) * m.a2)


def cs_log_determinant(m: CsPair) -> float:
    """``log|M|`` for positive definite ``m``; avoids overflow for large ``d``."""
    lam_one, lam_rest = m.eigenvalues
    if lam_one <= 0 or (m.d > 1 and lam_rest <= 0):
        raise DomainError(f"matrix is not positive definite: {m}")
    if m.d == 1:
        return float(np.log(m.a1))
    return (m.d - 1) * float(np.log(lam_rest)) + float(np.log(lam_one))


def cs_inverse(m: CsPair) -> CsPair:
    """Inverse via Sherman-Morrison; the off-diagonal entry changes sign."""
    if m.d == 1:
        if m.a1 == 0:
            raise SingularMatrixError("singular 1x1 matrix")
        return CsPair(1, 1.0 / m.a1, 0.0)
    lam_one, lam_rest = m.eigenvalues
    if lam_one == 0 or lam_rest == 0:
        raise SingularMatrixError(f"compound-symmetric matrix is singular: {m}")
    denom = lam_rest * lam_one
    return CsPair(m.d, (m.a1 + (m.d - 2) * m.a2) / denom, -m.a2 / denom)


def cs_trace_product(a: CsPair, b: SymmetricSummary) -> float:
    """``tr(A B)`` from the two-entry form of ``A`` and the summary of ``B``."""
    if a.d != b.d:
        raise DimensionError(f"dimension mismatch: {a.d} vs {b.d}")
    return (a.a1 - a.a2) * b.trace + a.a2 * b.grand_sum


def nearest_cs(b) -> CsPair:
    """Frobenius-nearest CS matrix: average diagonal and average off-diagonal entry."""
    b = _square(b)
    d = b.shape[0]
    if d < 2:
        raise DimensionError("nearest_cs needs d >= 2")
    if not np.allclose(b, b.T, rtol=1e-12, atol=0.0):
        raise DomainError("nearest_cs expects a symmetric matrix")
    tr = float(np.trace(b))
    return CsPair(d, tr / d, (float(b.sum()) - tr) / (d * (d - 1)))


def _to_cone(y1, y2, d):
    """Vectorised forward transform; no validation."""
    return y1 + y2, y1 - y2 / (d - 1)


def _from_cone(a1, a2, d):
    return (a1 + (d - 1) * a2) / d, (d - 1) * (a1 - a2) / d


def cone_transform(y1: float, y2: float, d: int) -> CsPair:
    """Map a point of the open positive quadrant into ``C_d``.

    ``(y1, y2) -> (y1 + y2, y1 - y2/(d-1))``.  The image is always conic.
    """
    d = _check_dim(d)
    if not (y1 > 0 and y2 > 0):
        raise DomainError(f"cone_transform needs y1, y2 > 0, got ({y1}, {y2})")
    a1, a2 = _to_cone(float(y1), float(y2), d)
    return CsPair(d, a1, a2)


def cone_transform_inverse(m: CsPair) -> tuple[float, float]:
    """Inverse of :func:`cone_transform`; defined on the open cone only."""
    _check_dim(m.d)
    if not cone_contains(m.d, m.a1, m.a2):
        raise DomainError(f"point is not in the open cone: {m}")
    return _from_cone(m.a1, m.a2, m.d)


def cs_quadratic_form(m: CsPair, x) -> float | np.ndarray:
    """``x^T M x = (a1 - a2)|x|^2 + a2 (1^T x)^2``.

    ``x`` may be a single vector of length ``d`` or an ``(n, d)`` array,
    in which case one value per row is returned.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (m.d,):
        raise DimensionError(f"vector length {x.shape[-1:]} does not match d={m.d}")
    sq = np.sum(x * x, axis=-1)
    tot = np.sum(x, axis=-1)
    out = (m.a1 - m.a2) * sq + m.a2 * tot * tot
    return float(out) if np.ndim(out) == 0 else out
