"""Bias-cancelling weights for the weighted kNN entropy estimator."""
from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.special import gammaln

from ..errors import InvalidRangeError

_RESIDUAL_TOL = 1e-8
_COND_MAX = 1e12


class WknnWeights(NamedTuple):
    ks: np.ndarray
    weights: np.ndarray
    fallback: bool


def bias_constraints(k_min: int, k_max: int, d: int) -> np.ndarray:
    """Rows ``Gamma(k + i/d) / Gamma(k)`` for ``i = 1..min(d // 2, k_max - k_min - 1)``."""
    ks = np.arange(k_min, k_max + 1, dtype=np.float64)
    m = min(d // 2, k_max - k_min - 1)
    rows = [np.exp(gammaln(ks + i / d) - gammaln(ks)) for i in range(1, m + 1)]
    return np.array(rows).reshape(m, len(ks))


def solve_wknn_weights(k_min: int, k_max: int, d: int) -> WknnWeights:
    """Minimum-norm weights with unit sum whose leading bias terms cancel.

    Solves ``min ||w||^2`` subject to ``sum w = 1`` and ``B w = 0`` with
    ``B`` from :func:`bias_constraints`.  When the constraint system is
    ill-conditioned the uniform weights are returned with ``fallback`` set.
    """
    if not 1 <= k_min < k_max:
        raise InvalidRangeError(f"need 1 <= k_min < k_max, got ({k_min}, {k_max})")
    if d < 1:
        raise ValueError("d must be >= 1")
    ks = np.arange(k_min, k_max + 1)
    n = len(ks)
    uniform = np.full(n, 1.0 / n)
    B = bias_constraints(k_min, k_max, d)
    if B.shape[0] == 0:
        return WknnWeights(ks, uniform, False)
    A = np.vstack([np.ones(n), B])
    b = np.zeros(A.shape[0])
    b[0] = 1.0
    gram = A @ A.T
    if not np.all(np.isfinite(gram)) or np.linalg.cond(gram) > _COND_MAX:
        return WknnWeights(ks, uniform, True)
    w = A.T @ np.linalg.solve(gram, b)
    if np.max(np.abs(A @ w - b)) > _RESIDUAL_TOL:
        return WknnWeights(ks, uniform, True)
    return WknnWeights(ks, w, False)
