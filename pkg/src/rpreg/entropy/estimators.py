"""Shannon and Renyi entropy estimators built on kNN / MST graph functionals.

All values are in nats.  Estimators raise :class:`DegenerateSampleError`
instead of returning ``-inf``/``nan`` when duplicate points make a log
argument vanish.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import digamma, gammaln, logsumexp

from ..errors import AlphaInvalidError, DegenerateSampleError, InvalidRangeError, TooFewSamplesError
from ..features import as_matrix
from ..seeding import make_rng
from .neighbors import knn_distances, mst_edge_lengths

KINDS = ("kdp", "knn_k", "knn_1k", "mst", "wknn")


@dataclass(frozen=True)
class EstimatorSpec:
    """Which estimator to run and its hyperparameters.

    ``S`` defaults to ``{1, ..., k}``.  ``jitter`` > 0 adds deterministic
    uniform noise of that magnitude before estimation to break ties between
    duplicate samples; ``backend`` selects the neighbour search.
    """

    kind: str = "knn_k"
    k: int = 5
    alpha: float = 0.95
    S: tuple = None
    wknn_k_range: tuple = (1, 10)
    kdp_min_cell: int = 2
    calibrate_constant: bool = False
    calibration_reps: int = 10
    jitter: float = 0.0
    backend: str = "brute"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown estimator {self.kind!r}; expected one of {KINDS}")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not math.isfinite(self.alpha) or self.alpha <= 0 or self.alpha == 1.0:
            raise AlphaInvalidError(f"alpha must be positive and != 1, got {self.alpha}")
        S = tuple(range(1, self.k + 1)) if self.S is None else tuple(sorted(set(int(j) for j in self.S)))
        if not S or S[0] < 1 or S[-1] > self.k:
            raise ValueError(f"S must be a nonempty subset of 1..{self.k}, got {self.S}")
        object.__setattr__(self, "S", S)
        lo, hi = self.wknn_k_range
        if not 1 <= lo < hi:
            raise InvalidRangeError(f"wknn_k_range must satisfy 1 <= k_min < k_max, got {self.wknn_k_range}")
        object.__setattr__(self, "wknn_k_range", (int(lo), int(hi)))
        if self.kdp_min_cell < 1:
            raise ValueError("kdp_min_cell must be >= 1")

    @property
    def min_samples(self) -> int:
        return {
            "knn_k": self.k + 1,
            "knn_1k": self.k + 1,
            "wknn": self.wknn_k_range[1] + 1,
            "mst": 2,
            "kdp": 2,
        }[self.kind]

    def with_(self, **changes) -> "EstimatorSpec":
        return replace(self, **changes)


@dataclass(frozen=True)
class EntropyEstimate:
    value: float
    kind: str
    T: int
    d: int
    constant_calibrated: bool = False
    flags: tuple = field(default=())


def log_unit_ball_volume(d: int) -> float:
    return 0.5 * d * math.log(math.pi) - float(gammaln(0.5 * d + 1.0))


def _prepare(X, spec: EstimatorSpec | None = None) -> np.ndarray:
    arr = as_matrix(X)
    if spec is not None and spec.jitter > 0:
        arr = arr + spec.jitter * make_rng(0x5EED).uniform(-1.0, 1.0, size=arr.shape)
    return arr


def _require_renyi_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise AlphaInvalidError(f"graph-length estimators need alpha in (0, 1), got {alpha}")


def _kl_from_distances(eps: np.ndarray, k: int, d: int) -> float:
    T = eps.shape[0]
    if np.any(eps <= 0):
        raise DegenerateSampleError(f"{int(np.sum(eps <= 0))} zero {k}-NN distances (duplicate samples)")
    return float(digamma(T) - digamma(k) + log_unit_ball_volume(d) + d * np.mean(np.log(eps)))


def shannon_knn(X, k: int = 5, *, backend: str = "brute", spec: EstimatorSpec | None = None) -> EntropyEstimate:
    """Kozachenko-Leonenko estimate from k-th nearest-neighbour distances.

    ``psi(T) - psi(k) + log V_d + (d/T) sum_t log eps_k(t)``
    """
    arr = _prepare(X, spec)
    T, d = arr.shape
    eps = knn_distances(arr, k, backend)[:, k - 1]
    return EntropyEstimate(_kl_from_distances(eps, k, d), "knn_k", T, d, False)


def renyi_knn(X, spec: EstimatorSpec) -> EntropyEstimate:
    """Renyi entropy from k-th neighbour distances (Leonenko-Pronzato-Savani form)."""
    arr = _prepare(X, spec)
    T, d = arr.shape
    k, a = spec.k, spec.alpha
    if a <= 0 or a == 1 or k + 1 - a <= 0:
        raise AlphaInvalidError(f"alpha={a} invalid for k={k}")
    eps = knn_distances(arr, k, spec.backend)[:, k - 1]
    if np.any(eps <= 0):
        raise DegenerateSampleError("zero k-NN distances (duplicate samples)")
    one_m = 1.0 - a
    log_ck = (gammaln(k) - gammaln(k + one_m)) / one_m
    log_terms = one_m * (math.log(T - 1) + log_ck + log_unit_ball_volume(d) + d * np.log(eps))
    value = (logsumexp(log_terms) - math.log(T)) / one_m
    return EntropyEstimate(float(value), "knn_k", T, d, False)


def knn_graph_length(arr: np.ndarray, S, p: float, backend: str = "brute") -> float:
    """``sum_t sum_{j in S} eps_j(t)^p``."""
    eps = knn_distances(arr, max(S), backend)[:, [j - 1 for j in S]]
    return float(np.sum(eps ** p))


def mst_length(arr: np.ndarray, p: float) -> float:
    return float(np.sum(mst_edge_lengths(arr) ** p))


def _graph_entropy(L: float, T: int, alpha: float, log_const: float) -> float:
    if not L > 0 or not math.isfinite(L):
        raise DegenerateSampleError(f"graph length {L} is not positive")
    return (math.log(L) - alpha * math.log(T) - log_const) / (1.0 - alpha)


def renyi_knn_graph(X, spec: EstimatorSpec) -> EntropyEstimate:
    """Renyi entropy from the kNN graph over the neighbour subset ``spec.S``.

    Without calibration the normalising constant is taken as 1 and the
    value is off by ``log(gamma) / (1 - alpha)``.
    """
    _require_renyi_alpha(spec.alpha)
    arr = _prepare(X, spec)
    T, d = arr.shape
    if T < spec.k + 1:
        raise TooFewSamplesError(f"need at least {spec.k + 1} samples, got {T}")
    p = d * (1.0 - spec.alpha)
    L = knn_graph_length(arr, spec.S, p, spec.backend)
    log_const = 0.0
    if spec.calibrate_constant:
        from .calibration import calibrate_constant

        log_const = math.log(calibrate_constant("knn_1k", d, spec.alpha, T, spec.calibration_reps, S=spec.S))
    return EntropyEstimate(_graph_entropy(L, T, spec.alpha, log_const), "knn_1k", T, d, spec.calibrate_constant)


def renyi_mst(X, spec: EstimatorSpec) -> EntropyEstimate:
    """Renyi entropy from the power-weighted Euclidean MST length."""
    _require_renyi_alpha(spec.alpha)
    arr = _prepare(X, spec)
    T, d = arr.shape
    if T < 2:
        raise TooFewSamplesError(f"need at least 2 samples, got {T}")
    p = d * (1.0 - spec.alpha)
    L = mst_length(arr, p)
    log_const = 0.0
    if spec.calibrate_constant:
        from .calibration import calibrate_constant

        log_const = math.log(calibrate_constant("mst", d, spec.alpha, T, spec.calibration_reps))
    return EntropyEstimate(_graph_entropy(L, T, spec.alpha, log_const), "mst", T, d, spec.calibrate_constant)


def shannon_wknn(X, spec: EstimatorSpec) -> EntropyEstimate:
    """Weighted combination of Kozachenko-Leonenko estimates over ``wknn_k_range``."""
    from .wknn import solve_wknn_weights

    arr = _prepare(X, spec)
    T, d = arr.shape
    k_min, k_max = spec.wknn_k_range
    if T < k_max + 1:
        raise TooFewSamplesError(f"wkNN with k_max={k_max} needs at least {k_max + 1} samples, got {T}")
    sol = solve_wknn_weights(k_min, k_max, d)
    eps = knn_distances(arr, k_max, spec.backend)
    value = 0.0
    for k, w in zip(sol.ks, sol.weights):
        value += w * _kl_from_distances(eps[:, k - 1], k, d)
    flags = ("wknn_uniform_fallback",) if sol.fallback else ()
    return EntropyEstimate(float(value), "wknn", T, d, False, flags)


def kdp_entropy(X, spec: EstimatorSpec) -> EntropyEstimate:
    from .kdp import kdp_entropy_value

    arr = _prepare(X, spec)
    T, d = arr.shape
    return EntropyEstimate(kdp_entropy_value(arr, spec.kdp_min_cell), "kdp", T, d, False)


def estimate(X, spec: EstimatorSpec) -> EntropyEstimate:
    """Run the estimator selected by ``spec.kind`` on ``X``.

    ``knn_k`` uses the Renyi form at ``spec.alpha``; call
    :func:`shannon_knn` directly for the Shannon form.
    """
    arr = as_matrix(X)
    if arr.shape[0] < spec.min_samples:
        raise TooFewSamplesError(f"{spec.kind} needs at least {spec.min_samples} samples, got {arr.shape[0]}")
    if spec.kind == "knn_k":
        return renyi_knn(arr, spec)
    if spec.kind == "knn_1k":
        return renyi_knn_graph(arr, spec)
    if spec.kind == "mst":
        return renyi_mst(arr, spec)
    if spec.kind == "wknn":
        return shannon_wknn(arr, spec)
    return kdp_entropy(arr, spec)
