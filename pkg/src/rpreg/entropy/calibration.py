"""Monte-Carlo normalising constants for the graph-length Renyi estimators.

For uniform samples on the unit cube the Renyi entropy is zero, so the
average of ``L / T^alpha`` over uniform draws estimates the constant that
the kNN-graph and MST estimators divide out.
"""
from __future__ import annotations

import threading

import numpy as np

from ..seeding import derive_seed, make_rng
from .estimators import knn_graph_length, mst_length

_cache: dict = {}
_lock = threading.Lock()


def calibrate_constant(kind: str, d: int, alpha: float, G: int, reps: int = 10,
                       seed: int = 0, S=(1, 2, 3, 4, 5)) -> float:
    """Average ``L / G^alpha`` over ``reps`` uniform samples of size ``G`` on ``[0, 1]^d``.

    Results are memoised per ``(kind, d, alpha, G, reps, seed, S)``; fills
    are serialised, reads are lock-free.
    """
    if kind not in ("knn_1k", "mst"):
        raise ValueError(f"no calibration for estimator {kind!r}")
    if d < 1 or reps < 1 or G < 2:
        raise ValueError("need d >= 1, reps >= 1 and G >= 2")
    S = tuple(S) if kind == "knn_1k" else ()
    key = (kind, int(d), float(alpha), int(G), int(reps), int(seed), S)
    hit = _cache.get(key)
    if hit is not None:
        return hit
    with _lock:
        hit = _cache.get(key)
        if hit is not None:
            return hit
        p = d * (1.0 - alpha)
        total = 0.0
        for r in range(reps):
            U = make_rng(derive_seed(seed, d, G, r)).uniform(size=(G, d))
            L = knn_graph_length(U, S, p) if kind == "knn_1k" else mst_length(U, p)
            total += L / G ** alpha
        value = total / reps
        _cache[key] = value
        return value


def clear_cache() -> None:
    with _lock:
        _cache.clear()
