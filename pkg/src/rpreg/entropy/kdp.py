"""Recursive k-d partitioning plug-in entropy estimate."""
from __future__ import annotations

import math

import numpy as np

from ..errors import TooFewSamplesError, ZeroVolumeError

# two-sided 95% cut for the median-vs-midrange uniformity test
Z_CUT = 1.96
# the root cell is always split
UNIFORMITY_MIN_DEPTH = 1


def kdp_cells(X: np.ndarray, min_cell: int = 2):
    """Partition ``X`` and return the leaf cells as ``(count, log_volume)`` pairs.

    A cell is split at the median of its widest data axis unless it holds
    fewer than ``max(min_cell, ceil(sqrt(T)))`` points, its points look
    uniform along that axis (``|z| < Z_CUT`` with
    ``z = sqrt(n) (2 median - lo - hi) / (hi - lo)``), or the split would
    leave one side empty.
    """
    X = np.asarray(X, dtype=np.float64)
    T, d = X.shape
    if T < 2:
        raise TooFewSamplesError(f"kdp needs at least 2 samples, got {T}")
    lo0, hi0 = X.min(axis=0), X.max(axis=0)
    if np.any(hi0 <= lo0):
        raise ZeroVolumeError("all samples share a coordinate; bounding box has zero volume")
    n_stop = max(min_cell, math.ceil(math.sqrt(T)))
    leaves = []
    stack = [(np.arange(T), lo0.copy(), hi0.copy(), 0)]
    while stack:
        idx, lo, hi, depth = stack.pop()
        n = len(idx)
        log_vol = float(np.sum(np.log(hi - lo)))
        if n < n_stop:
            leaves.append((n, log_vol))
            continue
        pts = X[idx]
        spread = pts.max(axis=0) - pts.min(axis=0)
        axis = int(np.argmax(spread))
        if spread[axis] <= 0:
            leaves.append((n, log_vol))
            continue
        vals = pts[:, axis]
        med = float(np.median(vals))
        a, b = lo[axis], hi[axis]
        if depth >= UNIFORMITY_MIN_DEPTH:
            z = math.sqrt(n) * (2.0 * med - a - b) / (b - a)
            if abs(z) < Z_CUT:
                leaves.append((n, log_vol))
                continue
        left = vals <= med
        n_left = int(left.sum())
        if not (a < med < b) or n_left == 0 or n_left == n:
            leaves.append((n, log_vol))
            continue
        hi_l = hi.copy()
        hi_l[axis] = med
        lo_r = lo.copy()
        lo_r[axis] = med
        stack.append((idx[~left], lo_r, hi.copy(), depth + 1))
        stack.append((idx[left], lo.copy(), hi_l, depth + 1))
    return leaves


def kdp_entropy_value(X: np.ndarray, min_cell: int = 2) -> float:
    """``sum_j (n_j / T) log(T vol_j / n_j)`` over the leaf cells."""
    T = np.asarray(X).shape[0]
    leaves = kdp_cells(X, min_cell)
    logT = math.log(T)
    return float(sum((n / T) * (logT + lv - math.log(n)) for n, lv in leaves))
