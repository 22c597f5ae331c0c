"""Exact nearest-neighbour distances and Euclidean minimum spanning trees.

For dimensions up to 32 squared distances are accumulated one coordinate
at a time, in coordinate order, so they match a naive per-pair loop bit for
bit.  Wider raw features use ``|a|^2 + |b|^2 - 2 a.b`` through BLAS.
"""
from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from ..errors import TooFewSamplesError

# elements per squared-distance block in the brute-force scan
_BLOCK = 1 << 16
# above this dimension the scan switches to the (inexact) Gram-matrix form
_WIDE = 32


def _sq_dists(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    if A.shape[0] == 1 and A.shape[1] > 1:
        diff = B - A[0]
        return np.einsum("ij,ij->i", diff, diff)[None, :]
    if A.shape[1] > _WIDE:
        sq = np.einsum("ij,ij->i", A, A)[:, None] + np.einsum("ij,ij->i", B, B)[None, :] - 2.0 * (A @ B.T)
        return np.maximum(sq, 0.0)
    out = np.subtract(A[:, None, 0], B[None, :, 0])
    np.square(out, out=out)
    if A.shape[1] > 1:
        tmp = np.empty_like(out)
        for c in range(1, A.shape[1]):
            np.subtract(A[:, None, c], B[None, :, c], out=tmp)
            np.square(tmp, out=tmp)
            out += tmp
    return out


def knn_distances(X: np.ndarray, k: int, backend: str = "brute") -> np.ndarray:
    """Distances from each row to its 1st..kth nearest other row, ascending.

    Parameters
    ----------
    X : (T, d) array
    k : int
        Number of neighbours; needs ``T >= k + 1``.
    backend : {"brute", "tree"}
        ``brute`` is the exact O(T^2) scan; ``tree`` uses a k-d tree and is
        meant for large single-group baselines.

    Returns
    -------
    (T, k) array
    """
    X = np.asarray(X, dtype=np.float64)
    T = X.shape[0]
    if k < 1:
        raise ValueError("k must be >= 1")
    if T < k + 1:
        raise TooFewSamplesError(f"{k} neighbours need at least {k + 1} samples, got {T}")
    if backend == "tree":
        dist, _ = cKDTree(X).query(X, k=k + 1)
        # the zero self-distance is always the smallest entry
        return np.ascontiguousarray(dist[:, 1:])
    if backend != "brute":
        raise ValueError(f"unknown backend {backend!r}")
    out = np.empty((T, k))
    step = max(1, _BLOCK // max(T, 1))
    for start in range(0, T, step):
        stop = min(start + step, T)
        sq = _sq_dists(X[start:stop], X)
        sq[np.arange(stop - start), np.arange(start, stop)] = np.inf
        part = np.partition(sq, k - 1, axis=1)[:, :k]
        part.sort(axis=1)
        out[start:stop] = np.sqrt(part)
    return out


def mst_edge_lengths(X: np.ndarray) -> np.ndarray:
    """Edge lengths of a Euclidean minimum spanning tree (dense Prim, O(T^2))."""
    X = np.asarray(X, dtype=np.float64)
    T = X.shape[0]
    if T < 2:
        raise TooFewSamplesError(f"a spanning tree needs at least 2 samples, got {T}")
    # vertices outside the tree live in rest[:m]; removal swaps with the last one
    rest = np.array(X[1:], copy=True)
    best = _sq_dists(X[:1], rest)[0]
    edges = np.empty(T - 1)
    for i in range(T - 1):
        m = T - 1 - i
        j = int(np.argmin(best[:m]))
        edges[i] = best[j]
        x = rest[j].copy()
        last = m - 1
        rest[j] = rest[last]
        best[j] = best[last]
        if last:
            np.minimum(best[:last], _sq_dists(x[None, :], rest[:last])[0], out=best[:last])
    return np.sqrt(edges)
