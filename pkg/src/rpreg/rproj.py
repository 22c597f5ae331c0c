"""Gaussian random projections.

The ``1/sqrt(d)`` normalisation of the classical JL map is not applied: it
only shifts a differential entropy by a known constant.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError
from .features import FeatureSet, as_matrix
from .seeding import make_rng


@dataclass(frozen=True, eq=False)
class ProjectionMatrix:
    entries: np.ndarray = field(repr=False)
    seed: int | None = None

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @classmethod
    def identity(cls, D: int) -> "ProjectionMatrix":
        eye = np.eye(D)
        eye.setflags(write=False)
        return cls(eye, None)


def gaussian_matrix(d: int, D: int, seed: int) -> ProjectionMatrix:
    """``d x D`` matrix of i.i.d. N(0, 1) entries drawn from the seeded Philox stream."""
    if d < 1 or D < 1:
        raise ValueError(f"projection shape must be positive, got {d}x{D}")
    entries = make_rng(seed).standard_normal((d, D))
    entries.setflags(write=False)
    return ProjectionMatrix(entries, int(seed))


def project_rows(M: ProjectionMatrix, X: np.ndarray) -> np.ndarray:
    """``Y = X M^T`` on a plain array (each row ``y_t = M x_t``)."""
    if X.shape[1] != M.cols:
        raise DimensionMismatchError(f"matrix has {M.cols} columns, samples have dimension {X.shape[1]}")
    return X @ M.entries.T


def project(M: ProjectionMatrix, X) -> FeatureSet:
    arr = as_matrix(X)
    return FeatureSet(project_rows(M, arr))
