"""Grouped random-projection entropy estimation.

The ``T`` samples are shuffled into ``N`` groups, each group is projected
to ``d`` dimensions by its own Gaussian matrix, the entropy of every
projected group is estimated, and the group estimates are averaged.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .entropy.estimators import EntropyEstimate, EstimatorSpec, estimate
from .errors import (
    AllGroupsDegenerateError,
    DegenerateSampleError,
    DimensionMismatchError,
    GroupTooLargeError,
    TooFewSamplesError,
)
from .features import FeatureSet
from .rproj import gaussian_matrix, project_rows
from .seeding import derive_seed, make_rng

# flag the result when more than this fraction of groups was skipped
SKIP_FLAG_FRACTION = 0.10


@dataclass(frozen=True, eq=False)
class GroupPlan:
    group_indices: tuple = field(repr=False)
    G: int
    master_seed: int
    per_group_seeds: tuple = field(repr=False)

    @property
    def N(self) -> int:
        return len(self.group_indices)

    @property
    def T(self) -> int:
        return sum(len(g) for g in self.group_indices)

    def sizes(self) -> list:
        return [len(g) for g in self.group_indices]


def make_plan(T: int, G: int, master_seed: int) -> GroupPlan:
    """Random partition of ``range(T)`` into ``T // G`` groups of size G or G+1.

    The ``T mod G`` leftover indices go one each to the first groups.
    """
    if G < 2:
        raise ValueError(f"group size must be >= 2, got {G}")
    if T < G:
        raise GroupTooLargeError(f"group size {G} exceeds the {T} available samples")
    perm = make_rng(derive_seed(master_seed, 0)).permutation(T)
    N = T // G
    groups = [perm[n * G:(n + 1) * G] for n in range(N)]
    for r, idx in enumerate(perm[N * G:]):
        groups[r % N] = np.append(groups[r % N], idx)
    groups = tuple(np.sort(g) for g in groups)
    for g in groups:
        g.setflags(write=False)
    seeds = tuple(derive_seed(master_seed, 1, n) for n in range(N))
    return GroupPlan(groups, G, int(master_seed), seeds)


def single_group_plan(T: int) -> GroupPlan:
    idx = np.arange(T)
    idx.setflags(write=False)
    return GroupPlan((idx,), T, 0, (0,))


@dataclass(frozen=True)
class EnsembleEstimate(EntropyEstimate):
    n_groups: int = 0
    n_skipped: int = 0
    group_values: tuple = field(default=(), repr=False)

    @property
    def n_effective(self) -> int:
        return self.n_groups - self.n_skipped


def _group_estimate(X: FeatureSet, idx, seed: int, d, spec: EstimatorSpec):
    rows = X.rows(idx)
    if d is not None:
        rows = project_rows(gaussian_matrix(d, X.D, seed), rows)
    try:
        return estimate(rows, spec).value
    except DegenerateSampleError:
        return None


def ensemble_entropy(X, plan: GroupPlan, d, spec: EstimatorSpec, *, workers: int = 1,
                     group_estimator=None) -> EnsembleEstimate:
    """Average of per-group entropy estimates after per-group random projection.

    Parameters
    ----------
    X : FeatureSet or array-like
    plan : GroupPlan
        Must index rows of ``X``.
    d : int or None
        Projection dimension; ``None`` keeps the raw features (identity
        projection).
    spec : EstimatorSpec
    workers : int
        Thread count for the per-group work.  The result does not depend on it.
    group_estimator : callable, optional
        ``f(X, indices, seed, d, spec) -> float or None`` replacing the
        default project-then-estimate step (``None`` marks a degenerate group).
    """
    X = FeatureSet.from_array(X)
    if d is not None and d < 1:
        raise ValueError("projection dimension must be >= 1")
    if plan.N and max(int(g.max()) for g in plan.group_indices) >= X.T:
        raise DimensionMismatchError(f"plan indexes {plan.T} samples but X has {X.T}")
    for g in plan.group_indices:
        if len(g) < spec.min_samples:
            raise TooFewSamplesError(f"group of {len(g)} samples is too small for {spec.kind}")
    fn = group_estimator or _group_estimate
    jobs = list(zip(plan.group_indices, plan.per_group_seeds))
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(lambda job: fn(X, job[0], job[1], d, spec), jobs))
    else:
        values = [fn(X, idx, seed, d, spec) for idx, seed in jobs]
    kept = [v for v in values if v is not None]
    n_skipped = len(values) - len(kept)
    if not kept:
        raise AllGroupsDegenerateError(f"all {len(values)} groups were degenerate")
    total = 0.0
    for v in kept:
        total += v
    flags = ()
    if n_skipped > SKIP_FLAG_FRACTION * len(values):
        flags = ("many_groups_skipped",)
    out_d = X.D if d is None else d
    if not math.isfinite(total):
        raise DegenerateSampleError("non-finite ensemble sum")
    return EnsembleEstimate(
        value=total / len(kept),
        kind=spec.kind,
        T=plan.T,
        d=out_d,
        constant_calibrated=spec.calibrate_constant,
        flags=flags,
        n_groups=len(values),
        n_skipped=n_skipped,
        group_values=tuple(np.nan if v is None else v for v in values),
    )


def baseline_entropy(X, spec: EstimatorSpec) -> EntropyEstimate:
    """The estimator on the raw samples: one group, no projection."""
    X = FeatureSet.from_array(X)
    if X.T < spec.min_samples:
        raise TooFewSamplesError(f"{spec.kind} needs at least {spec.min_samples} samples, got {X.T}")
    return estimate(X.samples, spec)
