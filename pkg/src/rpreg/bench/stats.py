"""Boxplot summary statistics."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..errors import EmptyInputError


@dataclass(frozen=True)
class BoxStats:
    q1: float
    q2: float
    q3: float
    whisker_lo: float
    whisker_hi: float
    outliers: tuple

    def to_dict(self) -> dict:
        d = asdict(self)
        d["outliers"] = list(self.outliers)
        return d


def _median(sorted_vals) -> float:
    n = len(sorted_vals)
    mid = n // 2
    if n % 2:
        return float(sorted_vals[mid])
    return (float(sorted_vals[mid - 1]) + float(sorted_vals[mid])) / 2.0


def tukey_hinges(values):
    """Quartiles as Tukey hinges: medians of the halves, each half including the median."""
    v = sorted(float(x) for x in values)
    n = len(v)
    if n == 0:
        raise EmptyInputError("box statistics need at least one value")
    half = (n + 1) // 2
    return _median(v[:half]), _median(v), _median(v[n - half:])


def box_stats(values) -> BoxStats:
    """Hinges, whiskers and outliers with the 1.5 IQR fence rule.

    Outliers are the points outside ``[q1 - 1.5 IQR, q3 + 1.5 IQR]``;
    whiskers are the extreme points inside it.
    """
    vals = [float(x) for x in values]
    if not vals or not all(np.isfinite(vals)):
        raise EmptyInputError("box statistics need at least one finite value")
    q1, q2, q3 = tukey_hinges(vals)
    iqr = q3 - q1
    lo, hi = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    inside = [x for x in vals if lo <= x <= hi]
    outliers = tuple(sorted(x for x in vals if x < lo or x > hi))
    return BoxStats(q1, q2, q3, min(inside), max(inside), outliers)
