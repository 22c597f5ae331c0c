"""Rotation registration by grid search over a similarity objective."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .ensemble import ensemble_entropy, make_plan
from .entropy.estimators import EstimatorSpec
from .errors import DimensionMismatchError, RPRegError
from .features import joint_features
from .image_io import ImageGrid, PixelRect, rotate, valid_region
from .seeding import derive_seed


@dataclass(frozen=True)
class AngleGrid:
    angles: tuple

    def __post_init__(self):
        a = tuple(sorted(set(round(float(t), 10) for t in self.angles)))
        if not a:
            raise ValueError("angle grid is empty")
        object.__setattr__(self, "angles", a)

    def __len__(self):
        return len(self.angles)

    def __iter__(self):
        return iter(self.angles)

    @property
    def max_abs(self) -> float:
        return max(abs(t) for t in self.angles)


def _steps(start: float, stop: float, step: float) -> list:
    n = int(round((stop - start) / step))
    return [round(start + i * step, 10) for i in range(n + 1)]


def paper_angle_grid() -> AngleGrid:
    """-10..10 deg in 0.5 deg steps, refined to 0.1 deg steps on [-1, 1]."""
    return AngleGrid(_steps(-10.0, 10.0, 0.5) + _steps(-1.0, 1.0, 0.1))


def parse_angle_grid(text: str) -> AngleGrid:
    """``paper``, or comma-separated values and ``start:stop:step`` ranges."""
    text = text.strip()
    if text == "paper":
        return paper_angle_grid()
    angles = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            bits = [float(b) for b in part.split(":")]
            if len(bits) != 3 or bits[2] <= 0 or bits[1] < bits[0]:
                raise ValueError(f"bad angle range {part!r}; expected start:stop:step")
            angles.extend(_steps(*bits))
        else:
            angles.append(float(part))
    return AngleGrid(angles)


@dataclass(frozen=True)
class EntropyObjective:
    """Negative ensemble joint entropy of patch features.

    ``region`` must be the same for every angle of a sweep; ``None`` derives
    it from ``max_theta``.
    """

    h: int = 3
    d: int | None = 5
    G: int = 100
    spec: EstimatorSpec = field(default_factory=EstimatorSpec)
    max_samples: int | None = None
    workers: int = 1

    name = "entropy"

    def metadata(self, region: PixelRect) -> dict:
        return {
            "objective": self.name, "h": self.h, "d": self.d, "G": self.G,
            "kind": self.spec.kind, "calibrated": self.spec.calibrate_constant,
            "region": region, "max_samples": self.max_samples,
        }

    def __call__(self, ref: ImageGrid, test: ImageGrid, theta: float, region: PixelRect,
                 seed: int, sample_seed: int):
        warped = rotate(test, theta).image
        X = joint_features(ref, warped, self.h, region, self.max_samples, sample_seed)
        plan = make_plan(X.T, self.G, seed)
        est = ensemble_entropy(X, plan, self.d, self.spec, workers=self.workers)
        info = {"T": X.T, "n_groups": est.n_groups, "n_skipped": est.n_skipped, "flags": est.flags}
        return -est.value, info


@dataclass(frozen=True)
class NormObjective:
    """Negative sum of per-pixel L_q distances between patch features."""

    h: int = 3
    q: int = 2

    name = "norm"

    def metadata(self, region: PixelRect) -> dict:
        return {"objective": self.name, "h": self.h, "q": self.q, "region": region}

    def __call__(self, ref, test, theta, region, seed=0, sample_seed=0):
        warped = rotate(test, theta).image
        return _norm_value(ref, warped, self.h, region, self.q), {"T": region.count, "flags": ()}


def _box_sums(a: np.ndarray, h: int, region: PixelRect) -> np.ndarray:
    """Sum of ``a`` over the (2h+1)^2 window of each pixel in ``region``."""
    c = np.zeros((a.shape[0] + 1, a.shape[1] + 1))
    c[1:, 1:] = np.cumsum(np.cumsum(a, axis=0), axis=1)
    ys = np.arange(region.y0, region.y1 + 1)[:, None]
    xs = np.arange(region.x0, region.x1 + 1)[None, :]
    y0, y1, x0, x1 = ys - h, ys + h + 1, xs - h, xs + h + 1
    return c[y1, x1] - c[y0, x1] - c[y1, x0] + c[y0, x0]


def _norm_value(ref: ImageGrid, test: ImageGrid, h: int, region: PixelRect, q: int) -> float:
    if ref.data.shape != test.data.shape:
        raise DimensionMismatchError("images differ in size")
    diff = ref.data - test.data
    if h == 0:
        window = np.abs(diff[region.y0:region.y1 + 1, region.x0:region.x1 + 1])
        return -float(np.sum(window))
    if q == 1:
        per_pixel = _box_sums(np.abs(diff), h, region)
    elif q == 2:
        per_pixel = np.sqrt(np.maximum(_box_sums(diff * diff, h, region), 0.0))
    else:
        raise ValueError(f"q must be 1 or 2, got {q}")
    return -float(np.sum(per_pixel))


def objective_norm(ref: ImageGrid, test: ImageGrid, theta: float, h: int, q: int = 2,
                   region: PixelRect | None = None) -> float:
    """``-sum_p ||f(p; ref) - f(p; rotate(test, theta))||_q`` over ``region``."""
    if region is None:
        region = valid_region(ref.width, ref.height, abs(theta), h)
    return NormObjective(h, q)(ref, test, theta, region)[0]


def objective_entropy(ref: ImageGrid, test: ImageGrid, theta: float, h: int, d, G: int,
                      spec: EstimatorSpec, seed: int, *, region: PixelRect | None = None,
                      max_theta: float | None = None, max_samples=None, workers: int = 1) -> float:
    """Negative RP-ensemble joint entropy of ``[patch(ref); patch(rotate(test, theta))]``.

    Pass the sweep's ``region`` (or ``max_theta``) so that values at
    different angles share one sample support.
    """
    if region is None:
        region = valid_region(ref.width, ref.height, abs(theta) if max_theta is None else max_theta, h)
    obj = EntropyObjective(h, d, G, spec, max_samples, workers)
    return obj(ref, test, theta, region, seed, derive_seed(seed, 0x5A))[0]


@dataclass(frozen=True)
class AngleRecord:
    theta: float
    J: float
    elapsed_ms: float
    valid: bool = True
    flags: tuple = ()
    info: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class SweepResult:
    per_angle: tuple
    theta_star: float
    error_deg: float
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def values(self) -> np.ndarray:
        return np.array([r.J for r in self.per_angle])

    @property
    def elapsed_ms(self) -> float:
        return float(sum(r.elapsed_ms for r in self.per_angle))


def select_theta_star(thetas, values, valid=None) -> float:
    """Argmax of ``values``; ties go to the smallest ``|theta|``, then the smallest ``theta``."""
    best = None
    for i, (t, v) in enumerate(zip(thetas, values)):
        if valid is not None and not valid[i]:
            continue
        if not math.isfinite(v):
            continue
        key = (-v, abs(t), t)
        if best is None or key < best[0]:
            best = (key, t)
    if best is None:
        raise RPRegError("no valid angle in the sweep")
    return best[1]


def sweep(ref: ImageGrid, test: ImageGrid, grid: AngleGrid, objective=None, seed: int = 0,
          *, shared_randomness: bool = True, clock=time.perf_counter) -> SweepResult:
    """Evaluate ``objective`` at every angle of ``grid`` and locate the maximum.

    The valid region is computed once from the largest ``|theta|`` and
    reused for every angle; pixel subsampling is seeded from ``seed`` alone
    so all angles see the same pixels.  With ``shared_randomness`` (the
    default) every angle uses the same group plan and projection matrices,
    so estimator noise largely cancels between angles; otherwise angle
    ``i`` is seeded from ``(seed, i)``.
    An angle whose evaluation raises is recorded as invalid and excluded
    from the argmax.
    """
    if objective is None:
        objective = EntropyObjective()
    if ref.data.shape != test.data.shape:
        raise DimensionMismatchError("reference and test images differ in size")
    region = valid_region(ref.width, ref.height, grid.max_abs, objective.h)
    sample_seed = derive_seed(seed, 0x5A)
    records = []
    for i, theta in enumerate(grid):
        t0 = clock()
        try:
            angle_seed = derive_seed(seed, 1) if shared_randomness else derive_seed(seed, 1, i)
            J, info = objective(ref, test, theta, region, angle_seed, sample_seed)
            rec = AngleRecord(theta, float(J), 0.0, True, tuple(info.get("flags", ())), info)
        except RPRegError as exc:
            rec = AngleRecord(theta, float("nan"), 0.0, False, (type(exc).__name__,), {})
        elapsed = (clock() - t0) * 1000.0
        records.append(AngleRecord(rec.theta, rec.J, elapsed, rec.valid, rec.flags, rec.info))
    thetas = [r.theta for r in records]
    theta_star = select_theta_star(thetas, [r.J for r in records], [r.valid for r in records])
    return SweepResult(tuple(records), theta_star, abs(theta_star - 0.0), objective.metadata(region))
