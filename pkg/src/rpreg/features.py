"""Patch features and the joint reference/test sample set."""
from __future__ import annotations

import csv

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import DimensionMismatchError, EmptyRegionError, PatchOutOfBoundsError
from .image_io import ImageGrid, PixelRect
from .seeding import make_rng


def extract_patch(img: ImageGrid, p, h: int) -> np.ndarray:
    """Row-major ``(2h+1)^2`` window of ``img`` centred on pixel ``p = (x, y)``."""
    x, y = int(p[0]), int(p[1])
    if h < 0:
        raise ValueError("patch radius must be >= 0")
    if x - h < 0 or y - h < 0 or x + h >= img.width or y + h >= img.height:
        raise PatchOutOfBoundsError(f"radius-{h} patch at {(x, y)} leaves the {img.width}x{img.height} image")
    return img.data[y - h:y + h + 1, x - h:x + h + 1].ravel().copy()


class FeatureSet:
    """A ``T x D`` sample matrix, stored either explicitly or as patch references.

    Joint patch features of large images do not fit in memory at the large
    radii (``h = 30`` gives ``D = 7442``), so sets built by
    :func:`joint_features` keep the two images and the pixel list and only
    materialise rows on request through :meth:`rows`.
    """

    def __init__(self, samples=None, *, coords=None, h=None, images=None):
        if (samples is None) == (images is None):
            raise ValueError("give exactly one of samples or images")
        self.h = h
        self.coords = None if coords is None else np.asarray(coords, dtype=np.intp)
        self._images = images
        if samples is not None:
            arr = np.array(samples, dtype=np.float64, copy=True)
            if arr.ndim == 1:
                arr = arr[:, None]
            if arr.ndim != 2:
                raise ValueError(f"samples must be 2-D, got shape {arr.shape}")
            arr.setflags(write=False)
            self._samples = arr
            self._T, self._D = arr.shape
        else:
            if self.coords is None or h is None:
                raise ValueError("patch-backed feature sets need coords and h")
            self._samples = None
            self._T = len(self.coords)
            self._D = len(images) * (2 * h + 1) ** 2
            self._windows = [sliding_window_view(im.data, (2 * h + 1, 2 * h + 1)) for im in images]
        if self._T < 1:
            raise EmptyRegionError("feature set needs at least one sample")

    @classmethod
    def from_array(cls, X) -> "FeatureSet":
        if isinstance(X, FeatureSet):
            return X
        return cls(X)

    @property
    def T(self) -> int:
        return self._T

    @property
    def D(self) -> int:
        return self._D

    @property
    def shape(self):
        return (self._T, self._D)

    def rows(self, idx) -> np.ndarray:
        """Materialise the rows ``idx`` as a fresh ``(len(idx), D)`` array."""
        idx = np.asarray(idx, dtype=np.intp)
        if self._samples is not None:
            return self._samples[idx]
        xs = self.coords[idx, 0] - self.h
        ys = self.coords[idx, 1] - self.h
        parts = [w[ys, xs].reshape(len(idx), -1) for w in self._windows]
        return np.concatenate(parts, axis=1)

    @property
    def samples(self) -> np.ndarray:
        """The full ``T x D`` matrix (materialised and cached on first access)."""
        if self._samples is None:
            arr = self.rows(np.arange(self._T))
            arr.setflags(write=False)
            self._samples = arr
        return self._samples

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            for start in range(0, self._T, 4096):
                for row in self.rows(np.arange(start, min(start + 4096, self._T))):
                    writer.writerow([repr(float(v)) for v in row])

    def __len__(self):
        return self._T

    def __repr__(self):
        return f"FeatureSet(T={self._T}, D={self._D}, h={self.h})"


def as_matrix(X) -> np.ndarray:
    """Accept a FeatureSet or array-like and return a 2-D float array."""
    if isinstance(X, FeatureSet):
        return X.samples
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    return arr


def region_pixels(region: PixelRect, max_samples=None, seed: int = 0) -> np.ndarray:
    """Pixels of ``region`` in row-major order, optionally a seeded uniform subset.

    The subset keeps row-major order so results do not depend on how the
    draw was realised.
    """
    coords = region.coords()
    if max_samples is not None and max_samples < len(coords):
        if max_samples < 1:
            raise ValueError("max_samples must be >= 1")
        pick = make_rng(seed).choice(len(coords), size=int(max_samples), replace=False)
        coords = coords[np.sort(pick)]
    return coords


def joint_features(ref: ImageGrid, test: ImageGrid, h: int, region: PixelRect,
                   max_samples=None, seed: int = 0) -> FeatureSet:
    """Concatenated ``[patch(ref, p); patch(test, p)]`` for every pixel ``p`` in ``region``."""
    if ref.data.shape != test.data.shape:
        raise DimensionMismatchError(
            f"reference is {ref.width}x{ref.height}, test is {test.width}x{test.height}"
        )
    if region.count < 1:
        raise EmptyRegionError("empty region")
    if region.x0 - h < 0 or region.y0 - h < 0 or region.x1 + h >= ref.width or region.y1 + h >= ref.height:
        raise PatchOutOfBoundsError(f"region {region} does not keep radius-{h} patches inside the image")
    coords = region_pixels(region, max_samples, seed)
    return FeatureSet(coords=coords, h=h, images=(ref, test))
