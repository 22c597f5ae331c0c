"""Seed derivation and the pinned random generator.

Every random stream in the package comes from :func:`make_rng`, a numpy
``Generator`` over the counter-based Philox4x64 bit generator.  Child seeds
are derived by hashing a tuple of integer keys through ``SeedSequence``, so
a stream depends only on its keys and never on scheduling order.  Normal
variates use numpy's ziggurat sampler (``Generator.standard_normal``).
"""
from __future__ import annotations

import numpy as np


def derive_seed(*keys: int) -> int:
    """Return a 63-bit seed determined by the integer ``keys``."""
    ss = np.random.SeedSequence([int(k) & 0xFFFFFFFFFFFFFFFF for k in keys])
    hi, lo = ss.generate_state(2, dtype=np.uint32)
    return ((int(hi) << 32) | int(lo)) & 0x7FFFFFFFFFFFFFFF


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))
