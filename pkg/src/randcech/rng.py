"""Seeded random streams and a pinned Poisson sampler.

Streams come from numpy's counter-based Philox generator keyed by
``SeedSequence(master_seed, spawn_key=key)``; any tuple of non-negative
integers names an independent stream, so a trial's draws never depend on
which worker ran it or in what order.
"""

from __future__ import annotations

import math

import numpy as np

POISSON_INVERSION_LIMIT = 30.0


def stream(master_seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(master_seed) & (2**64 - 1), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def poisson(gen: np.random.Generator, mean: float) -> int:
    """One Poisson(mean) variate.

    Sequential-search inversion below a mean of 30, otherwise Hörmann's PTRS
    transformed rejection. Only ``gen.random()`` is consumed, so a seed gives
    the same count wherever this runs.
    """
    if mean < 0 or not math.isfinite(mean):
        raise ValueError(f"Poisson mean must be finite and nonnegative, got {mean}")
    if mean == 0:
        return 0
    if mean < POISSON_INVERSION_LIMIT:
        u = gen.random()
        k = 0
        p = math.exp(-mean)
        cdf = p
        while u > cdf:
            k += 1
            p *= mean / k
            if p == 0.0:
                break
            cdf += p
        return k
    return _ptrs(gen, mean)


def _ptrs(gen: np.random.Generator, lam: float) -> int:
    slam = math.sqrt(lam)
    loglam = math.log(lam)
    b = 0.931 + 2.53 * slam
    a = -0.059 + 0.02483 * b
    inv_alpha = 1.1239 + 1.1328 / (b - 3.4)
    vr = 0.9277 - 3.6224 / (b - 2.0)
    while True:
        U = gen.random() - 0.5
        V = gen.random()
        us = 0.5 - abs(U)
        k = math.floor((2.0 * a / us + b) * U + lam + 0.43)
        if us >= 0.07 and V <= vr:
            return int(k)
        if k < 0 or (us < 0.013 and V > us):
            continue
        if math.log(V) + math.log(inv_alpha) - math.log(a / (us * us) + b) <= -lam + k * loglam - math.lgamma(k + 1):
            return int(k)
