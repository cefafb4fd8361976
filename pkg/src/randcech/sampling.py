"""Binomial, Poissonised, homogeneous and manifold point processes.

All samplers read candidates from a single seeded stream in fixed-size
blocks, so the i-th accepted point is the same no matter how many points are
requested. This is what couples a binomial cloud of n points to its
Poissonised twin with N_n ~ Poisson(n) points: one is a prefix of the other.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .config import TOL
from .errors import EnvelopeTooLoose, InvalidArgument, InvalidDensity
from .geometry import ChartAtlas, jacobian_density_batch
from .quadrature import midpoint_grid, piece_integrals
from .rng import poisson, stream

BLOCK = 4096
PROBE = 1 << 16

# sub-stream tags under a trial key
POINTS = 0
COUNT = 1


@dataclass(frozen=True, eq=False)
class DensitySpec:
    """A probability density on a box in R^N.

    ``kind == "box"`` is the uniform density on ``[lo, hi]``. ``kind ==
    "callable"`` evaluates ``f`` on ``(k, N)`` arrays, is supported inside the
    box and bounded above by ``sup``.
    """

    kind: str
    lo: np.ndarray
    hi: np.ndarray
    f: Optional[Callable[[np.ndarray], np.ndarray]] = None
    sup: Optional[float] = None
    label: str = ""

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=float))
        hi = np.atleast_1d(np.asarray(self.hi, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise InvalidDensity("support box bounds must be matching vectors")
        if np.any(hi <= lo) or not np.all(np.isfinite(lo)) or not np.all(np.isfinite(hi)):
            raise InvalidDensity("empty or unbounded support box")
        if self.kind == "callable":
            if self.f is None or self.sup is None or not self.sup > 0:
                raise InvalidDensity("callable densities need f and a positive sup bound")
        elif self.kind != "box":
            raise InvalidDensity(f"unknown density kind {self.kind!r}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def volume(self) -> float:
        return float(np.prod(self.hi - self.lo))

    def describe(self) -> dict:
        d = {"kind": self.kind, "lo": self.lo.tolist(), "hi": self.hi.tolist()}
        if self.kind == "callable":
            d["sup"] = self.sup
            d["label"] = self.label
        return d


def uniform_box(lo, hi) -> DensitySpec:
    return DensitySpec("box", lo, hi, label="uniform")


def callable_density(f, lo, hi, sup: float, label: str = "callable") -> DensitySpec:
    return DensitySpec("callable", lo, hi, f=f, sup=float(sup), label=label)


def spot_check_density(density: DensitySpec, n: int = 10_000, seed: int = 0) -> None:
    """Raise InvalidDensity if f is negative or exceeds its bound at random points."""
    if density.kind == "box":
        return
    gen = np.random.default_rng(seed)
    X = density.lo + gen.random((n, density.dim)) * (density.hi - density.lo)
    v = np.asarray(density.f(X), dtype=float)
    if np.any(v < 0):
        raise InvalidDensity("density takes negative values")
    if np.any(v > density.sup):
        raise InvalidDensity(f"density exceeds its sup bound {density.sup} (max seen {v.max():.6g})")


@dataclass(frozen=True, eq=False)
class PointCloud:
    points: np.ndarray
    seed: int
    process: str
    key: tuple = ()
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return len(self.points)


# ---------------------------------------------------------------------------
# i.i.d. streams
# ---------------------------------------------------------------------------


def _accepted_prefix(n: int, gen: np.random.Generator, draw_block, dim: int) -> np.ndarray:
    """Concatenate accepted candidates block by block until ``n`` are available."""
    if n == 0:
        return np.empty((0, dim))
    chunks = []
    have = 0
    drawn = 0
    while have < n:
        pts = draw_block(gen)
        drawn += BLOCK
        chunks.append(pts)
        have += len(pts)
        if drawn >= PROBE and have < TOL.min_acceptance * drawn:
            raise EnvelopeTooLoose(f"acceptance rate {have / drawn:.2e} below {TOL.min_acceptance:g}")
    return np.concatenate(chunks)[:n]


def _box_block(density: DensitySpec):
    span = density.hi - density.lo

    def draw(gen):
        X = density.lo + gen.random((BLOCK, density.dim)) * span
        if density.kind == "box":
            return X
        u = gen.random(BLOCK)
        f = np.asarray(density.f(X), dtype=float)
        if np.any(f > density.sup * (1 + 1e-12)) or np.any(f < 0):
            raise InvalidDensity("density value outside [0, sup] met during sampling")
        return X[u * density.sup <= f]

    return draw


def sample_binomial(density: DensitySpec, n: int, seed: int, key: tuple = ()) -> PointCloud:
    """The first ``n`` points of the i.i.d. stream for ``(seed, key)``."""
    if n < 0:
        raise InvalidArgument("n must be nonnegative")
    gen = stream(seed, *key, POINTS)
    pts = _accepted_prefix(int(n), gen, _box_block(density), density.dim)
    return PointCloud(pts, seed, "binomial", key, {"n": int(n), "density": density.describe()})


def poisson_count(n: float, seed: int, key: tuple = ()) -> int:
    return poisson(stream(seed, *key, COUNT), float(n))


def sample_poissonized(density: DensitySpec, n: int, seed: int, key: tuple = ()):
    """``(cloud, N_n)``: the first N_n ~ Poisson(n) points of the same stream as ``sample_binomial``."""
    if n < 1:
        raise InvalidArgument("n must be at least 1")
    count = poisson_count(n, seed, key)
    gen = stream(seed, *key, POINTS)
    pts = _accepted_prefix(count, gen, _box_block(density), density.dim)
    cloud = PointCloud(pts, seed, "poissonized", key, {"n": int(n), "n_used": count, "density": density.describe()})
    return cloud, count


def sample_homogeneous(lam: float, lo, hi, seed: int, key: tuple = ()) -> PointCloud:
    """Homogeneous Poisson process of intensity ``lam`` restricted to the box [lo, hi]."""
    if lam < 0 or not math.isfinite(lam):
        raise InvalidArgument("intensity must be finite and nonnegative")
    window = uniform_box(lo, hi)
    count = poisson(stream(seed, *key, COUNT), lam * window.volume)
    gen = stream(seed, *key, POINTS)
    pts = _accepted_prefix(count, gen, _box_block(window), window.dim)
    return PointCloud(pts, seed, "homogeneous", key, {"lambda": lam, "lo": window.lo.tolist(), "hi": window.hi.tolist()})


def centred_window(L: float, N: int) -> tuple[np.ndarray, np.ndarray]:
    """The cube (−L^{1/N}/2, L^{1/N}/2]^N of volume L."""
    half = L ** (1.0 / N) / 2.0
    return np.full(N, -half), np.full(N, half)


# ---------------------------------------------------------------------------
# manifolds
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class _ManifoldPlan:
    weights: np.ndarray
    envelopes: np.ndarray
    total: float


@functools.lru_cache(maxsize=32)
def _plan(atlas: ChartAtlas) -> _ManifoldPlan:
    masses = piece_integrals(atlas, lambda k: k)
    total = float(masses.sum())
    if abs(total - 1.0) > TOL.mass_tol:
        raise InvalidDensity(f"density integrates to {total:.6g} over the atlas, expected 1")
    envelopes = []
    for c in atlas.charts:
        sup = c.jac_sup
        if sup is None:
            X, _ = midpoint_grid(c, 64 if c.m <= 2 else 8)
            X = X[c.in_effective_domain(X)]
            sup = 1.1 * float(jacobian_density_batch(c, X).max())
        envelopes.append(atlas.kappa_sup * sup)
    return _ManifoldPlan(masses / total, np.array(envelopes), total)


def sample_manifold(atlas: ChartAtlas, n: int, seed: int, poissonized: bool = False, key: tuple = ()) -> PointCloud:
    """Points on the manifold with density κ, returned in ambient coordinates.

    A candidate picks chart piece i with probability equal to its mass, draws a
    uniform parameter in that chart's box and is accepted with probability
    κ(φ_i(x)) D_φi(x) / envelope_i.
    """
    if n < 0 or (poissonized and n < 1):
        raise InvalidArgument("invalid n")
    plan = _plan(atlas)
    count = poisson_count(n, seed, key) if poissonized else int(n)
    cum = np.cumsum(plan.weights)
    cum[-1] = 1.0
    m = atlas.m

    def draw(gen):
        pick = np.searchsorted(cum, gen.random(BLOCK), side="right")
        U = gen.random((BLOCK, m))
        acc = gen.random(BLOCK)
        out = []
        for i, c in enumerate(atlas.charts):
            sel = np.flatnonzero(pick == i)
            if len(sel) == 0:
                continue
            X = c.lo + U[sel] * (c.hi - c.lo)
            inside = c.in_effective_domain(X)
            Z = c.map(X)
            w = np.zeros(len(sel))
            w[inside] = np.asarray(atlas.kappa(Z[inside]), dtype=float) * jacobian_density_batch(c, X[inside])
            ok = acc[sel] * plan.envelopes[i] <= w
            out.append((sel[ok], Z[ok]))
        if not out:
            return np.empty((0, atlas.N))
        idx = np.concatenate([o[0] for o in out])
        Z = np.concatenate([o[1] for o in out])
        return Z[np.argsort(idx, kind="stable")]

    pts = _accepted_prefix(count, stream(seed, *key, POINTS), draw, atlas.N)
    return PointCloud(
        pts,
        seed,
        "manifold",
        key,
        {"n": int(n), "n_used": count, "poissonized": poissonized, "atlas": atlas.config or {"name": atlas.name}},
    )
