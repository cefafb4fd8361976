"""Limiting constants of the thermodynamic regime and their oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _kernels as K
from .errors import InsufficientSamples, InvalidArgument, UnsupportedDimension
from .geometry import ChartAtlas
from .quadrature import atlas_integral
from .rng import stream

MIN_MC_SAMPLES = 1000


def unit_ball_volume(m: int) -> float:
    return math.pi ** (m / 2) / math.gamma(m / 2 + 1)


OMEGA = {m: unit_ball_volume(m) for m in range(1, 11)}


@dataclass(frozen=True)
class LimitEstimate:
    value: float
    stderr: float
    samples: int
    method: str

    def __post_init__(self):
        if self.stderr < 0:
            raise InvalidArgument("stderr must be nonnegative")
        if self.method == "closed-form" and self.stderr != 0:
            raise InvalidArgument("closed-form estimates carry no error")


def _omega(m: int) -> float:
    return OMEGA[m] if m in OMEGA else unit_ball_volume(m)


def a_j_constant(N: int, j: int, r: float, mc_samples: int = 100_000, seed: int = 0, force_mc: bool = False) -> LimitEstimate:
    """A_j^{(N)}(r) = r^{Nj}/(j+1)! ∫ h_j(0, x) dx.

    For j = 1 the integral is the volume of B(0, 2), giving 2^{N−1} ω_N r^N
    exactly. Otherwise x_1..x_j are drawn uniformly from B(0, 2)^j and h_j is
    the indicator that {0, x_1, ..., x_j} fits in a ball of radius 1.
    """
    if N < 1 or j < 1:
        raise InvalidArgument("need N >= 1 and j >= 1")
    if not r > 0:
        raise InvalidArgument("r must be positive")
    scale = r ** (N * j) / math.factorial(j + 1)
    if j == 1 and not force_mc:
        return LimitEstimate(2 ** (N - 1) * _omega(N) * r**N, 0.0, 0, "closed-form")
    if mc_samples < MIN_MC_SAMPLES:
        raise InsufficientSamples(f"need at least {MIN_MC_SAMPLES} Monte Carlo samples")
    gen = stream(seed, N, j)
    hits = _mc_hits(gen, N, j, int(mc_samples))
    p = hits / mc_samples
    vol = (_omega(N) * 2.0**N) ** j
    se = math.sqrt(max(p * (1 - p), 0.0) / (mc_samples - 1)) if mc_samples > 1 else 0.0
    return LimitEstimate(scale * vol * p, scale * vol * se, int(mc_samples), "monte-carlo")


def _uniform_ball(gen: np.random.Generator, n: int, N: int, radius: float) -> np.ndarray:
    g = gen.standard_normal((n, N))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g * (radius * gen.random(n) ** (1.0 / N))[:, None]


def _mc_hits(gen, N: int, j: int, samples: int) -> int:
    hits = 0
    done = 0
    pts = np.zeros((j + 1, N))
    while done < samples:
        b = min(65536, samples - done)
        xs = _uniform_ball(gen, b * j, N, 2.0).reshape(b, j, N)
        for s in range(b):
            pts[1:] = xs[s]
            if K.miniball_sq(pts) <= 1.0:
                hits += 1
        done += b
    return hits


def s_hat_limit(N: int, j: int, lam: float, r: float, a_j: LimitEstimate | None = None, **mc) -> float:
    """Ŝ_j^{(N)}(λ, r) = A_j^{(N)}(r) λ^{j+1}."""
    if lam < 0:
        raise InvalidArgument("intensity must be nonnegative")
    if lam == 0:
        return 0.0
    if a_j is None:
        a_j = a_j_constant(N, j, r, **mc)
    return a_j.value * lam ** (j + 1)


def euler_limit(N: int, r: float) -> float:
    """Euler characteristic per point of the union of radius-r balls around a unit-intensity Poisson process."""
    if N == 2:
        a = math.pi * r * r
        return (1 - a) * math.exp(-a)
    if N == 3:
        return (math.pi**4 * r**6 / 6 - 4 * math.pi * r**3 + 1) * math.exp(-4 * math.pi * r**3 / 3)
    raise UnsupportedDimension(f"no closed form for N={N}")


def beta0_limit_1d(lam: float, r: float) -> float:
    """Components per unit length on the line: a gap longer than 2r ends a component."""
    if lam < 0 or r < 0:
        raise InvalidArgument("lambda and r must be nonnegative")
    return lam * math.exp(-2 * lam * r)


def scaling_map(lam: float, r: float, theta: float, m: int):
    """``(λθ, r θ^{−1/m}, 1/θ)``: β̂(λ, r) equals factor · β̂(λ', r')."""
    if not theta > 0:
        raise InvalidArgument("theta must be positive")
    return lam * theta, r * theta ** (-1.0 / m), 1.0 / theta


def decay_envelope(m: int, k: int, r: float, c: float = 1.0) -> float:
    if not 0 <= k <= m - 1:
        raise InvalidArgument("need 0 <= k <= m-1")
    x = _omega(m) * r
    return c * x ** (m * k) * math.exp(-(x**m))


def manifold_limit_integral(atlas: ChartAtlas, g: Callable[[np.ndarray], np.ndarray]) -> float:
    """Σ_i ∫_{C_i} g(κ(φ_i(x))) D_φi(x) dx by midpoint quadrature."""
    return atlas_integral(atlas, g)


def a2_plane_quadrature(r: float = 1.0, grid: int = 200) -> float:
    """A_2^{(2)}(r) by a grid over x_1 and the exact area of admissible x_2.

    For |x_1| = d <= 2 the x_2 with {0, x_1, x_2} inside some unit ball form the
    Minkowski sum of the lens B(0,1) ∩ B(x_1,1) with the unit disk, whose area
    is lens area + lens perimeter + π (Steiner). Independent of the miniball code.
    """
    h = 4.0 / grid
    axis = -2.0 + (np.arange(grid) + 0.5) * h
    X, Y = np.meshgrid(axis, axis, indexing="ij")
    d = np.hypot(X, Y)
    inside = d <= 2.0
    dd = np.clip(d, 0, 2.0)
    ang = np.arccos(dd / 2)
    lens_area = 2 * ang - (dd / 2) * np.sqrt(np.clip(4 - dd * dd, 0, None))
    lens_perim = 4 * ang
    area = np.where(inside, lens_area + lens_perim + math.pi, 0.0)
    return r**4 / 6.0 * float(area.sum()) * h * h
