"""Metrics, charts and atlases.

Every metric the package supports reduces to a Euclidean ball test:
weighted norms by multiplying with their matrix (``whiten``) and
chart-induced metrics by mapping parameters into the ambient space
(``embed``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .config import TOL
from .errors import (
    DegenerateChartError,
    DegenerateInputError,
    DomainError,
    InvalidArgument,
    UnsupportedError,
)

ArrayFn = Callable[[np.ndarray], np.ndarray]


# ---------------------------------------------------------------------------
# charts
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Chart:
    """A parametrisation ``phi`` of a manifold patch from a box in R^m to R^N.

    ``phi`` and ``jac`` act on a single parameter vector; ``phi_batch`` (optional)
    maps a ``(k, m)`` array to ``(k, N)`` in one call. ``mask`` restricts the box
    to the effective domain used for sampling and integration. ``jac_sup`` is an
    upper bound for the Jacobian density on that domain, used as a rejection
    envelope; it is estimated from a grid when absent.
    """

    name: str
    m: int
    N: int
    lo: np.ndarray
    hi: np.ndarray
    phi: ArrayFn
    jac: Optional[ArrayFn] = None
    phi_batch: Optional[ArrayFn] = None
    mask: Optional[Callable[[np.ndarray], np.ndarray]] = None
    jac_sup: Optional[float] = None
    density: Optional[ArrayFn] = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float).reshape(self.m)
        hi = np.asarray(self.hi, dtype=float).reshape(self.m)
        if np.any(hi <= lo):
            raise InvalidArgument(f"chart {self.name!r}: empty parameter box")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def check_domain(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.shape[-1] != self.m:
            raise InvalidArgument(f"expected parameter dimension {self.m}, got {x.shape[-1]}")
        if np.any(x < self.lo) or np.any(x > self.hi) or not np.all(np.isfinite(x)):
            raise DomainError(f"parameter {x} outside chart domain [{self.lo}, {self.hi}]")
        return x

    def map(self, X: np.ndarray) -> np.ndarray:
        """Vectorised ``phi`` over the rows of ``X`` (no domain check)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.phi_batch is not None:
            return np.asarray(self.phi_batch(X), dtype=float).reshape(len(X), self.N)
        return np.array([self.phi(x) for x in X], dtype=float).reshape(len(X), self.N)

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        """N×m Jacobian at ``x``; central differences when no analytic form is known."""
        x = np.asarray(x, dtype=float)
        if self.jac is not None:
            return np.asarray(self.jac(x), dtype=float).reshape(self.N, self.m)
        h = TOL.fd_step
        J = np.empty((self.N, self.m))
        for a in range(self.m):
            e = np.zeros(self.m)
            e[a] = h
            J[:, a] = (np.asarray(self.phi(x + e)) - np.asarray(self.phi(x - e))) / (2 * h)
        return J

    def in_effective_domain(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(X)
        inside = np.all((X >= self.lo) & (X <= self.hi), axis=1)
        if self.mask is not None:
            inside &= np.asarray(self.mask(X), dtype=bool)
        return inside


def embed(chart: Chart, x) -> np.ndarray:
    """phi(x) for a parameter point inside the chart domain."""
    x = chart.check_domain(x)
    return np.asarray(chart.phi(x), dtype=float)


def jacobian_density(chart: Chart, x) -> float:
    """sqrt(det(J^T J)) at ``x``: the chart's local volume distortion."""
    x = chart.check_domain(x)
    J = chart.jacobian(x)
    sv = np.linalg.svd(J, compute_uv=False)
    if sv.min() < TOL.rank_cutoff:
        raise DegenerateChartError(
            f"chart {chart.name!r} has rank-deficient Jacobian at {x} (σ_min={sv.min():.3g})"
        )
    return float(np.sqrt(np.linalg.det(J.T @ J)))


def jacobian_density_batch(chart: Chart, X: np.ndarray) -> np.ndarray:
    """Jacobian densities over the rows of ``X``, skipping domain and rank checks."""
    X = np.atleast_2d(X)
    if chart.density is not None:
        return np.asarray(chart.density(X), dtype=float)
    out = np.empty(len(X))
    for i, x in enumerate(X):
        J = chart.jacobian(x)
        out[i] = math.sqrt(max(np.linalg.det(J.T @ J), 0.0))
    return out


# built-in charts -----------------------------------------------------------


def circle_chart(radius: float = 1.0) -> Chart:
    """t ↦ (R cos t, R sin t) on [0, 2π)."""
    R = float(radius)

    def phi(x):
        return np.array([R * math.cos(x[0]), R * math.sin(x[0])])

    def jac(x):
        return np.array([[-R * math.sin(x[0])], [R * math.cos(x[0])]])

    def batch(X):
        return np.column_stack([R * np.cos(X[:, 0]), R * np.sin(X[:, 0])])

    return Chart(
        name="circle",
        m=1,
        N=2,
        lo=[0.0],
        hi=[2 * math.pi],
        phi=phi,
        jac=jac,
        phi_batch=batch,
        mask=lambda X: X[:, 0] < 2 * math.pi,
        jac_sup=R,
        density=lambda X: np.full(len(X), R),
        params={"radius": R},
    )


def torus_chart(R: float = 2.0, r: float = 1.0) -> Chart:
    """(u, v) ↦ ((R + r cos v) cos u, (R + r cos v) sin u, r sin v) on [0, 2π)²."""
    R = float(R)
    r = float(r)
    if not R > r > 0:
        raise InvalidArgument("torus needs R > r > 0")

    def phi(x):
        u, v = x
        w = R + r * math.cos(v)
        return np.array([w * math.cos(u), w * math.sin(u), r * math.sin(v)])

    def jac(x):
        u, v = x
        w = R + r * math.cos(v)
        return np.array(
            [
                [-w * math.sin(u), -r * math.sin(v) * math.cos(u)],
                [w * math.cos(u), -r * math.sin(v) * math.sin(u)],
                [0.0, r * math.cos(v)],
            ]
        )

    def batch(X):
        u, v = X[:, 0], X[:, 1]
        w = R + r * np.cos(v)
        return np.column_stack([w * np.cos(u), w * np.sin(u), r * np.sin(v)])

    two_pi = 2 * math.pi
    return Chart(
        name="torus",
        m=2,
        N=3,
        lo=[0.0, 0.0],
        hi=[two_pi, two_pi],
        phi=phi,
        jac=jac,
        phi_batch=batch,
        mask=lambda X: (X[:, 0] < two_pi) & (X[:, 1] < two_pi),
        jac_sup=r * (R + r),
        density=lambda X: r * (R + r * np.cos(X[:, 1])),
        params={"R": R, "r": r},
    )


def sphere_chart(radius: float = 1.0) -> Chart:
    """Spherical coordinates (θ, ϕ) ↦ R(sin θ cos ϕ, sin θ sin ϕ, cos θ) on [0, π]×[0, 2π)."""
    Rs = float(radius)

    def phi(x):
        th, ph = x
        return Rs * np.array([math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)])

    def jac(x):
        th, ph = x
        return Rs * np.array(
            [
                [math.cos(th) * math.cos(ph), -math.sin(th) * math.sin(ph)],
                [math.cos(th) * math.sin(ph), math.sin(th) * math.cos(ph)],
                [-math.sin(th), 0.0],
            ]
        )

    def batch(X):
        th, ph = X[:, 0], X[:, 1]
        return Rs * np.column_stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])

    return Chart(
        name="sphere",
        m=2,
        N=3,
        lo=[0.0, 0.0],
        hi=[math.pi, 2 * math.pi],
        phi=phi,
        jac=jac,
        phi_batch=batch,
        mask=lambda X: X[:, 1] < 2 * math.pi,
        jac_sup=Rs * Rs,
        density=lambda X: Rs * Rs * np.abs(np.sin(X[:, 0])),
        params={"radius": Rs},
    )


def hemisphere_chart(upper: bool = True) -> Chart:
    """Graph chart (x, y) ↦ (x, y, ±sqrt(1 - x² - y²)) over the open unit disk.

    The Jacobian density 1/sqrt(1 - x² - y²) is unbounded at the rim, so this
    chart has no rejection envelope and is meant for geometry, not sampling.
    """
    sign = 1.0 if upper else -1.0

    def height(x):
        s = 1.0 - x[0] ** 2 - x[1] ** 2
        if s <= 0:
            raise DomainError(f"{x} is not inside the open unit disk")
        return math.sqrt(s)

    def phi(x):
        return np.array([x[0], x[1], sign * height(x)])

    def jac(x):
        h = height(x)
        return np.array([[1.0, 0.0], [0.0, 1.0], [-sign * x[0] / h, -sign * x[1] / h]])

    def batch(X):
        return np.column_stack([X[:, 0], X[:, 1], sign * np.sqrt(np.clip(1 - X[:, 0] ** 2 - X[:, 1] ** 2, 0, None))])

    return Chart(
        name="upper-hemisphere" if upper else "lower-hemisphere",
        m=2,
        N=3,
        lo=[-1.0, -1.0],
        hi=[1.0, 1.0],
        phi=phi,
        jac=jac,
        phi_batch=batch,
        mask=lambda X: X[:, 0] ** 2 + X[:, 1] ** 2 < 1.0,
        params={"upper": upper},
    )


def linear_chart(A, lo, hi) -> Chart:
    """x ↦ A x for an N×m matrix A."""
    A = np.asarray(A, dtype=float)
    N, m = A.shape
    dens = float(np.sqrt(np.linalg.det(A.T @ A)))
    return Chart(
        name="linear",
        m=m,
        N=N,
        lo=lo,
        hi=hi,
        phi=lambda x: A @ x,
        jac=lambda x: A,
        phi_batch=lambda X: X @ A.T,
        jac_sup=dens,
        density=lambda X: np.full(len(X), dens),
        params={"A": A.tolist()},
    )


# ---------------------------------------------------------------------------
# atlases
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ChartAtlas:
    """Charts whose effective domains tile a manifold, plus a density κ on it.

    ``kappa`` maps an ``(k, N)`` array of manifold points to density values;
    ``kappa_sup`` bounds it from above (needed for rejection sampling).
    """

    charts: tuple
    kappa: Callable[[np.ndarray], np.ndarray]
    kappa_sup: float
    name: str = "atlas"
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.charts:
            raise InvalidArgument("atlas needs at least one chart")
        object.__setattr__(self, "charts", tuple(self.charts))
        dims = {(c.m, c.N) for c in self.charts}
        if len(dims) != 1:
            raise InvalidArgument("all charts in an atlas must share (m, N)")

    @property
    def m(self) -> int:
        return self.charts[0].m

    @property
    def N(self) -> int:
        return self.charts[0].N


def uniform_density(total_volume: float) -> Callable[[np.ndarray], np.ndarray]:
    c = 1.0 / total_volume
    return lambda Z: np.full(len(np.atleast_2d(Z)), c)


def circle_atlas(radius: float = 1.0) -> ChartAtlas:
    vol = 2 * math.pi * radius
    return ChartAtlas(
        (circle_chart(radius),), uniform_density(vol), 1.0 / vol, name="circle",
        config={"kind": "circle", "radius": radius, "density": "uniform"},
    )


def torus_atlas(R: float = 2.0, r: float = 1.0) -> ChartAtlas:
    vol = 4 * math.pi**2 * R * r
    return ChartAtlas(
        (torus_chart(R, r),), uniform_density(vol), 1.0 / vol, name="torus",
        config={"kind": "torus", "R": R, "r": r, "density": "uniform"},
    )


def sphere_atlas(radius: float = 1.0) -> ChartAtlas:
    vol = 4 * math.pi * radius**2
    return ChartAtlas(
        (sphere_chart(radius),), uniform_density(vol), 1.0 / vol, name="sphere",
        config={"kind": "sphere", "radius": radius, "density": "uniform"},
    )


_BUILTIN_ATLASES = {"circle": circle_atlas, "torus": torus_atlas, "sphere": sphere_atlas}


def atlas_from_config(cfg: dict) -> ChartAtlas:
    """Build an atlas from a JSON-style description.

    ``{"kind": "torus", "R": 2, "r": 1, "density": "uniform"}`` or an explicit
    ``{"charts": [{"kind": "linear", "A": [[1],[0]], "lo": [0], "hi": [1]}], "density": "uniform"}``.
    Only the ``uniform`` density identifier is understood.
    """
    density = cfg.get("density", "uniform")
    if density != "uniform":
        raise UnsupportedError(f"unknown density identifier {density!r}")
    kind = cfg.get("kind")
    if kind in _BUILTIN_ATLASES:
        kwargs = {k: v for k, v in cfg.items() if k not in ("kind", "density")}
        return _BUILTIN_ATLASES[kind](**kwargs)
    if "charts" not in cfg:
        raise InvalidArgument(f"unknown atlas kind {kind!r}")
    charts = []
    for c in cfg["charts"]:
        ck = c.get("kind")
        if ck == "linear":
            charts.append(linear_chart(c["A"], c["lo"], c["hi"]))
        elif ck == "circle":
            charts.append(circle_chart(c.get("radius", 1.0)))
        elif ck == "torus":
            charts.append(torus_chart(c.get("R", 2.0), c.get("r", 1.0)))
        elif ck == "sphere":
            charts.append(sphere_chart(c.get("radius", 1.0)))
        else:
            raise InvalidArgument(f"unknown chart kind {ck!r}")
    from .quadrature import atlas_integral  # local import: quadrature depends on this module

    probe = ChartAtlas(tuple(charts), lambda Z: np.ones(len(np.atleast_2d(Z))), 1.0)
    vol = atlas_integral(probe, lambda k: np.ones_like(k))
    return ChartAtlas(tuple(charts), uniform_density(vol), 1.0 / vol, name="custom", config=dict(cfg))


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MetricSpec:
    """One of three metric variants.

    ``euclidean``: ‖y − z‖. ``weighted``: ‖B(y − z)‖ for a symmetric positive
    definite B. ``chart``: ‖φ(y) − φ(z)‖ on chart parameters.
    """

    kind: str
    dim: int
    B: Optional[np.ndarray] = None
    chart: Optional[Chart] = None

    def __post_init__(self):
        if self.kind not in ("euclidean", "weighted", "chart"):
            raise InvalidArgument(f"unknown metric kind {self.kind!r}")
        if self.dim < 1:
            raise InvalidArgument("metric dimension must be positive")
        if self.kind == "weighted":
            B = np.asarray(self.B, dtype=float)
            if B.shape != (self.dim, self.dim):
                raise InvalidArgument(f"B must be {self.dim}×{self.dim}")
            if not np.allclose(B, B.T, rtol=0, atol=1e-12 * max(1.0, np.abs(B).max())):
                raise InvalidArgument("B must be symmetric")
            try:
                np.linalg.cholesky(B)
            except np.linalg.LinAlgError:
                raise InvalidArgument("B must be positive definite") from None
            object.__setattr__(self, "B", B)
        if self.kind == "chart":
            if self.chart is None or self.chart.m != self.dim:
                raise InvalidArgument("chart metric needs a chart with matching parameter dimension")

    @property
    def ambient_dim(self) -> int:
        """Dimension of the coordinates in which ball tests run."""
        return self.chart.N if self.kind == "chart" else self.dim

    def working_coordinates(self, points: np.ndarray) -> np.ndarray:
        """Coordinates in which this metric is Euclidean."""
        pts = np.asarray(points, dtype=float).reshape(-1, self.dim)
        if self.kind == "euclidean":
            return pts
        if self.kind == "weighted":
            return whiten(self, pts)
        if len(pts):
            self.chart.check_domain(pts)
        return self.chart.map(pts) if len(pts) else np.empty((0, self.chart.N))


def euclidean(dim: int) -> MetricSpec:
    return MetricSpec("euclidean", dim)


def weighted_norm(B) -> MetricSpec:
    B = np.asarray(B, dtype=float)
    return MetricSpec("weighted", B.shape[0], B=B)


def chart_metric(chart: Chart) -> MetricSpec:
    return MetricSpec("chart", chart.m, chart=chart)


def _as_point(metric: MetricSpec, p) -> np.ndarray:
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.shape[0] != metric.dim:
        raise InvalidArgument(f"point has dimension {p.shape[0]}, metric expects {metric.dim}")
    return p


def distance(metric: MetricSpec, y, z) -> float:
    y = _as_point(metric, y)
    z = _as_point(metric, z)
    if metric.kind == "euclidean":
        return float(np.linalg.norm(y - z))
    if metric.kind == "weighted":
        return float(np.linalg.norm(metric.B @ (y - z)))
    return float(np.linalg.norm(embed(metric.chart, y) - embed(metric.chart, z)))


def whiten(metric: MetricSpec, points) -> np.ndarray:
    """Images B·p, so Euclidean distances between images equal metric distances."""
    if metric.kind == "chart":
        raise UnsupportedError("chart-induced metrics cannot be whitened; use embed")
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, metric.dim) if pts.size else np.empty((0, metric.dim))
    if pts.shape[1] != metric.dim:
        raise InvalidArgument(f"points have dimension {pts.shape[1]}, metric expects {metric.dim}")
    if metric.kind == "euclidean":
        return pts.copy()
    return pts @ metric.B.T


def metric_ratio_probe(metric: MetricSpec, points, pair_budget: int = 10_000, seed: int = 0):
    """Min and max of ρ(y, z)/‖y − z‖ over sampled distinct pairs.

    All pairs are used when there are no more than ``pair_budget`` of them.
    """
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    if n < 2:
        raise DegenerateInputError("need at least two points")
    total = n * (n - 1) // 2
    if total <= pair_budget:
        I, J = np.triu_indices(n, 1)
    else:
        rng = np.random.default_rng(seed)
        I = rng.integers(0, n, pair_budget)
        J = rng.integers(0, n, pair_budget)
    base = np.linalg.norm(pts[I] - pts[J], axis=1)
    keep = base > 0
    if not np.any(keep):
        raise DegenerateInputError("all probed pairs coincide")
    I, J, base = I[keep], J[keep], base[keep]
    W = metric.working_coordinates(pts)
    ratios = np.linalg.norm(W[I] - W[J], axis=1) / base
    return float(ratios.min()), float(ratios.max())


def check_rank(chart: Chart, probes: Sequence[np.ndarray]) -> float:
    """Smallest singular value of the Jacobian over ``probes``; raises if degenerate."""
    smallest = math.inf
    for x in probes:
        sv = np.linalg.svd(chart.jacobian(np.asarray(x, dtype=float)), compute_uv=False)
        smallest = min(smallest, float(sv.min()))
    if smallest < TOL.rank_cutoff:
        raise DegenerateChartError(f"chart {chart.name!r} is rank deficient (σ_min={smallest:.3g})")
    return smallest
