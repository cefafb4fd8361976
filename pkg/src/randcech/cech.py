"""Čech complexes and filtrations built from smallest enclosing balls."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from . import _kernels as K
from .config import DEFAULT_SIMPLEX_CAP, SIMPLEX_CAP_ENV
from .errors import InvalidArgument, ResourceCapExceeded
from .geometry import MetricSpec


@dataclass(frozen=True, eq=False)
class SimplicialComplex:
    """Simplices graded by dimension, each with its filtration value.

    ``simplices[j]`` is an ``(S_j, j+1)`` integer array of strictly increasing
    vertex tuples in lexicographic order; ``values[j]`` holds the matching
    miniball radii. ``radius`` is the threshold the complex was built at.
    """

    n_vertices: int
    simplices: tuple
    values: tuple
    max_dim: int
    radius: Optional[float] = None

    @property
    def top_dim(self) -> int:
        """Largest dimension with at least one simplex (-1 when empty)."""
        for j in range(len(self.simplices) - 1, -1, -1):
            if len(self.simplices[j]):
                return j
        return -1

    def counts(self) -> np.ndarray:
        return np.array([len(s) for s in self.simplices], dtype=np.int64)

    def __len__(self) -> int:
        return int(self.counts().sum())

    def __iter__(self) -> Iterator[tuple]:
        for sims in self.simplices:
            for row in sims:
                yield tuple(int(v) for v in row)

    def simplex_set(self, dim: Optional[int] = None) -> set:
        dims = range(len(self.simplices)) if dim is None else [dim]
        return {tuple(int(v) for v in row) for j in dims for row in self.simplices[j]}

    def threshold(self, r: float) -> "SimplicialComplex":
        """Subcomplex of simplices with value ``<= r``."""
        sims, vals = [], []
        for S, V in zip(self.simplices, self.values):
            keep = V <= r
            sims.append(S[keep])
            vals.append(V[keep])
        return SimplicialComplex(self.n_vertices, tuple(sims), tuple(vals), self.max_dim, r)

    def skeleton(self, dim: int) -> "SimplicialComplex":
        dim = min(dim, self.max_dim)
        return SimplicialComplex(
            self.n_vertices, self.simplices[: dim + 1], self.values[: dim + 1], dim, self.radius
        )

    def filtration_order(self) -> list:
        """(value, dim, vertices) triples sorted in the filtration order contract."""
        items = []
        for j, (S, V) in enumerate(zip(self.simplices, self.values)):
            items.extend((float(v), j, tuple(int(x) for x in row)) for row, v in zip(S, V))
        items.sort()
        return items

    def check(self) -> None:
        """Assert face closure, strictly increasing tuples and monotone values."""
        for j, (S, V) in enumerate(zip(self.simplices, self.values)):
            if len(S) == 0:
                continue
            assert S.shape[1] == j + 1
            if j > 0:
                assert np.all(np.diff(S, axis=1) > 0), "vertex tuples must be strictly increasing"
            keys = [tuple(r) for r in S.tolist()]
            assert keys == sorted(set(keys)), "simplices must be unique and lexicographically sorted"
            if j == 0:
                continue
            faces = self.simplices[j - 1]
            idx = K.face_indices(faces, S)
            assert np.all(idx >= 0), f"missing faces of {j}-simplices"
            assert np.all(self.values[j - 1][idx] <= V[:, None]), "filtration not monotone"


def empty_complex(n_vertices: int, max_dim: int, radius: Optional[float] = None) -> SimplicialComplex:
    sims = [np.arange(n_vertices, dtype=np.int64).reshape(-1, 1)]
    vals = [np.zeros(n_vertices)]
    for j in range(1, max_dim + 1):
        sims.append(np.empty((0, j + 1), dtype=np.int64))
        vals.append(np.empty(0))
    return SimplicialComplex(n_vertices, tuple(sims), tuple(vals), max_dim, radius)


def simplex_cap() -> int:
    raw = os.environ.get(SIMPLEX_CAP_ENV)
    return int(float(raw)) if raw else DEFAULT_SIMPLEX_CAP


def miniball_radius(points) -> float:
    """Radius of the smallest Euclidean ball containing ``points`` (Welzl, move-to-front)."""
    X = np.ascontiguousarray(np.atleast_2d(np.asarray(points, dtype=float)))
    if X.size == 0 or X.shape[0] == 0:
        raise InvalidArgument("miniball of an empty set")
    if not np.all(np.isfinite(X)):
        raise InvalidArgument("non-finite coordinates")
    return math.sqrt(K.miniball_sq(X))


def _coords(cloud, metric: Optional[MetricSpec]) -> np.ndarray:
    pts = getattr(cloud, "points", cloud)
    pts = np.asarray(pts, dtype=float)
    if metric is None:
        if pts.ndim != 2:
            pts = pts.reshape(len(pts), -1)
        return np.ascontiguousarray(pts)
    if pts.size == 0:
        return np.empty((0, metric.ambient_dim))
    if pts.ndim == 1:
        pts = pts.reshape(-1, metric.dim)
    if pts.shape[1] != metric.dim:
        raise InvalidArgument(f"cloud dimension {pts.shape[1]} does not match metric dimension {metric.dim}")
    return np.ascontiguousarray(metric.working_coordinates(pts))


def _build(X: np.ndarray, r: float, max_dim: int, cap: Optional[int]) -> SimplicialComplex:
    n = len(X)
    if not r > 0 or not math.isfinite(r):
        raise InvalidArgument(f"radius must be positive and finite, got {r}")
    if max_dim < 0:
        raise InvalidArgument("max_dim must be nonnegative")
    cap = simplex_cap() if cap is None else cap
    if n > cap:
        raise ResourceCapExceeded(f"{n} vertices exceed the simplex cap {cap}")
    base = empty_complex(n, max_dim, r)
    if max_dim == 0 or n < 2:
        return base
    sims = [base.simplices[0]]
    vals = [base.values[0]]
    r2 = r * r
    # pair prefilter slightly loose; the miniball test decides inclusion
    cutoff2 = 4.0 * r2 * (1.0 + 1e-9)
    span = float(np.max(X.max(axis=0) - X.min(axis=0))) if n else 0.0
    cell = max(2.0 * r * (1.0 + 1e-9), span / 2.0 ** (60.0 / X.shape[1]))
    pairs = K.grid_pairs(X, cell, cutoff2)
    edges, evals = K.edge_values(X, pairs, r2)
    sims.append(edges)
    vals.append(evals)
    total = n + len(edges)
    if total > cap:
        raise ResourceCapExceeded(f"complex exceeds the simplex cap {cap} at dimension 1")
    if max_dim >= 2 and len(edges):
        both = np.concatenate([edges, edges[:, ::-1]])
        order = np.lexsort((both[:, 1], both[:, 0]))
        both = both[order]
        adj_ptr = np.searchsorted(both[:, 0], np.arange(n + 1)).astype(np.int64)
        adj = np.ascontiguousarray(both[:, 1])
        for j in range(2, max_dim + 1):
            prev = sims[j - 1]
            if len(prev) == 0:
                sims.append(np.empty((0, j + 1), dtype=np.int64))
                vals.append(np.empty(0))
                continue
            S, V, overflow = K.expand_level(X, prev, vals[j - 1], adj_ptr, adj, r2, cap - total)
            if overflow:
                raise ResourceCapExceeded(f"complex exceeds the simplex cap {cap} at dimension {j}")
            total += len(S)
            sims.append(S)
            vals.append(V)
    else:
        for j in range(2, max_dim + 1):
            sims.append(np.empty((0, j + 1), dtype=np.int64))
            vals.append(np.empty(0))
    return SimplicialComplex(n, tuple(sims), tuple(vals), max_dim, r)


def cech_complex(
    cloud, r: float, metric: Optional[MetricSpec] = None, max_dim: Optional[int] = None, cap: Optional[int] = None
) -> SimplicialComplex:
    """Čech complex of ``cloud`` at radius ``r``.

    A simplex is included iff its vertices' smallest enclosing ball in working
    coordinates has radius ``<= r``. ``max_dim`` defaults to the ambient
    dimension.
    """
    X = _coords(cloud, metric)
    if max_dim is None:
        max_dim = metric.ambient_dim if metric is not None else X.shape[1]
    return _build(X, float(r), int(max_dim), cap)


def cech_filtration(
    cloud, metric: Optional[MetricSpec] = None, max_dim: Optional[int] = None, r_max: float = 1.0, cap: Optional[int] = None
) -> SimplicialComplex:
    """Every simplex entering before ``r_max``, valued by its miniball radius.

    Thresholding at ``r <= r_max`` gives exactly ``cech_complex(cloud, r)``.
    """
    return cech_complex(cloud, r_max, metric, max_dim, cap)


def simplex_counts(complex_: SimplicialComplex) -> np.ndarray:
    """(S_0, ..., S_max_dim)."""
    return complex_.counts()


def brute_force_cech(points, r: float, max_dim: int) -> set:
    """All vertex subsets of size <= max_dim+1 with miniball radius <= r (exponential; tiny inputs only)."""
    from itertools import combinations

    X = np.asarray(points, dtype=float)
    out = set()
    for k in range(1, max_dim + 2):
        for sub in combinations(range(len(X)), k):
            if miniball_radius(X[list(sub)]) <= r:
                out.add(sub)
    return out

