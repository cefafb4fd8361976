"""Betti numbers, Euler characteristics and persistence over ℤ/2."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels as K
from .cech import SimplicialComplex
from .errors import InsufficientComplex, InvalidArgument


@dataclass(frozen=True)
class BettiVector:
    values: tuple
    field: str = "Z/2"

    def __getitem__(self, k):
        return self.values[k]

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def tolist(self) -> list:
        return list(self.values)


@dataclass(frozen=True, eq=False)
class Persistence:
    """Persistence pairing of a filtered complex.

    ``dims``/``values`` describe every simplex in filtration order;
    ``partner[i]`` is the index of the simplex paired with ``i`` (-1 when
    unpaired) and ``is_birth[i]`` tells whether ``i`` creates a class.
    """

    dims: np.ndarray
    values: np.ndarray
    partner: np.ndarray
    is_birth: np.ndarray
    max_dim: int

    def intervals(self, k: int) -> np.ndarray:
        """``(birth, death)`` rows for dimension ``k``; death is +inf for unpaired classes."""
        sel = np.flatnonzero(self.is_birth & (self.dims == k))
        deaths = np.full(len(sel), math.inf)
        paired = self.partner[sel] >= 0
        deaths[paired] = self.values[self.partner[sel][paired]]
        return np.column_stack([self.values[sel], deaths]) if len(sel) else np.empty((0, 2))

    def betti_at(self, k: int, t: float) -> int:
        iv = self.intervals(k)
        return int(np.count_nonzero((iv[:, 0] <= t) & (iv[:, 1] > t)))

    def persistent_betti(self, k: int, s: float, t: float) -> int:
        iv = self.intervals(k)
        return int(np.count_nonzero((iv[:, 0] <= s) & (iv[:, 1] > t)))


def boundary_matrix(cx: SimplicialComplex):
    """Sparse boundary matrix in the filtration order (value, dim, lexicographic vertices).

    Returns ``(col_ptr, col_idx, dims, values)``; each column lists the
    filtration positions of its facets in ascending order.
    """
    counts = cx.counts()
    total = int(counts.sum())
    dims = np.concatenate([np.full(c, j, dtype=np.int64) for j, c in enumerate(counts)]) if total else np.empty(0, np.int64)
    local = np.concatenate([np.arange(c, dtype=np.int64) for c in counts]) if total else np.empty(0, np.int64)
    vals = np.concatenate(cx.values) if total else np.empty(0)
    order = np.lexsort((local, dims, vals))
    pos = np.empty(total, dtype=np.int64)
    pos[order] = np.arange(total)
    offsets = np.concatenate([[0], np.cumsum(counts)])
    nnz = np.zeros(total, dtype=np.int64)
    facet_rows = [None] * len(counts)
    for j in range(1, len(counts)):
        if counts[j] == 0:
            continue
        idx = K.face_indices(cx.simplices[j - 1], cx.simplices[j])
        if np.any(idx < 0):
            raise InvalidArgument(f"complex is not closed under faces in dimension {j}")
        rows = np.sort(pos[idx + offsets[j - 1]], axis=1)
        facet_rows[j] = rows
        nnz[pos[offsets[j] : offsets[j + 1]]] = j + 1
    col_ptr = np.concatenate([[0], np.cumsum(nnz)]).astype(np.int64)
    col_idx = np.empty(int(col_ptr[-1]), dtype=np.int64)
    for j in range(1, len(counts)):
        if facet_rows[j] is None:
            continue
        cols = pos[offsets[j] : offsets[j + 1]]
        starts = col_ptr[cols]
        for t in range(j + 1):
            col_idx[starts + t] = facet_rows[j][:, t]
    return col_ptr, col_idx, dims[order], vals[order]


def persistence(cx: SimplicialComplex, clearing: bool = True) -> Persistence:
    col_ptr, col_idx, dims, vals = boundary_matrix(cx)
    max_dim = len(cx.simplices) - 1
    pivot_col = K.reduce_columns(col_ptr, col_idx, dims, max_dim, clearing)
    partner = pivot_col.copy()
    deaths = pivot_col[pivot_col >= 0]
    partner[deaths] = np.flatnonzero(pivot_col >= 0)
    is_birth = np.ones(len(dims), dtype=bool)
    is_birth[deaths] = False
    return Persistence(dims, vals, partner, is_birth, max_dim)


def _require_dims(cx: SimplicialComplex, k_max: int) -> None:
    if k_max + 1 > cx.max_dim and len(cx.simplices[cx.max_dim]) > 0:
        raise InsufficientComplex(
            f"β_{k_max} needs simplices up to dimension {k_max + 1}; complex was built to {cx.max_dim}"
        )


def betti_numbers(cx: SimplicialComplex, k_max: Optional[int] = None, pers: Optional[Persistence] = None) -> BettiVector:
    """β_0..β_kmax of the whole complex over ℤ/2."""
    if k_max is None:
        k_max = max(cx.max_dim - 1, 0)
    if k_max < 0:
        raise InvalidArgument("k_max must be nonnegative")
    _require_dims(cx, k_max)
    if pers is None:
        pers = persistence(cx)
    out = []
    for k in range(k_max + 1):
        if k > pers.max_dim:
            out.append(0)
        else:
            out.append(int(np.count_nonzero(pers.is_birth & (pers.dims == k) & (pers.partner < 0))))
    return BettiVector(tuple(out))


def connected_components(cx: SimplicialComplex) -> int:
    """Number of components by union-find over the edges."""
    edges = cx.simplices[1] if cx.max_dim >= 1 else np.empty((0, 2), dtype=np.int64)
    return int(K.union_find_components(cx.n_vertices, np.ascontiguousarray(edges)))


def euler_characteristic(cx: SimplicialComplex) -> int:
    c = cx.counts()
    return int(sum((-1) ** j * int(s) for j, s in enumerate(c)))


def persistent_betti(filtration: SimplicialComplex, k: int, s: float, t: float, pers: Optional[Persistence] = None) -> int:
    """Rank of H_k(K_s) → H_k(K_t)."""
    if s > t:
        raise InvalidArgument("persistent Betti numbers need s <= t")
    if filtration.radius is not None and t > filtration.radius:
        raise InvalidArgument(f"t={t} is beyond the filtration's r_max={filtration.radius}")
    _require_dims(filtration, k)
    if pers is None:
        pers = persistence(filtration)
    return pers.persistent_betti(k, s, t)


def betti_diff_bound_check(sub: SimplicialComplex, sup: SimplicialComplex, k: int):
    """|β_k(sup) − β_k(sub)| against Σ_{j=k}^{k+1} (S_j(sup) − S_j(sub)).

    Returns ``(lhs, rhs, holds)``.
    """
    if sub.n_vertices > sup.n_vertices:
        raise InvalidArgument("sub has more vertices than super")
    for j in range(len(sub.simplices)):
        if len(sub.simplices[j]) == 0:
            continue
        if j >= len(sup.simplices) or not sub.simplex_set(j) <= sup.simplex_set(j):
            raise InvalidArgument(f"sub is not contained in super (dimension {j})")
    b_sub = betti_numbers(sub, k)[k]
    b_sup = betti_numbers(sup, k)[k]
    cs = sub.counts()
    cS = sup.counts()

    def count(c, j):
        return int(c[j]) if j < len(c) else 0

    lhs = abs(b_sup - b_sub)
    rhs = sum(count(cS, j) - count(cs, j) for j in (k, k + 1))
    return lhs, rhs, lhs <= rhs
