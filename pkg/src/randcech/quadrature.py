"""Midpoint quadrature over chart domains."""

from __future__ import annotations

import warnings
from typing import Callable

import numpy as np

from .config import TOL
from .errors import ResolutionWarning
from .geometry import Chart, ChartAtlas, jacobian_density_batch


def midpoint_grid(chart: Chart, per_axis: int) -> tuple[np.ndarray, float]:
    """Cell midpoints of a ``per_axis``^m grid over the chart box and the cell volume."""
    axes = [lo + (np.arange(per_axis) + 0.5) * (hi - lo) / per_axis for lo, hi in zip(chart.lo, chart.hi)]
    mesh = np.meshgrid(*axes, indexing="ij")
    X = np.column_stack([g.ravel() for g in mesh])
    cell = float(np.prod((chart.hi - chart.lo) / per_axis))
    return X, cell


def chart_integral(chart: Chart, kappa, g: Callable[[np.ndarray], np.ndarray], per_axis: int) -> float:
    """∫ over the effective domain of g(κ(φ(x))) D_φ(x) dx."""
    X, cell = midpoint_grid(chart, per_axis)
    X = X[chart.in_effective_domain(X)]
    if len(X) == 0:
        return 0.0
    k = np.asarray(kappa(chart.map(X)), dtype=float)
    return float(np.sum(np.asarray(g(k), dtype=float) * jacobian_density_batch(chart, X)) * cell)


def piece_integrals(atlas: ChartAtlas, g, per_axis: int = TOL.quad_grid) -> np.ndarray:
    return np.array([chart_integral(c, atlas.kappa, g, per_axis) for c in atlas.charts])


def atlas_integral(atlas: ChartAtlas, g, per_axis: int = TOL.quad_grid, check: bool = True) -> float:
    """Σ_i ∫_{C_i} g(κ(φ_i(x))) D_φi(x) dx, warning when coarse and fine grids disagree."""
    fine = float(piece_integrals(atlas, g, per_axis).sum())
    if check:
        coarse = float(piece_integrals(atlas, g, TOL.quad_grid_coarse).sum())
        if abs(fine - coarse) > TOL.quad_rel_tol * max(abs(fine), 1e-300):
            warnings.warn(
                f"quadrature changed by {abs(fine - coarse):.3g} between grids {TOL.quad_grid_coarse} and {per_axis}",
                ResolutionWarning,
                stacklevel=2,
            )
    return fine
