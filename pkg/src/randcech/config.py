"""Numerical tolerances and defaults shared across the package."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # smallest singular value below which a chart Jacobian is rank deficient
    rank_cutoff: float = 1e-8
    # metric axiom checks (symmetry, triangle inequality, whitening isometry)
    metric_check: float = 1e-9
    # central finite-difference step for user charts without analytic Jacobians
    fd_step: float = 1e-6
    # normalisation tolerance for atlas densities
    mass_tol: float = 1e-3
    # rejection samplers give up below this acceptance rate
    min_acceptance: float = 1e-4
    # relative slack used when testing whether a point lies inside a ball in Welzl
    miniball_eps: float = 1e-12
    # midpoint quadrature grid per axis and the coarse grid used for the convergence check
    quad_grid: int = 256
    quad_grid_coarse: int = 128
    quad_rel_tol: float = 1e-3


TOL = Tolerances()

# default cap on the number of simplices in a single complex
DEFAULT_SIMPLEX_CAP = 20_000_000
SIMPLEX_CAP_ENV = "RANDCECH_SIMPLEX_CAP"
