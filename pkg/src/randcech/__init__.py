"""Random Čech complexes over point processes: construction, homology and
thermodynamic-regime limit experiments."""

from .cech import SimplicialComplex, cech_complex, cech_filtration, miniball_radius, simplex_counts
from .geometry import (
    Chart,
    ChartAtlas,
    MetricSpec,
    chart_metric,
    distance,
    embed,
    euclidean,
    jacobian_density,
    metric_ratio_probe,
    weighted_norm,
    whiten,
)
from .homology import (
    BettiVector,
    betti_diff_bound_check,
    betti_numbers,
    connected_components,
    euler_characteristic,
    persistence,
    persistent_betti,
)
from .sampling import (
    DensitySpec,
    PointCloud,
    callable_density,
    sample_binomial,
    sample_homogeneous,
    sample_manifold,
    sample_poissonized,
    uniform_box,
)

__version__ = "0.1.0"
