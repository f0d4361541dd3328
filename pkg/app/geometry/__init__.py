"""
Geometry of the beta manifold.

specfun:  lnΓ, ψ, ψ′, ψ″
manifold: metric, Christoffel coefficients, sectional curvature
geodesic: exp/log maps, distance, geodesic balls
"""

from .state import (
    BetaPoint,
    TangentVector,
    MetricMatrix,
    GeodesicPath,
    points_to_array,
    array_to_points,
)
from .specfun import log_gamma, digamma, trigamma, tetragamma, polygamma_pair
from .manifold import (
    log_partition,
    metric_matrix,
    inverse_metric,
    inner,
    norm,
    christoffel_coefficients,
    sectional_curvature,
    curvature_grid,
)
from .geodesic import (
    SolverOptions,
    geodesic_ivp,
    geodesic_bvp,
    exp_map,
    log_map,
    distance,
    exp_batch,
    log_batch,
    distance_batch,
    pairwise_distances,
    path_length,
    geodesic_ball,
)

__all__ = [
    # State
    "BetaPoint",
    "TangentVector",
    "MetricMatrix",
    "GeodesicPath",
    "points_to_array",
    "array_to_points",
    # Special functions
    "log_gamma",
    "digamma",
    "trigamma",
    "tetragamma",
    "polygamma_pair",
    # Metric and curvature
    "log_partition",
    "metric_matrix",
    "inverse_metric",
    "inner",
    "norm",
    "christoffel_coefficients",
    "sectional_curvature",
    "curvature_grid",
    # Geodesics
    "SolverOptions",
    "geodesic_ivp",
    "geodesic_bvp",
    "exp_map",
    "log_map",
    "distance",
    "exp_batch",
    "log_batch",
    "distance_batch",
    "pairwise_distances",
    "path_length",
    "geodesic_ball",
]
