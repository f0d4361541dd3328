from .state import KarcherConfig, MeanResult
from .frechet import frechet_mean, frechet_variance, frechet_functional, karcher_flow

__all__ = [
    "KarcherConfig",
    "MeanResult",
    "frechet_mean",
    "frechet_variance",
    "frechet_functional",
    "karcher_flow",
]
