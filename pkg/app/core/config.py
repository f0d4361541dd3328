from pathlib import Path
from typing import Optional

from pydantic import ConfigDict, Field
from pydantic_settings import BaseSettings

# Load .env on import.
# Needed when running as `python -m` or from another working directory,
# where pydantic-settings does not find the .env by relative path.
try:
    from dotenv import load_dotenv as _load_dotenv
    _env_path = Path(__file__).parent.parent.parent / ".env"
    _load_dotenv(_env_path, override=False)
except ImportError:
    pass  # python-dotenv missing: plain environment variables still work


class BetaGeometrySettings(BaseSettings):
    model_config = ConfigDict(
        env_prefix="BETAGEO_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Geodesic integration (IVP)
    ivp_steps: int = Field(default=100, gt=0, description="RK4 steps over [0, 1]")
    boundary_guard: float = Field(default=1e-8, gt=0, description="Abort when x or y drops below this")

    # Shooting (BVP / log map)
    shooting_max_iterations: int = Field(default=50, gt=0)
    shooting_tolerance: float = Field(default=1e-6, gt=0, description="Endpoint residual, parameter space")
    shooting_fd_step: float = Field(default=1e-6, gt=0, description="Finite-difference step for the Jacobian")

    # Karcher flow
    karcher_step_size: float = Field(default=1.0, gt=0, le=1.0)
    karcher_max_iterations: int = Field(default=100, gt=0)
    karcher_tolerance: float = Field(default=1e-6, gt=0)

    # Maximum likelihood fitting
    mle_max_iterations: int = Field(default=50, gt=0)
    mle_tolerance: float = Field(default=1e-8, gt=0)

    # Learning
    knn_k: int = Field(default=7, gt=0)
    cv_folds: int = Field(default=5, ge=2)
    kmeans_n_init: int = Field(default=10, gt=0)
    kmeans_max_iterations: int = Field(default=100, gt=0)
    max_workers: int = Field(default=1, gt=0, description="Threads for CV folds and K-means restarts")

    log_level: str = Field(default="INFO")
    log_file: Optional[str] = Field(default=None, description="Also log to this file")


_settings: Optional[BetaGeometrySettings] = None


def get_settings() -> BetaGeometrySettings:
    global _settings
    if _settings is None:
        _settings = BetaGeometrySettings()
    return _settings


def reset_settings() -> None:
    """Drop the cached settings (tests monkeypatch the environment)."""
    global _settings
    _settings = None


def override_settings(**values) -> BetaGeometrySettings:
    """Replace the singleton with a validated copy; `None` values are ignored (unset CLI flags)."""
    global _settings
    updates = {k: v for k, v in values.items() if v is not None}
    _settings = BetaGeometrySettings(**{**get_settings().model_dump(), **updates})
    return _settings
