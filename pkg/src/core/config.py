"""configuration management using pydantic-settings."""

from typing import Any

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """numerical and runtime settings loaded from SPHEREX_* environment variables."""

    # parallelism (0 = let the executor decide)
    threads: int = 0

    # quadrature
    quad_nodes: int = 512
    min_nodes: int = 4
    max_image_nodes: int = 1 << 20

    # root finding on profiles
    scan_points: int = 4096
    regularity_scan_points: int = 2048
    bisection_xtol: float = 1e-12
    regularity_threshold: float = 1e-9
    containment_margin: float = 1e-6

    # finite differences
    fd_step_gradient: float = 1e-4
    fd_step_jacobian: float = 1e-5
    fd_step_tangent: float = 1e-6

    # sampling of components and images
    denominator_cutoff: float = 1e-8
    sample_margin: float = 1e-3
    image_sample_margin: float = 2e-2
    u_samples: int = 64
    u_azimuths: int = 1

    # vanishing experiment
    disjointness_margin: float = 0.05
    vanishing_tol: float = 1e-7
    violation_threshold: float = 1e-3

    # harness
    seed: int = 7
    report_timings: bool = False
    log_level: str = "INFO"

    # application configuration
    app_name: str = "spherex"
    app_version: str = "0.1.0"

    model_config = SettingsConfigDict(
        env_prefix="SPHEREX_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    def with_overrides(self, **overrides: Any) -> "Settings":
        """return a copy with the non-None overrides applied."""
        update = {key: value for key, value in overrides.items() if value is not None}
        return self.model_copy(update=update) if update else self


# global settings instance
settings = Settings()
