"""Process-level configuration for rotational_geodesics.

Settings come from the environment (or an optional ``.env`` file) through
pydantic-settings.  They only cover how the tool runs: logging, worker
count, observability and the sizes of the verification suites.  What a
single run computes lives in :mod:`rotational_geodesics.runconfig`.
"""

from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Rotational geodesics configuration."""

    # Env vars are matched case-insensitively to field names (e.g. LOG_LEVEL ->
    # log_level).
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    log_level: str = Field(default="INFO")

    # Execution
    default_workers: int = Field(default=1, ge=1)
    output_dir: str = Field(default="out")

    # Observability
    metrics_enabled: bool = Field(default=False)
    metrics_port: int = Field(default=9107)
    metrics_textfile: Optional[str] = Field(default=None)

    # Verification suites (the `check` subcommand)
    check_seed: int = Field(default=20240607)
    check_curvature_samples: int = Field(default=100, ge=1)
    check_geodesics_per_family: int = Field(default=50, ge=1)
    check_s_end: float = Field(default=10.0, gt=0)
    check_step: float = Field(default=1e-3, gt=0)

    @property
    def metrics_textfile_enabled(self) -> bool:
        return bool(self.metrics_textfile)


settings = Settings()
