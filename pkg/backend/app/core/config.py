from typing import Literal

from pydantic import Field, HttpUrl, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict
from typing_extensions import Self


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        # Use top level .env file (one level above ./backend/)
        env_file="../.env",
        env_ignore_empty=True,
        extra="ignore",
    )
    PROJECT_NAME: str = "bethe-zeros"
    ENVIRONMENT: Literal["local", "staging", "production"] = "local"
    SENTRY_DSN: HttpUrl | None = None
    # reports go to stdout, logs to stderr; keep the default quiet
    LOG_LEVEL: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "WARNING"

    # Parallelism cap for the verification sweep
    BETHE_ZEROS_THREADS: int = Field(default=4, ge=1)

    # Newton solver defaults
    SOLVER_GRAD_TOL: float = Field(default=1e-12, gt=0)
    SOLVER_MAX_ITERS: int = Field(default=200, ge=1)
    SOLVER_ARMIJO: float = Field(default=1e-4, gt=0, lt=1)
    SOLVER_BACKTRACK: float = Field(default=0.5, gt=0, lt=1)

    # mpmath working precision for the hypergeometric series
    SERIES_DPS: int = Field(default=30, ge=15)
    SERIES_MAX_DPS: int = Field(default=600, ge=15)

    # Bisection oracle
    ORACLE_MAX_DOUBLINGS: int = Field(default=20, ge=0)
    ORACLE_GRID_FACTOR: int = Field(default=8, ge=2)
    ORACLE_XTOL: float = Field(default=1e-12, gt=0)
    ORACLE_REFINER: Literal["bisect", "brentq"] = "brentq"

    # Published tables are printed to 3 decimals
    TABLE_TOLERANCE: float = Field(default=5e-4, gt=0)

    @model_validator(mode="after")
    def _check_series_precision(self) -> Self:
        if self.SERIES_DPS > self.SERIES_MAX_DPS:
            raise ValueError(
                f"SERIES_DPS ({self.SERIES_DPS}) exceeds SERIES_MAX_DPS ({self.SERIES_MAX_DPS})"
            )
        return self


settings = Settings()
