"""
Configuration management for dalpha-seeding.

This module handles loading configuration from environment variables
(optionally through a ``.env`` file) and provides defaults when needed.
"""

import os
from functools import lru_cache
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

from dalpha_seeding.constants import (
    DEFAULT_GALPHA_SAMPLE_SIZE,
    DEFAULT_GALPHA_THRESHOLD,
    DEFAULT_LLOYD_MAX_ITERS,
    DEFAULT_LLOYD_TOL,
)

# Load environment variables from .env file
load_dotenv()


class LoggingConfig(BaseModel):
    """Configuration for logging."""

    level: str = Field(
        default="INFO", description="Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)"
    )
    format: str = Field(
        default="<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | <cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>",
        description="Logging format string",
    )
    save_to_file: bool = Field(
        default=False, description="Whether to save logs to file"
    )
    log_file: Optional[Path] = Field(
        default=Path("logs/dalpha_seeding.log"), description="Path to log file"
    )
    rotation: str = Field(default="50 MB", description="Log rotation size")
    retention: str = Field(default="10 days", description="Log retention period")

    @field_validator("log_file", mode="before")
    def validate_log_file(cls, v, info):
        """Ensure log file directory exists if logging to file."""
        if info.data.get("save_to_file", False) and v is not None:
            path = Path(v)
            path.parent.mkdir(parents=True, exist_ok=True)
            return path
        return v


class DiagnosticsConfig(BaseModel):
    """Configuration for the instance-parameter estimators."""

    galpha_exact_threshold: int = Field(
        default=DEFAULT_GALPHA_THRESHOLD,
        gt=1,
        description="Cluster size above which g_alpha is estimated from a subsample",
    )
    galpha_sample_size: int = Field(
        default=DEFAULT_GALPHA_SAMPLE_SIZE,
        gt=1,
        description="Number of sampled points used for approximate g_alpha",
    )


class LloydConfig(BaseModel):
    """Default stopping rule for Lloyd refinement."""

    max_iters: int = Field(default=DEFAULT_LLOYD_MAX_ITERS, ge=1)
    tol: float = Field(default=DEFAULT_LLOYD_TOL, ge=0.0)


class ExperimentDefaults(BaseModel):
    """Defaults for experiment sweeps."""

    workers: int = Field(default=1, ge=1, description="Parallel trial workers")
    output_dir: Path = Field(
        default=Path("results"), description="Default directory for sweep outputs"
    )


class AppConfig(BaseModel):
    """Main application configuration."""

    logging: LoggingConfig = Field(default_factory=LoggingConfig)
    diagnostics: DiagnosticsConfig = Field(default_factory=DiagnosticsConfig)
    lloyd: LloydConfig = Field(default_factory=LloydConfig)
    experiment: ExperimentDefaults = Field(default_factory=ExperimentDefaults)


@lru_cache()
def get_config() -> AppConfig:
    """
    Load and return the application configuration.

    Uses environment variables and default values.
    Results are cached for the lifetime of the process.
    """
    return AppConfig(
        logging=LoggingConfig(
            level=os.getenv("LOG_LEVEL", "INFO"),
            save_to_file=os.getenv("LOG_SAVE_TO_FILE", "false").lower() == "true",
            log_file=Path(os.getenv("LOG_FILE", "logs/dalpha_seeding.log")),
        ),
        diagnostics=DiagnosticsConfig(
            galpha_exact_threshold=int(
                os.getenv("DALPHA_GALPHA_THRESHOLD", str(DEFAULT_GALPHA_THRESHOLD))
            ),
            galpha_sample_size=int(
                os.getenv("DALPHA_GALPHA_SAMPLE", str(DEFAULT_GALPHA_SAMPLE_SIZE))
            ),
        ),
        lloyd=LloydConfig(
            max_iters=int(os.getenv("DALPHA_LLOYD_MAX_ITERS", str(DEFAULT_LLOYD_MAX_ITERS))),
            tol=float(os.getenv("DALPHA_LLOYD_TOL", str(DEFAULT_LLOYD_TOL))),
        ),
        experiment=ExperimentDefaults(
            workers=int(os.getenv("DALPHA_WORKERS", "1")),
            output_dir=Path(os.getenv("DALPHA_OUTPUT_DIR", "results")),
        ),
    )
