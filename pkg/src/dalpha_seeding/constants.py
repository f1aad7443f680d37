"""
Application-wide constants for dalpha-seeding.

This module defines constants that are used throughout the package
to avoid magic numbers and strings.
"""

from enum import Enum
from typing import Dict, Tuple

import polars as pl

# Lloyd refinement
DEFAULT_LLOYD_MAX_ITERS = 300
DEFAULT_LLOYD_TOL = 1e-9

# g_alpha estimation (O(|C|^2) guard)
DEFAULT_GALPHA_THRESHOLD = 4000
DEFAULT_GALPHA_SAMPLE_SIZE = 2000
PAIRWISE_BLOCK_ROWS = 256

# Relative floating-point slack for the lemma checks
LEMMA_RELATIVE_SLACK = 1e-9

# Instance construction
FAR_DISTANCE_MULTIPLIER = 1e6  # "infinite distance" stand-in for the sigma-ratio instance
SIMPLEX_LB_SEPARATION_FACTOR = 10.0  # R^alpha = 10 * k * delta^alpha
GREEDY_LB_DELTA_MULTIPLIER = 100.0  # Delta = 100 * m^3 * k
DEFAULT_N_PER_CLUSTER = 500
DEFAULT_PRESET_N = 10000
DEFAULT_PRESET_DELTA = 50.0  # half edge length, 2*Delta = 100

# File formats
PARQUET_COMPRESSION = "zstd"
LABEL_COLUMN = "label"
COORDINATE_PREFIX = "x"
RESULT_COLUMNS: Tuple[str, ...] = (
    "alpha",
    "method",
    "trial",
    "seed_cost2",
    "seed_ratio",
    "lloyd_cost2",
    "lloyd_ratio",
    "lloyd_iters",
    "undiscovered",
)

# CLI exit codes
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_LEMMA = 3


class InstanceFamily(str, Enum):
    """Enumeration of supported instance families."""

    GAUSSIAN_MIXTURE = "gaussian_mixture"
    STUDENT_T_MIXTURE = "student_t_mixture"
    SIMPLEX_LB = "simplex_lb"
    GALPHA_LB = "galpha_lb"
    GREEDY_LB = "greedy_lb"
    CUSTOM_CSV = "custom_csv"


class InstancePreset(str, Enum):
    """Benchmark mixtures used in the experiments."""

    D1 = "D1"  # 4 Gaussians on a square, identity covariances
    D2 = "D2"  # as D1, one component with sigma^2 = 400
    D3 = "D3"  # 8 Gaussians on a cube, identity covariances
    D4 = "D4"  # as D3, one component with sigma^2 = 800
    D5 = "D5"  # 4 student-t on a square, nu = 1.6, 2, 5, 10


class SeedingMethod(str, Enum):
    """Enumeration of seeding procedures."""

    DALPHA = "dalpha"
    GREEDY = "greedy"
    UNIFORM = "uniform"


class SeedEvent(str, Enum):
    """Whether a seeding step discovered a new reference cluster."""

    NEW = "new"
    HIT = "hit"


# Schema for the per-trial result table
RESULT_SCHEMA: Dict[str, pl.DataType] = {
    "alpha": pl.Float64,
    "method": pl.String,
    "trial": pl.Int64,
    "seed_cost2": pl.Float64,
    "seed_ratio": pl.Float64,
    "lloyd_cost2": pl.Float64,
    "lloyd_ratio": pl.Float64,
    "lloyd_iters": pl.Int64,
    "undiscovered": pl.Int64,
}
