"""
Validation functions for dalpha-seeding.

This module provides reusable validation and parsing helpers for
command-line inputs.
"""

import math
from pathlib import Path
from typing import Union

from dalpha_seeding.exceptions import UsageError

_INFINITY_NAMES = {"inf", "+inf", "infinity", "+infinity", "∞"}


def parse_alpha(value: Union[str, float]) -> float:
    """
    Parse an alpha value, accepting ``inf``/``infinity``/``∞``.

    Args:
        value: Text or number to parse

    Returns:
        The alpha as a float (``math.inf`` for the farthest-point limit)

    Raises:
        UsageError: If the value is not a number or is negative
    """
    if isinstance(value, str):
        text = value.strip().lower()
        if text in _INFINITY_NAMES:
            return math.inf
        try:
            alpha = float(text)
        except ValueError as e:
            raise UsageError(f"alpha '{value}' is not a number") from e
    else:
        alpha = float(value)
    if math.isnan(alpha) or alpha < 0:
        raise UsageError("alpha must be >= 0", {"alpha": value})
    return alpha


def validate_file_path(path: Union[str, Path]) -> bool:
    """
    Validate that a path exists and is a file.

    Args:
        path: Path to validate

    Returns:
        True if the path exists and is a file, False otherwise
    """
    try:
        path = Path(path)
        return path.exists() and path.is_file()
    except OSError:
        return False
