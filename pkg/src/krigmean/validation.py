"""Input checks shared by the estimator and the command line."""

from __future__ import annotations

import numbers

import numpy as np
from sklearn.utils.validation import check_array

from .correlation import FAMILIES

UNITS = ("normalized", "absolute")


def check_series(X, *, min_length: int = 1) -> np.ndarray:
    """Coerce a series (1-D, a single column, or a TimeSeries) to a finite float vector."""
    if hasattr(X, "values") and hasattr(X, "labels"):
        X = X.values
    arr = check_array(X, ensure_2d=False, dtype=np.float64, ensure_all_finite=True, input_name="X")
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise ValueError(f"expected a single series, got {arr.shape[1]} columns")
        arr = arr[:, 0]
    if arr.size < min_length:
        raise ValueError(f"series has {arr.size} values, need at least {min_length}")
    return arr


def check_int(value, name: str, *, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    if value < minimum:
        raise ValueError(f"{name} must be at least {minimum}, got {value}")
    return int(value)


def check_family(family: str) -> str:
    if family not in FAMILIES:
        raise ValueError(f"family must be one of {FAMILIES}, got {family!r}")
    return family


def check_units(units: str) -> str:
    if units not in UNITS:
        raise ValueError(f"units must be one of {UNITS}, got {units!r}")
    return units


def check_tolerance(tolerance: float) -> float:
    if not (isinstance(tolerance, numbers.Real) and np.isfinite(tolerance) and tolerance > 0):
        raise ValueError(f"tolerance must be a positive number, got {tolerance!r}")
    return float(tolerance)
