"""Input validation helpers shared by the functional API and the estimators."""

from __future__ import annotations

import math
import numbers

import numpy as np

from .exceptions import ValidationError

UINT64_MAX = 2**64 - 1


def check_int(key, value, *, minimum=None):
    if isinstance(value, (bool, np.bool_)) or not isinstance(value, numbers.Integral):
        raise ValidationError(key, f"expected an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise ValidationError(key, f"must be >= {minimum} (got {value})")
    return value


def check_real(key, value, *, low=None, high=None, low_inclusive=True, high_inclusive=True):
    if isinstance(value, (bool, np.bool_)) or not isinstance(value, numbers.Real):
        raise ValidationError(key, f"expected a real number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(key, f"must be finite (got {value})")
    if low is not None:
        if value < low or (value == low and not low_inclusive):
            op = ">=" if low_inclusive else ">"
            raise ValidationError(key, f"must be {op} {low} (got {value})")
    if high is not None:
        if value > high or (value == high and not high_inclusive):
            op = "<=" if high_inclusive else "<"
            raise ValidationError(key, f"must be {op} {high} (got {value})")
    return value


def check_seed(key, value):
    value = check_int(key, value, minimum=0)
    if value > UINT64_MAX:
        raise ValidationError(key, "must fit in 64 unsigned bits")
    return value


def check_vector(key, values, *, dtype=float, allow_empty=False):
    """Coerce to a finite 1-D array."""
    try:
        arr = np.asarray(values, dtype=dtype)
    except (TypeError, ValueError) as exc:
        raise ValidationError(key, f"not convertible to {np.dtype(dtype).name}: {exc}") from None
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValidationError(key, f"expected a 1-D sequence, got shape {arr.shape}")
    if not allow_empty and arr.size == 0:
        raise ValidationError(key, "must not be empty")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(key, "entries must be finite")
    return arr


def check_coefficient_array(X, key="X"):
    """Validate a 2-D array of coefficient rows (one power series per row).

    Complex input is kept complex; anything else is promoted to float.
    """
    arr = np.asarray(X)
    if arr.dtype == object:
        raise ValidationError(key, "object arrays are not supported")
    if not np.iscomplexobj(arr):
        try:
            arr = arr.astype(float)
        except (TypeError, ValueError) as exc:
            raise ValidationError(key, str(exc)) from None
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValidationError(key, f"expected 2-D (n_series, n_coefficients), got shape {arr.shape}")
    if arr.shape[1] == 0:
        raise ValidationError(key, "need at least one coefficient per row")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(key, "entries must be finite")
    return arr
