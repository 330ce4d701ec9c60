"""Small input-checking helpers shared across modules."""
from __future__ import annotations

import numbers

import numpy as np

from .exceptions import ValidationError


def check_real(value, name, *, positive=False, nonnegative=False):
    """Return ``value`` as a finite float, raising ValidationError otherwise."""
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ValidationError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not np.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value!r}")
    if positive and value <= 0:
        raise ValidationError(f"{name} must be > 0, got {value!r}")
    if nonnegative and value < 0:
        raise ValidationError(f"{name} must be >= 0, got {value!r}")
    return value


def check_complex(value, name):
    if isinstance(value, bool) or not isinstance(value, numbers.Complex):
        raise ValidationError(f"{name} must be a complex number, got {value!r}")
    value = complex(value)
    if not (np.isfinite(value.real) and np.isfinite(value.imag)):
        raise ValidationError(f"{name} must be finite, got {value!r}")
    return value


def check_int(value, name, *, nonnegative=False):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ValidationError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if nonnegative and value < 0:
        raise ValidationError(f"{name} must be >= 0, got {value!r}")
    return value


def as_complex_array(z, name="z"):
    """Coerce ``z`` to a complex ndarray and reject NaN/Inf entries."""
    arr = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values")
    return arr


def check_time_grid(T, dt):
    dt = check_real(dt, "dt", positive=True)
    T = check_real(T, "T", positive=True)
    if T < dt:
        raise ValidationError(f"T={T} must be >= dt={dt}")
    n_steps = int(round(T / dt))
    return n_steps, dt
