"""Input validation helpers shared by the public modules."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

import numpy as np

from .exceptions import DimensionMismatch, NotHermitian, SchemaError

DEFAULT_TOL = 1e-10


def as_fraction(value) -> Fraction:
    """Convert ``value`` to an exact :class:`~fractions.Fraction`.

    Accepts integers, rationals, ``"p/q"`` or decimal strings, and floats
    (taken at their exact binary value).
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (bool, np.bool_)):
        raise SchemaError(f"not a number: {value!r}")
    if isinstance(value, (int, np.integer, Rational)):
        return Fraction(int(value)) if isinstance(value, np.integer) else Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"cannot parse rational {value!r}") from exc
    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            raise SchemaError(f"non-finite value {value!r}")
        return Fraction(float(value))
    raise SchemaError(f"cannot interpret {value!r} as a rational number")


def check_square(matrix, name: str = "matrix") -> np.ndarray:
    """Return ``matrix`` as a read-only complex square array."""
    arr = np.array(matrix, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise DimensionMismatch(f"{name} must be a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise SchemaError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


def check_hermitian(arr: np.ndarray, tol: float = DEFAULT_TOL, name: str = "matrix") -> None:
    defect = float(np.max(np.abs(arr - arr.conj().T)))
    if defect > tol:
        raise NotHermitian(f"{name} is not Hermitian (max |M - M^H| = {defect:.3e})")


def check_same_dim(*dims: int) -> int:
    if len(set(dims)) != 1:
        raise DimensionMismatch(f"dimension mismatch: {dims}")
    return dims[0]


def frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.asarray(arr)
    arr.setflags(write=False)
    return arr


def check_rng(seed) -> np.random.Generator:
    """Turn a seed or generator into a :class:`numpy.random.Generator`."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
