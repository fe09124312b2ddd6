"""Input validation helpers, in the spirit of sklearn's check_array.

Every helper returns a validated float64 copy (or the object itself) so
callers can hand the result straight to numerical code.
"""

from __future__ import annotations

import numpy as np

ROTATION_ATOL = 1e-9


def check_vector(value, size: int, name: str = "vector") -> np.ndarray:
    v = np.asarray(value, dtype=float)
    if v.shape != (size,):
        raise ValueError(f"{name} must have shape ({size},), got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite values")
    return v


def check_matrix(value, shape: tuple[int, int], name: str = "matrix") -> np.ndarray:
    m = np.asarray(value, dtype=float)
    if m.shape != shape:
        raise ValueError(f"{name} must have shape {shape}, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite values")
    return m


def check_rotation(value, name: str = "rotation", atol: float = ROTATION_ATOL) -> np.ndarray:
    """Validate a 3x3 orthonormal matrix with determinant +1."""
    r = check_matrix(value, (3, 3), name)
    if not np.allclose(r.T @ r, np.eye(3), atol=atol):
        raise ValueError(f"{name} is not orthonormal (R^T R != I within {atol})")
    if abs(np.linalg.det(r) - 1.0) > atol:
        raise ValueError(f"{name} has determinant != +1 within {atol}")
    return r


def check_points(value, dim: int, name: str = "points") -> tuple[np.ndarray, bool]:
    """Coerce to an (N, dim) float array.

    Accepts a single point of shape (dim,) as well; the returned flag says
    whether the input was a single point so callers can squeeze the output.
    """
    p = np.asarray(value, dtype=float)
    single = p.ndim == 1
    if single:
        p = p.reshape(1, -1)
    if p.ndim != 2 or p.shape[1] != dim:
        raise ValueError(f"{name} must have shape (N, {dim}) or ({dim},), got {np.shape(value)}")
    if not np.all(np.isfinite(p)):
        raise ValueError(f"{name} contains non-finite values")
    return p, single


def check_polygon_vertices(value, name: str = "polygon") -> np.ndarray:
    """Validate an open ring of >= 3 pixel/plane vertices without
    consecutive duplicates (including the wrap-around pair)."""
    v, _ = check_points(value, 2, name)
    if v.shape[0] < 3:
        raise ValueError(f"{name} needs at least 3 vertices, got {v.shape[0]}")
    nxt = np.roll(v, -1, axis=0)
    if np.any(np.all(v == nxt, axis=1)):
        raise ValueError(f"{name} has consecutive duplicate vertices")
    return v


def check_positive(value: float, name: str) -> float:
    value = float(value)
    if not value > 0:
        raise ValueError(f"{name} must be > 0, got {value}")
    return value


def check_non_negative(value: float, name: str) -> float:
    value = float(value)
    if value < 0:
        raise ValueError(f"{name} must be >= 0, got {value}")
    return value
