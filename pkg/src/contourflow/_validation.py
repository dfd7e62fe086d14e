"""Input validation helpers shared by all public operations.

Grids are plain numpy arrays in row-major order, indexed (row, col) in 2D and
(row, col, slice) in 3D. Vector fields carry one trailing channel axis whose
length equals the grid dimensionality, channel k holding the derivative along
array axis k.
"""
from __future__ import annotations

import numpy as np


def as_scalar_field(a, name: str = "field", ndim: int | None = None) -> np.ndarray:
    """Coerce to a float64 2D/3D grid and check every value is finite."""
    out = np.asarray(a, dtype=np.float64)
    if out.ndim not in (2, 3):
        raise ValueError(f"{name} must be a 2D or 3D grid, got ndim={out.ndim}")
    if ndim is not None and out.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}D, got {out.ndim}D")
    if out.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.isfinite(out).all():
        raise ValueError(f"{name} contains non-finite values")
    return out


def as_mask(a, name: str = "mask", ndim: int | None = None) -> np.ndarray:
    """Coerce to a uint8 grid of exactly 0s and 1s."""
    arr = np.asarray(a)
    if arr.ndim not in (2, 3):
        raise ValueError(f"{name} must be a 2D or 3D grid, got ndim={arr.ndim}")
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}D, got {arr.ndim}D")
    if arr.size == 0:
        raise ValueError(f"{name} is empty")
    vals = np.unique(arr)
    if not np.isin(vals, (0, 1)).all():
        raise ValueError(f"{name} must contain only 0 and 1, found values {vals[:8]}")
    return arr.astype(np.uint8)


def as_vector_field(a, name: str = "vector field", ndim: int | None = None) -> np.ndarray:
    """Coerce to a float64 vector field with channels matching grid dimensionality."""
    out = np.asarray(a, dtype=np.float64)
    if out.ndim not in (3, 4):
        raise ValueError(f"{name} must have a trailing channel axis, got ndim={out.ndim}")
    grid_ndim = out.ndim - 1
    if out.shape[-1] != grid_ndim:
        raise ValueError(
            f"{name} must have {grid_ndim} channels for a {grid_ndim}D grid, "
            f"got {out.shape[-1]}"
        )
    if ndim is not None and grid_ndim != ndim:
        raise ValueError(f"{name} must live on a {ndim}D grid, got {grid_ndim}D")
    if not np.isfinite(out).all():
        raise ValueError(f"{name} contains non-finite values")
    return out


def check_same_shape(a: np.ndarray, b: np.ndarray, name_a: str, name_b: str) -> None:
    if a.shape != b.shape:
        raise ValueError(
            f"shape mismatch: {name_a} has {a.shape}, {name_b} has {b.shape}"
        )


def check_same_grid(a: np.ndarray, b: np.ndarray, name_a: str, name_b: str) -> None:
    """Compare grids ignoring any trailing channel axis on either side."""
    grid_a = a.shape[:-1] if a.ndim in (3, 4) and a.shape[-1] == a.ndim - 1 else a.shape
    grid_b = b.shape[:-1] if b.ndim in (3, 4) and b.shape[-1] == b.ndim - 1 else b.shape
    if grid_a != grid_b:
        raise ValueError(
            f"grid mismatch: {name_a} has {grid_a}, {name_b} has {grid_b}"
        )


def check_in_range(x: float, lo: float, hi: float, name: str) -> float:
    x = float(x)
    if not (lo <= x <= hi):
        raise ValueError(f"{name} must be in [{lo}, {hi}], got {x}")
    return x


def check_positive(x: float, name: str) -> float:
    x = float(x)
    if not x > 0:
        raise ValueError(f"{name} must be > 0, got {x}")
    return x
