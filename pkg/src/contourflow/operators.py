"""Discrete gradient and divergence operators on 2D/3D grids.

Two families live here:

* ``grad_forward`` / ``div_backward`` form an exact adjoint pair,
  ``<div v, u> = -<v, grad u>`` for every u, v (up to rounding). The
  saddle-point refiner depends on this identity, so the boundary closure of
  the divergence is forced by the gradient's and must not be changed
  independently.
* ``grad_central`` / ``grad_central_adjoint`` are a higher-accuracy pair used
  where a gradient is measured rather than optimized against: flow-field
  construction and the cosine shape loss. Fourth-order central differences in
  the deep interior, second-order central one cell from the border, one-sided
  at the border.
"""
from __future__ import annotations

import numpy as np

from ._validation import as_scalar_field, as_vector_field


def grad_forward(u) -> np.ndarray:
    """Forward differences along each axis; zero at the last index of each axis."""
    u = as_scalar_field(u, "u")
    nd = u.ndim
    out = np.zeros(u.shape + (nd,), dtype=np.float64)
    for ax in range(nd):
        f = np.moveaxis(u, ax, 0)
        g = np.moveaxis(out[..., ax], ax, 0)
        g[:-1] = f[1:] - f[:-1]
    return out


def div_backward(v) -> np.ndarray:
    """Backward-difference divergence, the negative adjoint of grad_forward.

    Per axis the closure is out[0] = v[0], out[i] = v[i] - v[i-1] inside,
    out[-1] = -v[-2]; a unit-length axis contributes nothing.
    """
    v = as_vector_field(v, "v")
    nd = v.shape[-1]
    out = np.zeros(v.shape[:-1], dtype=np.float64)
    for ax in range(nd):
        comp = np.moveaxis(v[..., ax], ax, 0)
        acc = np.moveaxis(out, ax, 0)
        n = comp.shape[0]
        if n == 1:
            continue
        acc[0] += comp[0]
        acc[1:-1] += comp[1:-1] - comp[:-2]
        acc[-1] += -comp[-2]
    return out


def _central_1d(f: np.ndarray) -> np.ndarray:
    """Per-line central differences (axis 0), with the border ladder."""
    n = f.shape[0]
    out = np.zeros_like(f)
    if n == 1:
        return out
    out[0] = f[1] - f[0]
    out[-1] = f[-1] - f[-2]
    if n >= 3:
        out[1] = (f[2] - f[0]) / 2.0
        out[-2] = (f[-1] - f[-3]) / 2.0
    if n >= 5:
        # difference-first grouping cancels exactly on constant fields
        out[2:-2] = ((f[:-4] - f[4:]) + 8.0 * (f[3:-1] - f[1:-3])) / 12.0
    return out


def _central_adjoint_1d(z: np.ndarray) -> np.ndarray:
    """Exact transpose of _central_1d along axis 0."""
    n = z.shape[0]
    out = np.zeros_like(z)
    if n == 1:
        return out
    out[0] += -z[0]
    out[1] += z[0]
    out[-2] += -z[-1]
    out[-1] += z[-1]
    if n >= 3:
        out[0] += -0.5 * z[1]
        out[2] += 0.5 * z[1]
    if n >= 4:
        out[-3] += -0.5 * z[-2]
        out[-1] += 0.5 * z[-2]
    if n >= 5:
        mid = z[2:-2]
        out[: n - 4] += mid / 12.0
        out[1 : n - 3] += -(8.0 / 12.0) * mid
        out[3 : n - 1] += (8.0 / 12.0) * mid
        out[4:] += -mid / 12.0
    return out


def grad_central(u) -> np.ndarray:
    """Central-difference gradient (fourth-order interior, one-sided borders)."""
    u = as_scalar_field(u, "u")
    nd = u.ndim
    out = np.empty(u.shape + (nd,), dtype=np.float64)
    for ax in range(nd):
        f = np.moveaxis(u, ax, 0)
        out[..., ax] = np.moveaxis(_central_1d(f), 0, ax)
    return out


def grad_central_adjoint(w) -> np.ndarray:
    """Transpose of grad_central applied to a vector field, returning a scalar field."""
    w = as_vector_field(w, "w")
    nd = w.shape[-1]
    out = np.zeros(w.shape[:-1], dtype=np.float64)
    for ax in range(nd):
        z = np.moveaxis(w[..., ax], ax, 0)
        out += np.moveaxis(_central_adjoint_1d(z), 0, ax)
    return out
