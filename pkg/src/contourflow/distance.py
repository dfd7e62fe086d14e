"""Exact Euclidean signed distance to the boundary of a binary mask.

The boundary of a mask is the set of foreground pixels with at least one
background 4-neighbor (6-neighbor in 3D); pixels on the grid border count as
adjacent to the outside. Distances are exact: squared distances are built by
the separable lower-envelope transform in integer-valued arithmetic, then
square-rooted. The sign is +1 strictly inside, 0 on the boundary pixels
themselves, -1 everywhere outside the foreground.
"""
from __future__ import annotations

import numpy as np

from ._validation import as_mask

# Finite stand-in for "no seed on this line yet"; any real squared distance on
# a desk-scale grid is many orders of magnitude smaller.
_FAR = 1.0e15


def boundary_pixels(g) -> np.ndarray:
    """Mask of foreground pixels touching the background or the grid border."""
    g = as_mask(g, "g")
    fg = g.astype(bool)
    padded = np.pad(fg, 1, constant_values=False)
    surrounded = np.ones_like(fg)
    for ax in range(fg.ndim):
        lo = tuple(
            slice(0, -2) if a == ax else slice(1, -1) for a in range(fg.ndim)
        )
        hi = tuple(
            slice(2, None) if a == ax else slice(1, -1) for a in range(fg.ndim)
        )
        surrounded &= padded[lo] & padded[hi]
    return (fg & ~surrounded).astype(np.uint8)


def _envelope_1d(f: np.ndarray) -> np.ndarray:
    """1D lower envelope of parabolas: d[q] = min_p (q - p)^2 + f[p]."""
    n = f.shape[0]
    d = np.empty(n)
    v = np.zeros(n, dtype=np.intp)  # abscissas of parabolas in the envelope
    z = np.empty(n + 1)  # breakpoints between consecutive parabolas
    k = 0
    z[0] = -_FAR
    z[1] = _FAR
    for q in range(1, n):
        s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * (q - v[k]))
        while s <= z[k]:
            k -= 1
            s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * (q - v[k]))
        k += 1
        v[k] = q
        z[k] = s
        z[k + 1] = _FAR
    k = 0
    for q in range(n):
        while z[k + 1] < q:
            k += 1
        d[q] = (q - v[k]) ** 2 + f[v[k]]
    return d


def _edt_squared(seeds: np.ndarray) -> np.ndarray:
    """Exact squared Euclidean distance to the nearest seed pixel."""
    f = np.where(seeds, 0.0, _FAR)
    for ax in range(f.ndim):
        moved = np.moveaxis(f, ax, -1)
        flat = moved.reshape(-1, moved.shape[-1])
        for i in range(flat.shape[0]):
            flat[i] = _envelope_1d(flat[i])
        f = np.moveaxis(flat.reshape(moved.shape), -1, ax)
    return f


def signed_distance(g) -> np.ndarray:
    """Signed Euclidean distance field of a binary mask.

    Positive inside the foreground, exactly zero on its boundary pixels,
    negative outside. Raises ValueError for a mask with no foreground (its
    boundary set is empty, so no distance is defined); the all-ones mask is
    valid, its boundary being the grid border.
    """
    g = as_mask(g, "g")
    if not g.any():
        raise ValueError("mask has no foreground pixel; signed distance undefined")
    b = boundary_pixels(g).astype(bool)
    dist = np.sqrt(_edt_squared(b))
    sign = np.where(b, 0.0, np.where(g.astype(bool), 1.0, -1.0))
    return sign * dist
