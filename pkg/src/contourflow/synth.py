"""Synthetic two-level test images, corruption operators, and a two-cluster
feature extractor.

Images are float grids with background 0 and foreground 255 by default.
Every random operation takes an explicit seed and is reproducible.
"""
from __future__ import annotations

import numpy as np

from ._validation import as_scalar_field, check_in_range

SHAPES = ("disk", "letter_c", "two_blobs", "square")
CORRUPTIONS = ("gaussian", "salt_pepper", "patches")

# Cluster separation fraction used as a floor on the within-cluster spread;
# keeps features finite and at a scale where an entropy weight of ~10 leaves
# the sigmoid responsive on perfectly separable two-level images.
SEPARATION_FLOOR = 0.15


def _grid(size: int):
    rr, cc = np.mgrid[0:size, 0:size].astype(np.float64)
    return rr, cc


def synthesize(kind: str, size: int = 128, fg_value: float = 255.0,
               bg_value: float = 0.0, center=None, radius: float | None = None,
               thickness: float | None = None, opening_deg: float = 35.0,
               half_side: float | None = None):
    """Build a two-level image and its ground-truth mask.

    kind is one of "disk", "letter_c", "two_blobs", "square". Geometry
    defaults scale with the grid size; a geometry that produces an empty or
    full mask raises ValueError.

    Returns (image, gt).
    """
    if kind not in SHAPES:
        raise ValueError(f"unknown shape {kind!r}; choose from {SHAPES}")
    if size < 4:
        raise ValueError(f"size must be >= 4, got {size}")
    c0 = (size - 1) / 2.0
    center = (c0, c0) if center is None else (float(center[0]), float(center[1]))
    rr, cc = _grid(size)
    rad = np.sqrt((rr - center[0]) ** 2 + (cc - center[1]) ** 2)

    if kind == "disk":
        r = 0.3 * size if radius is None else float(radius)
        gt = rad <= r
    elif kind == "square":
        h = 0.25 * size if half_side is None else float(half_side)
        gt = (np.abs(rr - center[0]) <= h) & (np.abs(cc - center[1]) <= h)
    elif kind == "letter_c":
        r_out = 0.3125 * size if radius is None else float(radius)
        t = 0.140625 * size if thickness is None else float(thickness)
        r_in = r_out - t
        if r_in <= 0:
            raise ValueError("thickness must be smaller than the outer radius")
        ang = np.degrees(np.arctan2(rr - center[0], cc - center[1]))
        ring = (rad <= r_out) & (rad >= r_in)
        mouth = np.abs(ang) <= float(opening_deg)
        gt = ring & ~mouth
    else:  # two_blobs
        r1 = 0.14 * size if radius is None else float(radius)
        r2 = 0.11 * size if radius is None else 0.75 * float(radius)
        p1 = (0.32 * size, 0.34 * size)
        p2 = (0.66 * size, 0.64 * size)
        d1 = np.sqrt((rr - p1[0]) ** 2 + (cc - p1[1]) ** 2)
        d2 = np.sqrt((rr - p2[0]) ** 2 + (cc - p2[1]) ** 2)
        gt = (d1 <= r1) | (d2 <= r2)

    if not gt.any() or gt.all():
        raise ValueError(f"degenerate geometry for {kind!r}: empty or full mask")
    image = np.where(gt, float(fg_value), float(bg_value))
    return image, gt.astype(np.uint8)


def corrupt(image, mode: str, sigma: float = 20.0, sp_ratio: float = 0.02,
            patch_count: int = 12, patch_size: int = 16, seed: int = 0) -> np.ndarray:
    """Damage an image reproducibly.

    gaussian : add N(0, sigma^2) per pixel, then clamp to [0, 255]
    salt_pepper : set floor(sp_ratio * N) distinct pixels to 0 or 255
    patches : paste patch_count axis-aligned squares of side patch_size,
        each filled with 0 or 255, at uniform positions
    """
    image = as_scalar_field(image, "image", ndim=2)
    if mode not in CORRUPTIONS:
        raise ValueError(f"unknown corruption {mode!r}; choose from {CORRUPTIONS}")
    rng = np.random.default_rng(seed)
    out = image.copy()
    if mode == "gaussian":
        if sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {sigma}")
        out = np.clip(out + rng.normal(0.0, 1.0, out.shape) * float(sigma), 0.0, 255.0)
    elif mode == "salt_pepper":
        check_in_range(sp_ratio, 0.0, 1.0, "sp_ratio")
        n_hit = int(np.floor(sp_ratio * out.size))
        if n_hit:
            flat_idx = rng.choice(out.size, size=n_hit, replace=False)
            values = np.where(rng.integers(0, 2, n_hit) == 1, 255.0, 0.0)
            out.reshape(-1)[flat_idx] = values
    else:  # patches
        h, w = out.shape
        side = int(patch_size)
        if side < 1 or side > min(h, w):
            raise ValueError(f"patch_size must be in [1, {min(h, w)}], got {side}")
        for _ in range(int(patch_count)):
            r0 = int(rng.integers(0, h - side + 1))
            c0 = int(rng.integers(0, w - side + 1))
            val = 255.0 * float(rng.integers(0, 2))
            out[r0:r0 + side, c0:c0 + side] = val
    return out


def kmeans_features(image, k: int = 2, seed: int = 0) -> np.ndarray:
    """Two-cluster intensity feature: the log-odds-style score
    (d_bg^2 - d_fg^2) / (2 s^2) of each pixel, positive for foreground-like.

    ``image`` is a single 2D grid or a sequence of per-channel grids.
    Centroids start at the 25th/75th intensity percentiles (per channel) and
    are polished by Lloyd iterations until movement falls below 1e-6; the
    brighter centroid is foreground. ``s`` is the pooled within-cluster
    spread, floored at a fixed fraction of the centroid separation so
    perfectly separable images still give finite scores. The procedure is
    deterministic; ``seed`` is accepted for interface compatibility.
    """
    if k != 2:
        raise ValueError(f"only k=2 is supported, got k={k}")
    if isinstance(image, (list, tuple)):
        channels = [as_scalar_field(ch, f"channel {i}", ndim=2)
                    for i, ch in enumerate(image)]
        shape = channels[0].shape
        for ch in channels[1:]:
            if ch.shape != shape:
                raise ValueError("all channels must share one grid shape")
        x = np.stack([ch.ravel() for ch in channels], axis=1)
    else:
        arr = as_scalar_field(image, "image", ndim=2)
        shape = arr.shape
        x = arr.reshape(-1, 1)

    if (x.max(axis=0) == x.min(axis=0)).all():
        raise ValueError("constant image: a single cluster cannot be split")
    cents = np.percentile(x, [25.0, 75.0], axis=0)
    if np.array_equal(cents[0], cents[1]):
        cents = np.stack([x.min(axis=0), x.max(axis=0)])

    for _ in range(100):
        d2 = ((x[:, None, :] - cents[None, :, :]) ** 2).sum(axis=2)
        assign = d2.argmin(axis=1)
        new = cents.copy()
        for j in (0, 1):
            members = assign == j
            if members.any():
                new[j] = x[members].mean(axis=0)
        move = np.abs(new - cents).max()
        cents = new
        if move < 1e-6:
            break

    fg = int(np.argmax(cents.mean(axis=1)))
    bg = 1 - fg
    d_fg2 = ((x - cents[fg]) ** 2).sum(axis=1)
    d_bg2 = ((x - cents[bg]) ** 2).sum(axis=1)
    pooled = np.sqrt(np.minimum(d_fg2, d_bg2).mean())
    sep = np.sqrt(((cents[fg] - cents[bg]) ** 2).sum())
    s = max(pooled, SEPARATION_FLOOR * sep, 1e-6)
    o = (d_bg2 - d_fg2) / (2.0 * s * s)
    return o.reshape(shape)
