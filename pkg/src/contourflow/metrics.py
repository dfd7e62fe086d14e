"""Segmentation quality metrics: overlap (Dice) and boundary statistics.

Boundary distances are one-directional, from the predicted boundary to the
reference boundary, and are evaluated exactly by sampling the unsigned
distance transform of the reference boundary set.
"""
from __future__ import annotations

import numpy as np

from ._validation import as_mask, check_same_shape
from .distance import _edt_squared, boundary_pixels


def dice_score(pred, gt) -> float:
    """Overlap percentage 2|A and B| / (|A| + |B|) * 100; 100 when both empty."""
    pred = as_mask(pred, "pred")
    gt = as_mask(gt, "gt")
    check_same_shape(pred, gt, "pred", "gt")
    a = pred.astype(bool)
    b = gt.astype(bool)
    denom = int(a.sum()) + int(b.sum())
    if denom == 0:
        return 100.0
    return 200.0 * int((a & b).sum()) / denom


def boundary_distance(pred, gt) -> tuple[float, float]:
    """Mean and population standard deviation of the Euclidean distance from
    each predicted-boundary pixel to the reference boundary set.

    The standard deviation is zero exactly when every predicted-boundary
    pixel is equidistant from the reference boundary. Raises if either mask
    has an empty boundary.
    """
    pred = as_mask(pred, "pred")
    gt = as_mask(gt, "gt")
    check_same_shape(pred, gt, "pred", "gt")
    bp = boundary_pixels(pred).astype(bool)
    bg = boundary_pixels(gt).astype(bool)
    if not bp.any():
        raise ValueError("pred has an empty boundary")
    if not bg.any():
        raise ValueError("gt has an empty boundary")
    dist = np.sqrt(_edt_squared(bg))
    vals = dist[bp]
    bd = float(vals.mean())
    bdsd = float(np.sqrt(((vals - bd) ** 2).mean()))
    return bd, bdsd


def segmentation_report(pred, gt) -> dict:
    """Dice, BD and BDSD bundled with the underlying set sizes."""
    pred = as_mask(pred, "pred")
    gt = as_mask(gt, "gt")
    bd, bdsd = boundary_distance(pred, gt)
    return {
        "dice_percent": dice_score(pred, gt),
        "bd": bd,
        "bdsd": bdsd,
        "aux": {
            "pred_pixels": int(pred.sum()),
            "gt_pixels": int(gt.sum()),
            "pred_boundary_pixels": int(boundary_pixels(pred).sum()),
            "gt_boundary_pixels": int(boundary_pixels(gt).sum()),
        },
    }
