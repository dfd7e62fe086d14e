"""Segmentation loss functionals and their per-pixel gradients.

All losses are sums over pixels, not means; callers wanting size-independent
numbers divide by ``pixel_count``. Gradients are analytic and are validated
against central finite differences in the test suite.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import (
    as_mask,
    as_scalar_field,
    check_positive,
    check_same_shape,
)
from .flow import ContourFlow
from .operators import grad_central, grad_central_adjoint, grad_forward

# Probabilities are clamped away from {0, 1} before logs.
CLAMP = 1e-7
# Added to the gradient norm in the cosine denominator; keeps the loss defined
# (and exactly zero) on flat regions.
NORM_GUARD = 1e-8


@dataclass(frozen=True)
class LossValue:
    """A scalar loss with its named components and the pixel count it sums over."""

    total: float
    per_term: dict = field(default_factory=dict)
    pixel_count: int = 0

    def per_pixel(self) -> float:
        return self.total / self.pixel_count if self.pixel_count else 0.0


def _check_pair(u, g):
    u = as_scalar_field(u, "u")
    g = as_mask(g, "g")
    check_same_shape(u, g, "u", "g")
    return u, g


def ce_loss(u, g) -> LossValue:
    """Cross entropy -sum[g ln u + (1-g) ln(1-u)] with inputs clamped to
    [1e-7, 1 - 1e-7]."""
    u, g = _check_pair(u, g)
    c = np.clip(u, CLAMP, 1.0 - CLAMP)
    total = float(-(g * np.log(c) + (1 - g) * np.log(1.0 - c)).sum())
    return LossValue(total, {"ce": total}, u.size)


def dice_loss(u, g) -> LossValue:
    """Soft Dice loss 1 - 2 sum(u g) / (sum u + sum g), without squared
    denominator; defined as 0 when both u and g are identically zero."""
    u, g = _check_pair(u, g)
    if u.min() < 0.0 or u.max() > 1.0:
        raise ValueError("u must take values in [0, 1]")
    denom = float(u.sum() + g.sum())
    total = 0.0 if denom == 0.0 else float(1.0 - 2.0 * (u * g).sum() / denom)
    return LossValue(total, {"dice": total}, u.size)


def shape_loss_2d(u, flow: ContourFlow) -> LossValue:
    """Cosine alignment penalty between the gradient of u and a tangent flow.

    Sums |<grad u, F>| / (|grad u| + 1e-8) over pixels where the flow is
    defined. ``pixel_count`` is the number of such pixels.
    """
    u = as_scalar_field(u, "u", ndim=2)
    check_same_shape(u, flow.defined_mask, "u", "flow")
    grad = grad_central(u)
    dot = (grad * flow.field).sum(axis=-1)
    norm = np.sqrt((grad ** 2).sum(axis=-1))
    mask = flow.defined_mask != 0
    total = float((np.abs(dot)[mask] / (norm[mask] + NORM_GUARD)).sum())
    return LossValue(total, {"shape": total}, int(mask.sum()))


def shape_loss_3d(u, phi) -> LossValue:
    """Sum over voxels of the cross-product magnitude |grad u x grad phi|,
    with forward-difference gradients. Zero exactly when the two gradients
    are everywhere parallel."""
    u = as_scalar_field(u, "u", ndim=3)
    phi = as_scalar_field(phi, "phi", ndim=3)
    check_same_shape(u, phi, "u", "phi")
    gu = grad_forward(u)
    gp = grad_forward(phi)
    cross = np.cross(gu, gp)
    total = float(np.sqrt((cross ** 2).sum(axis=-1)).sum())
    return LossValue(total, {"shape_3d": total}, u.size)


def combined_loss(u, g, flow: ContourFlow, alpha: float = 1.0, beta: float = 1.0,
                  base: str = "ce") -> LossValue:
    """alpha * base loss + beta * 2D shape loss, base in {"ce", "dice"}."""
    alpha = check_positive(alpha, "alpha")
    beta = check_positive(beta, "beta")
    if base == "ce":
        base_value = ce_loss(u, g)
    elif base == "dice":
        base_value = dice_loss(u, g)
    else:
        raise ValueError(f"base must be 'ce' or 'dice', got {base!r}")
    shape_value = shape_loss_2d(u, flow)
    total = alpha * base_value.total + beta * shape_value.total
    per_term = {base: base_value.total, "shape": shape_value.total}
    return LossValue(float(total), per_term, base_value.pixel_count)


def _ce_gradient(u, g):
    c = np.clip(u, CLAMP, 1.0 - CLAMP)
    gf = g.astype(np.float64)  # unsigned masks must not be negated
    return -gf / c + (1.0 - gf) / (1.0 - c)


def _dice_gradient(u, g):
    denom = float(u.sum() + g.sum())
    if denom == 0.0:
        return np.zeros_like(u)
    overlap = float((u * g).sum())
    return -2.0 * (g * denom - overlap) / denom ** 2


def _shape2d_gradient(u, flow: ContourFlow):
    grad = grad_central(u)
    dot = (grad * flow.field).sum(axis=-1)
    norm = np.sqrt((grad ** 2).sum(axis=-1))
    mask = (flow.defined_mask != 0).astype(np.float64)
    sign = np.sign(dot)  # subgradient 0 exactly at the kink
    denom = norm + NORM_GUARD
    scale_f = mask * sign / denom
    # second term vanishes where the gradient itself does
    with np.errstate(invalid="ignore", divide="ignore"):
        scale_g = np.where(norm > 0.0, mask * np.abs(dot) / (norm * denom ** 2), 0.0)
    dgrad = scale_f[..., None] * flow.field - scale_g[..., None] * grad
    return grad_central_adjoint(dgrad)


def loss_gradient(kind: str, u, g=None, flow: ContourFlow | None = None) -> np.ndarray:
    """Per-pixel derivative of a loss with respect to u.

    kind is one of "ce", "dice", "shape2d"; "ce" and "dice" require g,
    "shape2d" requires flow.
    """
    u = as_scalar_field(u, "u")
    if kind in ("ce", "dice"):
        if g is None:
            raise ValueError(f"{kind} gradient requires g")
        g = as_mask(g, "g")
        check_same_shape(u, g, "u", "g")
        return _ce_gradient(u, g) if kind == "ce" else _dice_gradient(u, g)
    if kind == "shape2d":
        if flow is None:
            raise ValueError("shape2d gradient requires flow")
        if u.ndim != 2:
            raise ValueError("shape2d gradient is 2D only")
        check_same_shape(u, flow.defined_mask, "u", "flow")
        return _shape2d_gradient(u, flow)
    raise ValueError(f"unknown loss kind {kind!r}")
