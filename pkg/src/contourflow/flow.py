"""Tangent flow fields of a signed distance function, and flow comparison.

The flow at a pixel is the unit tangent of the level line through it,
obtained by rotating the normalized distance gradient a quarter turn. With
vector channels in axis order (row derivative, column derivative) and the
x axis identified with columns, the quarter turn (x, y) -> (-y, x) reads
F_row = G_col, F_col = -G_row.

Pixels where the gradient is numerically zero (medial axes, flat plateaus)
carry no tangent direction; they are excluded through ``defined_mask`` and
their flow vector is exactly zero.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import as_scalar_field, as_vector_field, check_same_shape
from .operators import div_backward, grad_central

# Gradient magnitudes below this carry no reliable direction.
ZERO_GRAD_TOL = 1e-8


@dataclass(frozen=True)
class ContourFlow:
    """A per-pixel 2-vector field plus the mask of pixels where it is defined.

    Freshly constructed flows are unit length wherever defined and exactly
    zero elsewhere; perturbed flows keep the mask but not the unit norms.
    """

    field: np.ndarray  # (H, W, 2) float64
    defined_mask: np.ndarray  # (H, W) uint8

    def __post_init__(self):
        field = as_vector_field(self.field, "flow field", ndim=2)
        mask = np.asarray(self.defined_mask).astype(np.uint8)
        check_same_shape(mask, field[..., 0], "defined_mask", "flow field grid")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "defined_mask", mask)
        if (np.abs(field[mask == 0]) != 0.0).any():
            raise ValueError("flow must be exactly zero where undefined")

    @property
    def shape(self) -> tuple:
        return self.field.shape[:-1]


def contour_flow(phi, eta: float = ZERO_GRAD_TOL, zero_border: bool = True) -> ContourFlow:
    """Unit tangent field of the level lines of a 2D scalar field.

    Parameters
    ----------
    phi : 2D array, typically a signed distance field
    eta : gradient magnitudes below eta are treated as undefined
    zero_border : also mark the one-pixel grid border undefined, forcing a
        zero normal flux through the domain edge

    Raises on 3D input: the quarter-turn construction is specific to 2D.
    """
    phi = as_scalar_field(phi, "phi", ndim=2)
    grad = grad_central(phi)
    norm = np.sqrt((grad ** 2).sum(axis=-1))
    defined = norm >= eta
    if zero_border:
        defined[0, :] = False
        defined[-1, :] = False
        defined[:, 0] = False
        defined[:, -1] = False
    field = np.zeros_like(grad)
    safe = np.where(defined, norm, 1.0)
    field[..., 0] = np.where(defined, grad[..., 1] / safe, 0.0)
    field[..., 1] = np.where(defined, -grad[..., 0] / safe, 0.0)
    return ContourFlow(field=field, defined_mask=defined.astype(np.uint8))


def perturb_flow(f: ContourFlow, delta: float, seed: int) -> ContourFlow:
    """Add i.i.d. Gaussian noise of standard deviation delta to each defined
    component. The result is deliberately not renormalized; the defined mask
    is preserved and undefined pixels stay exactly zero."""
    if delta < 0:
        raise ValueError(f"delta must be >= 0, got {delta}")
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, 1.0, f.field.shape) * float(delta)
    noisy = f.field + noise * (f.defined_mask[..., None] != 0)
    return ContourFlow(field=noisy, defined_mask=f.defined_mask.copy())


def flow_metrics(pred: ContourFlow, gt: ContourFlow) -> dict:
    """Compare a predicted flow against a reference over their common support.

    Returns average cosine similarity (acs), mean endpoint error (epe), and
    mean absolute divergence difference (ade), plus the common pixel count.
    """
    check_same_shape(pred.field, gt.field, "pred", "gt")
    both = (pred.defined_mask != 0) & (gt.defined_mask != 0)
    if not both.any():
        raise ValueError("no pixel has both flows defined")
    p = pred.field[both]
    g = gt.field[both]
    pn = np.sqrt((p ** 2).sum(axis=-1))
    gn = np.sqrt((g ** 2).sum(axis=-1))
    if (pn == 0).any() or (gn == 0).any():
        raise ValueError("zero vector on a defined pixel; cosine undefined")
    acs = float(((p * g).sum(axis=-1) / (pn * gn)).mean())
    epe = float(np.sqrt(((p - g) ** 2).sum(axis=-1)).mean())
    div_diff = np.abs(div_backward(pred.field) - div_backward(gt.field))
    ade = float(div_diff[both].mean())
    return {"acs": acs, "epe": epe, "ade": ade, "common_pixels": int(both.sum())}


def flow_l2_loss(pred, gt) -> float:
    """Euclidean norm of the componentwise difference of two vector fields."""
    pred = as_vector_field(pred, "pred")
    gt = as_vector_field(gt, "gt")
    check_same_shape(pred, gt, "pred", "gt")
    return float(np.sqrt(((pred - gt) ** 2).sum()))
