"""Contour-flow guided segmentation refinement.

Build an exact signed distance field from a reference mask, turn its level
lines into a unit tangent flow, and refine noisy per-pixel features into a
segmentation whose contours align with the reference shape. Includes the
matching shape losses, evaluation metrics, synthetic fixtures, file formats,
and a scikit-learn style estimator.
"""

from .distance import boundary_pixels, signed_distance
from .estimator import ContourFlowRefiner
from .fields import map_sigmoid, stable_sigmoid, threshold
from .flow import (
    ContourFlow,
    contour_flow,
    flow_l2_loss,
    flow_metrics,
    perturb_flow,
)
from .losses import (
    LossValue,
    ce_loss,
    combined_loss,
    dice_loss,
    loss_gradient,
    shape_loss_2d,
    shape_loss_3d,
)
from .metrics import boundary_distance, dice_score, segmentation_report
from .operators import div_backward, grad_central, grad_central_adjoint, grad_forward
from .refine import RefineTrace, refine
from .synth import corrupt, kmeans_features, synthesize

__version__ = "0.1.0"

__all__ = [
    "ContourFlow",
    "ContourFlowRefiner",
    "LossValue",
    "RefineTrace",
    "boundary_distance",
    "boundary_pixels",
    "ce_loss",
    "combined_loss",
    "contour_flow",
    "corrupt",
    "dice_loss",
    "dice_score",
    "div_backward",
    "flow_l2_loss",
    "flow_metrics",
    "grad_central",
    "grad_central_adjoint",
    "grad_forward",
    "kmeans_features",
    "loss_gradient",
    "map_sigmoid",
    "perturb_flow",
    "refine",
    "segmentation_report",
    "shape_loss_2d",
    "shape_loss_3d",
    "signed_distance",
    "stable_sigmoid",
    "synthesize",
    "threshold",
    "__version__",
]
