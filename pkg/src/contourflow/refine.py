"""Primal-dual refinement of a segmentation feature under a tangent-flow
alignment constraint.

Each sweep alternates a closed-form primal step with a dual ascent step:

    u <- sigmoid((o - div(q F)) / eps)
    q <- q - tau * <grad u, F>      (per pixel, on defined flow pixels)

starting from q = 0. The gradient/divergence pair used here is the exact
adjoint pair from :mod:`contourflow.operators`; swapping either operator for
a non-adjoint variant silently changes the functional being optimized.

The first sweep is therefore exactly ``map_sigmoid(o, eps)``, and a flow that
is undefined everywhere leaves every sweep equal to it.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import as_scalar_field, check_positive, check_same_shape
from .fields import map_sigmoid
from .flow import ContourFlow
from .operators import div_backward, grad_forward

_ENTROPY_CLAMP = 1e-7


@dataclass
class RefineTrace:
    """Per-sweep diagnostics; entry t-1 describes the state after sweep t."""

    orthogonality: list = field(default_factory=list)  # mean |<grad u, F>|, defined pixels
    energy_data: list = field(default_factory=list)  # <-o, u>
    energy_entropy: list = field(default_factory=list)  # eps * H(u)
    dual_update: list = field(default_factory=list)  # mean |q step|, defined pixels

    def to_dict(self) -> dict:
        return {
            "orthogonality": list(self.orthogonality),
            "energy_data": list(self.energy_data),
            "energy_entropy": list(self.energy_entropy),
            "dual_update": list(self.dual_update),
        }

    def __len__(self) -> int:
        return len(self.orthogonality)


def _entropy(u: np.ndarray) -> float:
    c = np.clip(u, _ENTROPY_CLAMP, 1.0 - _ENTROPY_CLAMP)
    return float((c * np.log(c) + (1.0 - c) * np.log(1.0 - c)).sum())


def refine(o, flow: ContourFlow, eps: float = 10.0, tau: float = 10.0,
           iters: int = 100, record_trace: bool = False):
    """Run the alternating scheme for a fixed number of sweeps.

    Parameters
    ----------
    o : 2D feature field; larger values favor foreground
    flow : tangent flow the refined segmentation must align with
    eps : entropy weight of the primal step, > 0
    tau : dual ascent rate, > 0
    iters : number of sweeps, >= 1
    record_trace : collect per-sweep diagnostics

    Returns
    -------
    (u, trace) : the refined soft segmentation, strictly inside (0, 1), and a
        :class:`RefineTrace` or None.
    """
    o = as_scalar_field(o, "o", ndim=2)
    check_same_shape(o, flow.defined_mask, "o", "flow")
    eps = check_positive(eps, "eps")
    tau = check_positive(tau, "tau")
    iters = int(iters)
    if iters < 1:
        raise ValueError(f"iters must be >= 1, got {iters}")

    defined = flow.defined_mask != 0
    n_defined = int(defined.sum())
    q = np.zeros_like(o)
    trace = RefineTrace() if record_trace else None
    u = None
    for t in range(1, iters + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            arg = o - div_backward(q[..., None] * flow.field)
        if not np.isfinite(arg).all():
            raise FloatingPointError(f"non-finite primal argument at sweep {t}")
        u = map_sigmoid(arg, eps)
        dot = (grad_forward(u) * flow.field).sum(axis=-1)
        with np.errstate(over="ignore", invalid="ignore"):
            step = tau * dot * defined
        if trace is not None:
            res = float(np.abs(dot)[defined].mean()) if n_defined else 0.0
            upd = float(np.abs(step)[defined].mean()) if n_defined else 0.0
            trace.orthogonality.append(res)
            trace.energy_data.append(float(-(o * u).sum()))
            trace.energy_entropy.append(eps * _entropy(u))
            trace.dual_update.append(upd)
        q = q - step
        if not np.isfinite(q).all():
            raise FloatingPointError(f"non-finite dual variable at sweep {t}")
    return u, trace
