"""Elementwise field utilities: thresholding and the stable sigmoid map."""
from __future__ import annotations

import numpy as np

from ._validation import as_scalar_field, check_in_range, check_positive

# Smallest/largest doubles strictly inside (0, 1); sigmoid outputs are clipped
# here so downstream logs never see 0 or 1.
_SIG_LO = np.finfo(np.float64).tiny
_SIG_HI = 1.0 - np.finfo(np.float64).epsneg


def threshold(u, t: float) -> np.ndarray:
    """Binarize a field: 1 where u >= t, else 0.

    Parameters
    ----------
    u : 2D or 3D array
    t : threshold in [0, 1]
    """
    u = as_scalar_field(u, "u")
    t = check_in_range(t, 0.0, 1.0, "threshold")
    return (u >= t).astype(np.uint8)


def stable_sigmoid(x: np.ndarray) -> np.ndarray:
    """1 / (1 + exp(-x)) computed without overflow for any finite x.

    Uses the positive/negative branch split and clips into the open
    interval (0, 1).
    """
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return np.clip(out, _SIG_LO, _SIG_HI)


def map_sigmoid(o, eps: float) -> np.ndarray:
    """Map a feature field onto soft foreground probabilities sigmoid(o / eps).

    All outputs are strictly inside (0, 1); eps must be positive.
    """
    o = as_scalar_field(o, "o")
    eps = check_positive(eps, "eps")
    with np.errstate(over="ignore"):  # inf argument saturates cleanly
        return stable_sigmoid(o / eps)
