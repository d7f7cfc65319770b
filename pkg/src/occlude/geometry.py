"""Box rasterization and per-object transmittance maps."""

import numpy as np

from ._validation import check_same_shape, check_scalar_map
from .exceptions import DegenerateBoxError


def rasterize_bbox(bbox, width, height):
    """Rasterize a normalized ``(x0, y0, x1, y1)`` box to a 0/1 mask of shape (height, width).

    A cell is inside when its center lies in the half-open box
    ``[x0, x1) x [y0, y1)``, so adjacent boxes sharing an edge never both
    cover a cell.
    """
    width, height = int(width), int(height)
    if width < 1 or height < 1:
        raise ValueError(f"width and height must be >= 1, got {width}x{height}")
    x0, y0, x1, y1 = (float(v) for v in bbox)
    cx = (np.arange(width) + 0.5) / width
    cy = (np.arange(height) + 0.5) / height
    cols = (cx >= x0) & (cx < x1)
    rows = (cy >= y0) & (cy < y1)
    mask = np.outer(rows, cols).astype(np.float64)
    if not mask.any():
        raise DegenerateBoxError(f"bbox {tuple(bbox)} covers no cell center at {width}x{height}")
    return mask


def normalize_attention_map(raw):
    """Min-max rescale to [0, 1]; a constant map becomes all ones."""
    raw = check_scalar_map(raw, "attention map")
    lo, hi = raw.min(), raw.max()
    if hi == lo:
        return np.ones_like(raw)
    return (raw - lo) / (hi - lo)


def transmittance_map(norm_attn, box_mask):
    """Shape a box mask by a normalized attention map (element-wise product)."""
    norm_attn = check_scalar_map(norm_attn, "normalized attention map", unit_interval=True)
    box_mask = check_scalar_map(box_mask, "box mask", unit_interval=True)
    check_same_shape(norm_attn, box_mask, ("attention map", "box mask"))
    return norm_attn * box_mask


def box_only_transmittance_map(box_mask):
    # Ablation path: no attention shaping, the box is the transmittance map.
    return check_scalar_map(box_mask, "box mask", unit_interval=True).copy()
