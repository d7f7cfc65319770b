"""Input validation helpers for grids, maps and stacks of them."""

import numpy as np

from .exceptions import DimensionMismatchError


def check_scalar_map(values, name="map", unit_interval=False):
    """Return ``values`` as a finite float64 H x W array."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionMismatchError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    if unit_interval and (arr.min() < 0.0 or arr.max() > 1.0):
        raise ValueError(f"{name} values must lie in [0, 1]")
    return arr


def check_feature_grid(values, name="grid"):
    """Return ``values`` as a finite float64 H x W x C array."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 3 or min(arr.shape) < 1:
        raise DimensionMismatchError(f"{name} must be a non-empty H x W x C array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_stack(values, ndim, name):
    """Stack a sequence of equally shaped arrays along a new leading axis.

    ``ndim`` is the dimensionality of each member (2 for maps, 3 for grids).
    """
    if isinstance(values, np.ndarray) and values.ndim == ndim + 1:
        arr = values.astype(np.float64, copy=False)
    else:
        members = [np.asarray(v, dtype=np.float64) for v in values]
        if not members:
            raise DimensionMismatchError(f"{name} must contain at least one entry")
        shapes = {m.shape for m in members}
        if len(shapes) != 1:
            raise DimensionMismatchError(f"{name} entries differ in shape: {sorted(shapes)}")
        arr = np.stack(members)
    if arr.ndim != ndim + 1 or arr.shape[0] < 1:
        raise DimensionMismatchError(f"{name} must be a stack of {ndim}-D arrays, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_same_shape(a, b, names=("a", "b")):
    if a.shape != b.shape:
        raise DimensionMismatchError(f"{names[0]} shape {a.shape} != {names[1]} shape {b.shape}")
