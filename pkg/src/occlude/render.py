"""Latent rendering: volume-rendering-style integration of stacked object latents.

Objects are indexed front to back. For pixel ``p`` and object ``i``::

    T_i(p) = exp(-sum_{j<i} M_j(p) * sigma_j)
    w_i(p) = T_i(p) * (1 - exp(-sigma_i)) * M_i(p)
    S(p)   = sum_i w_i(p)
    out(p) = sum_i (w_i(p) / S(p)) * R_i(p)

The sample spacing of classic quadrature is dropped (orthographic camera).
Where ``S(p) <= epsilon`` no object is visible and ``out(p)`` is the
caller's fallback latent.
"""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted, check_scalar

from ._validation import check_feature_grid, check_stack
from .exceptions import DimensionMismatchError, RangeError

DEFAULT_EPSILON = 1e-8


def opacity_to_density(alpha):
    """Semantic density ``D = -ln(1 - alpha)`` for an opacity in [0, 1)."""
    alpha = float(alpha)
    if not 0.0 <= alpha < 1.0:
        raise RangeError(f"opacity must lie in [0, 1), got {alpha!r}")
    return -np.log1p(-alpha)


def density_to_opacity(density):
    density = float(density)
    if not density >= 0.0:
        raise RangeError(f"density must be >= 0, got {density!r}")
    return -np.expm1(-density)


def _check_sigmas(sigmas, n):
    sigmas = np.asarray(sigmas, dtype=np.float64).reshape(-1)
    if sigmas.shape[0] != n:
        raise DimensionMismatchError(f"expected {n} densities, got {sigmas.shape[0]}")
    if not np.all(sigmas >= 0.0):
        raise RangeError(f"densities must be non-negative, got {sigmas.tolist()}")
    return sigmas


def accumulated_transmittance(masks, sigmas):
    """Per-object visibility maps, shape (N, H, W); the first is all ones."""
    masks = check_stack(masks, 2, "masks")
    sigmas = _check_sigmas(sigmas, masks.shape[0])
    optical = masks * sigmas[:, None, None]
    depth = np.zeros_like(masks)
    # Fixed front-to-back accumulation order.
    np.cumsum(optical[:-1], axis=0, out=depth[1:])
    return np.exp(-depth)


@dataclass
class RenderDiagnostics:
    transmittance: np.ndarray  # (N, H, W) accumulated T_i
    weights: np.ndarray  # (N, H, W) w_i
    normalizer: np.ndarray  # (H, W) S
    covered: np.ndarray  # (H, W) bool, S > epsilon

    def shares(self):
        """Per-object weight share ``w_i / S``; zero where nothing is visible."""
        out = np.zeros_like(self.weights)
        np.divide(self.weights, self.normalizer, out=out, where=self.covered[None])
        return out

    def summary(self):
        return {
            "objects": int(self.weights.shape[0]),
            "mean_weights": [float(v) for v in self.weights.mean(axis=(1, 2))],
            "normalizer_min": float(self.normalizer.min()),
            "normalizer_mean": float(self.normalizer.mean()),
            "covered_fraction": float(self.covered.mean()),
        }


def render_weights(masks, sigmas, epsilon=DEFAULT_EPSILON):
    """Compute T_i, w_i and S without touching any latents."""
    masks = check_stack(masks, 2, "masks")
    sigmas = _check_sigmas(sigmas, masks.shape[0])
    transmittance = accumulated_transmittance(masks, sigmas)
    opacity = 1.0 - np.exp(-sigmas)
    weights = transmittance * opacity[:, None, None] * masks
    normalizer = np.zeros(masks.shape[1:])
    for w in weights:
        normalizer += w
    return RenderDiagnostics(transmittance, weights, normalizer, normalizer > epsilon)


def _check_latents(latents, masks_shape):
    latents = check_stack(latents, 3, "latents")
    if latents.shape[:3] != masks_shape:
        raise DimensionMismatchError(
            f"latents shape {latents.shape[:3]} does not match masks shape {masks_shape}"
        )
    return latents


def _weighted_sum(weights, latents):
    out = np.zeros(latents.shape[1:])
    for w, latent in zip(weights, latents):
        out += w[..., None] * latent
    return out


def _integrate(latents, diag, fallback):
    out = _weighted_sum(diag.shares(), latents)
    out[~diag.covered] = fallback[~diag.covered]
    return out


def latent_render(latents, masks, sigmas, fallback=None, epsilon=DEFAULT_EPSILON):
    """Normalized latent rendering.

    Parameters
    ----------
    latents : array (N, H, W, C) or sequence of N (H, W, C) grids, front to back.
    masks : array (N, H, W) or sequence of transmittance maps in [0, 1].
    sigmas : N non-negative semantic densities.
    fallback : (H, W, C) grid used where no object is visible. Defaults to zeros.
    epsilon : coverage threshold on the normalizer.

    Returns
    -------
    output : (H, W, C) array
    diagnostics : RenderDiagnostics
    """
    diag = render_weights(masks, sigmas, epsilon)
    latents = _check_latents(latents, diag.weights.shape)
    if fallback is None:
        fallback = np.zeros(latents.shape[1:])
    else:
        fallback = check_feature_grid(fallback, "fallback")
        if fallback.shape != latents.shape[1:]:
            raise DimensionMismatchError(
                f"fallback shape {fallback.shape} does not match latent shape {latents.shape[1:]}"
            )
    return _integrate(latents, diag, fallback), diag


def latent_render_unnormalized(latents, masks, sigmas):
    """``sum_i w_i * R_i`` with no normalization and no fallback."""
    diag = render_weights(masks, sigmas)
    return _weighted_sum(diag.weights, _check_latents(latents, diag.weights.shape))


class LatentRenderer(BaseEstimator):
    """Estimator wrapper: fit on masks and densities, transform stacks of latents.

    The weights only depend on the masks and densities, so one fitted
    renderer can integrate several latent stacks (e.g. one per layer that
    shares a resolution).

    Parameters
    ----------
    epsilon : float, default=1e-8
        Pixels whose normalizer is at or below this value take the fallback.
    normalize : bool, default=True
        If False, ``transform`` returns the raw weighted sum.

    Attributes
    ----------
    transmittance_, weights_, normalizer_ : ndarray
        Diagnostics of the fitted configuration.
    n_objects_ : int
    """

    def __init__(self, epsilon=DEFAULT_EPSILON, normalize=True):
        self.epsilon = epsilon
        self.normalize = normalize

    def fit(self, masks, sigmas):
        check_scalar(self.epsilon, "epsilon", (int, float), min_val=0.0, include_boundaries="neither")
        self.diagnostics_ = render_weights(masks, sigmas, self.epsilon)
        self.transmittance_ = self.diagnostics_.transmittance
        self.weights_ = self.diagnostics_.weights
        self.normalizer_ = self.diagnostics_.normalizer
        self.n_objects_ = self.weights_.shape[0]
        return self

    def transform(self, latents, fallback=None):
        check_is_fitted(self, "diagnostics_")
        latents = _check_latents(latents, self.weights_.shape)
        if not self.normalize:
            return _weighted_sum(self.weights_, latents)
        if fallback is None:
            fallback = np.zeros(latents.shape[1:])
        else:
            fallback = check_feature_grid(fallback, "fallback")
        return _integrate(latents, self.diagnostics_, fallback)
