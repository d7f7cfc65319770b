"""Reference volume rendering along a single ray.

These are deliberately written as scalar loops over Python floats so they
share no code path with the vectorized renderer they are used to check.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatchError, RangeError
from .render import latent_render_unnormalized


@dataclass
class RaySamples:
    sigmas: np.ndarray  # (N,)
    deltas: np.ndarray  # (N,)
    colors: np.ndarray  # (N, C)

    def __post_init__(self):
        self.sigmas = np.asarray(self.sigmas, dtype=np.float64).reshape(-1)
        self.deltas = np.asarray(self.deltas, dtype=np.float64).reshape(-1)
        colors = np.asarray(self.colors, dtype=np.float64)
        if colors.ndim == 1:
            colors = colors[:, None]
        self.colors = colors
        n = self.sigmas.shape[0]
        if self.deltas.shape[0] != n or self.colors.shape[0] != n:
            raise DimensionMismatchError(
                f"sigmas, deltas and colors disagree in length: "
                f"{n}, {self.deltas.shape[0]}, {self.colors.shape[0]}"
            )
        if np.any(self.sigmas < 0.0):
            raise RangeError("volume densities must be non-negative")
        if np.any(self.deltas <= 0.0):
            raise RangeError("sample spacings must be positive")


def nerf_quadrature(samples):
    """Quadrature estimate ``sum_i T_i (1 - exp(-sigma_i delta_i)) c_i``."""
    channels = samples.colors.shape[1]
    out = [0.0] * channels
    depth = 0.0
    for sigma, delta, color in zip(samples.sigmas.tolist(), samples.deltas.tolist(), samples.colors.tolist()):
        t = math.exp(-depth)
        weight = t * (1.0 - math.exp(-sigma * delta))
        for c in range(channels):
            out[c] += weight * color[c]
        depth += sigma * delta
    return np.array(out)


def piecewise_constant_integral(samples):
    """Closed-form volume rendering integral for a medium constant on each interval.

    On interval ``i`` of length ``delta_i`` the integrand ``T(t) sigma_i c_i``
    integrates to ``(T(start_i) - T(end_i)) c_i``; transmittance at interval
    boundaries is carried as a running product of per-interval factors.
    """
    channels = samples.colors.shape[1]
    out = [0.0] * channels
    t_start = 1.0
    for sigma, delta, color in zip(samples.sigmas.tolist(), samples.deltas.tolist(), samples.colors.tolist()):
        t_end = t_start * math.exp(-sigma * delta)
        absorbed = t_start - t_end
        for c in range(channels):
            out[c] += absorbed * color[c]
        t_start = t_end
    return np.array(out)


def accumulated_alpha(samples):
    """Total opacity along the ray, ``sum_i T_i (1 - exp(-sigma_i delta_i))``."""
    ones = RaySamples(samples.sigmas, samples.deltas, np.ones((len(samples.sigmas), 1)))
    return float(nerf_quadrature(ones)[0])


@dataclass
class EquivalenceReport:
    max_abs_deviation: float
    tolerance: float
    pixels: int

    @property
    def ok(self):
        return self.max_abs_deviation <= self.tolerance


def equivalence_check(latents, sigmas, masks=None, tolerance=1e-12):
    """Compare unnormalized latent rendering against per-pixel quadrature with unit spacing.

    ``masks`` must be all ones when given; the identity only holds there.
    """
    latents = np.asarray(latents, dtype=np.float64)
    n, h, w, _ = latents.shape
    if masks is None:
        masks = np.ones((n, h, w))
    masks = np.asarray(masks, dtype=np.float64)
    if not np.all(masks == 1.0):
        raise ValueError("equivalence_check requires all-ones masks")
    rendered = latent_render_unnormalized(latents, masks, sigmas)
    deltas = np.ones(n)
    worst = 0.0
    for r in range(h):
        for c in range(w):
            ref = nerf_quadrature(RaySamples(sigmas, deltas, latents[:, r, c, :]))
            worst = max(worst, float(np.max(np.abs(rendered[r, c] - ref))))
    return EquivalenceReport(worst, tolerance, h * w)
