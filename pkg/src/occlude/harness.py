"""End-to-end drivers: a toy multi-step denoising loop and a pixel compositor.

The toy denoiser has no learned weights. Each layer attends the current
latent to every object's prompt, renders the per-object results in
front-to-back order and blends the current latent toward the rendered one.
The compositor uses literal RGB colors as latents so that occlusion and
opacity effects can be read straight off the image.
"""

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted, check_scalar

from .attention import cross_attention, embed_prompt, subject_attention_map, subject_token_index
from .exceptions import ConfigError, SceneValidationError
from .geometry import box_only_transmittance_map, normalize_attention_map, rasterize_bbox, transmittance_map
from .graph import OcclusionGraph, ordered_objects, validate_graph
from .render import DEFAULT_EPSILON, latent_render, opacity_to_density
from .schedule import DensitySchedule, ScheduleKind, sigma_at


def _require_valid(scene):
    report = validate_graph(scene)
    if not report.ok:
        raise SceneValidationError([(issue.path, issue.message) for issue in report])


def object_transmittance(obj, box_mask, weights=None, shaping=True):
    """Transmittance map for one object at the resolution of ``box_mask``.

    Objects with a blank prompt have no subject token and keep the raw box.
    """
    if not shaping or weights is None or (not obj.prompt_tokens and obj.subject_index is None):
        return box_only_transmittance_map(box_mask)
    h, w = box_mask.shape
    raw = subject_attention_map(weights, subject_token_index(obj), w, h)
    return transmittance_map(normalize_attention_map(raw), box_mask)


@dataclass
class StepTrace:
    t: int
    layers: list = field(default_factory=list)
    latent_norm: float = 0.0

    def as_dict(self):
        return {"t": self.t, "layers": self.layers, "latent_norm": self.latent_norm}


class ToyDenoiser(BaseEstimator):
    """Seeded multi-layer, multi-step loop built from latent rendering layers.

    Parameters
    ----------
    layers : int, default=2
        Number of attention layers per step.
    height, width, channels : int
        Latent grid shape.
    steps : int, default=25
        Number of denoising steps T; steps run ``t = T, ..., 1``.
    seed : int, default=0
        Seeds the initial latent.
    blend : float in (0, 1], default=1.0
        Per-layer update ``latent <- (1 - blend) * latent + blend * rendered``.
    attention_shaping : bool, default=True
        Shape each box mask by the object's subject-token attention.
    epsilon : float, default=1e-8
        Coverage threshold passed to the renderer.
    schedule_kind : str or dict, default="inverse_proportional"
        One kind for every object, or a mapping from object id to kind.
    layer_enabled : sequence of bool or None
        Per-layer switch; a disabled layer runs plain cross-attention over
        the concatenation of all object prompts. None enables every layer.

    Attributes
    ----------
    order_ : list of str
        Front-to-back object ids.
    schedules_ : list of DensitySchedule
    box_masks_ : ndarray (N, height, width)
    """

    def __init__(self, layers=2, height=8, width=8, channels=8, steps=25, seed=0, blend=1.0,
                 attention_shaping=True, epsilon=DEFAULT_EPSILON,
                 schedule_kind="inverse_proportional", layer_enabled=None):
        self.layers = layers
        self.height = height
        self.width = width
        self.channels = channels
        self.steps = steps
        self.seed = seed
        self.blend = blend
        self.attention_shaping = attention_shaping
        self.epsilon = epsilon
        self.schedule_kind = schedule_kind
        self.layer_enabled = layer_enabled

    def _check_params(self):
        for name in ("layers", "height", "width", "channels", "steps"):
            check_scalar(getattr(self, name), name, (int, np.integer), min_val=1)
        check_scalar(self.blend, "blend", (int, float), min_val=0.0, max_val=1.0,
                     include_boundaries="right")
        check_scalar(self.epsilon, "epsilon", (int, float), min_val=0.0, include_boundaries="neither")
        if self.layer_enabled is not None and len(self.layer_enabled) != self.layers:
            raise ConfigError(f"layer_enabled has {len(self.layer_enabled)} entries for {self.layers} layers")

    def _kind_for(self, obj):
        if isinstance(self.schedule_kind, dict):
            return self.schedule_kind.get(obj.id, ScheduleKind.INVERSE_PROPORTIONAL)
        return self.schedule_kind

    def fit(self, scene: OcclusionGraph, y=None):
        self._check_params()
        _require_valid(scene)
        objects = ordered_objects(scene)
        self.order_ = [obj.id for obj in objects]
        self.objects_ = objects
        self.schedules_ = [
            DensitySchedule(opacity_to_density(obj.opacity), self.steps, self._kind_for(obj))
            for obj in objects
        ]
        self.box_masks_ = np.stack([rasterize_bbox(obj.bbox, self.width, self.height) for obj in objects])
        self.embeddings_ = [embed_prompt(obj.prompt_tokens, obj.embedding_seed, self.channels) for obj in objects]
        # Plain cross-attention sees the whole prompt, in scene input order.
        self.full_prompt_ = np.concatenate(
            [embed_prompt(obj.prompt_tokens, obj.embedding_seed, self.channels) for obj in scene.objects]
        )
        return self

    def initial_latent(self):
        rng = np.random.default_rng(self.seed)
        return rng.standard_normal((self.height, self.width, self.channels))

    def _render_layer(self, latent, t):
        attended, masks = [], []
        for obj, prompt, box in zip(self.objects_, self.embeddings_, self.box_masks_):
            out, weights = cross_attention(latent, prompt)
            attended.append(out)
            masks.append(object_transmittance(obj, box, weights, self.attention_shaping))
        sigmas = [sigma_at(s, t) for s in self.schedules_]
        rendered, diag = latent_render(attended, masks, sigmas, fallback=latent, epsilon=self.epsilon)
        info = {"rendered": True, "sigmas": sigmas}
        info.update(diag.summary())
        return rendered, info

    def generate(self, latent=None):
        """Run ``t = T, ..., 1``; return the final latent and one trace per step."""
        check_is_fitted(self, "order_")
        latent = self.initial_latent() if latent is None else np.array(latent, dtype=np.float64)
        enabled = list(self.layer_enabled) if self.layer_enabled is not None else [True] * self.layers
        traces = []
        for t in range(self.steps, 0, -1):
            trace = StepTrace(t)
            for layer in range(self.layers):
                if enabled[layer]:
                    rendered, info = self._render_layer(latent, t)
                else:
                    rendered, _ = cross_attention(latent, self.full_prompt_)
                    info = {"rendered": False}
                info["layer"] = layer
                if self.blend == 1.0:
                    latent = rendered
                else:
                    latent = (1.0 - self.blend) * latent + self.blend * rendered
                trace.layers.append(info)
            trace.latent_norm = float(np.linalg.norm(latent))
            if not (np.all(np.isfinite(latent)) and _finite_trace(trace)):
                raise FloatingPointError(f"non-finite value at step t={t}")
            traces.append(trace)
        return latent, traces


def _finite_trace(trace):
    values = [trace.latent_norm]
    for info in trace.layers:
        for v in info.values():
            if isinstance(v, list):
                values.extend(v)
            elif isinstance(v, float):
                values.append(v)
    return bool(np.all(np.isfinite(values)))


def run_generation(scene, **params):
    """Fit a ``ToyDenoiser`` with ``params`` on ``scene`` and run it."""
    return ToyDenoiser(**params).fit(scene).generate()


@dataclass
class CompositeResult:
    image: np.ndarray  # (H, W, 3) in [0, 1]
    order: list
    diagnostics: object

    def weight_share(self, object_id):
        """``w_k / S`` for one object (zero where nothing is visible)."""
        return self.diagnostics.shares()[self.order.index(object_id)]


def composite_pixels(scene, width, height, attention_shaping=False, background=(0.0, 0.0, 0.0),
                     epsilon=DEFAULT_EPSILON, seed=0, channels=8, step=None, steps=None):
    """Render object colors through the occlusion graph.

    Each object contributes a constant-color grid masked by its box. With
    ``attention_shaping`` the box is shaped by toy attention computed on a
    seeded latent; otherwise the normalized map is taken to be all ones.
    Densities are ``-ln(1 - opacity)``, or the inverse-proportional schedule
    at ``step`` of ``steps`` when both are given.
    """
    _require_valid(scene)
    objects = ordered_objects(scene)
    missing = [obj.id for obj in objects if obj.color is None]
    if missing:
        raise ConfigError(f"objects without a color cannot be composited: {missing}")

    colors, masks = [], []
    shaping_latent = None
    if attention_shaping:
        shaping_latent = np.random.default_rng(seed).standard_normal((height, width, channels))
    for obj in objects:
        box = rasterize_bbox(obj.bbox, width, height)
        weights = None
        if shaping_latent is not None:
            _, weights = cross_attention(shaping_latent, embed_prompt(obj.prompt_tokens, obj.embedding_seed, channels))
        masks.append(object_transmittance(obj, box, weights, attention_shaping))
        colors.append(np.broadcast_to(np.asarray(obj.color, dtype=np.float64), (height, width, 3)))

    densities = [opacity_to_density(obj.opacity) for obj in objects]
    if step is not None:
        sigmas = [sigma_at(DensitySchedule(d, steps), step) for d in densities]
    else:
        sigmas = densities
    fallback = np.broadcast_to(np.asarray(background, dtype=np.float64), (height, width, 3))
    image, diag = latent_render(colors, masks, sigmas, fallback=fallback, epsilon=epsilon)
    return CompositeResult(np.clip(image, 0.0, 1.0), [obj.id for obj in objects], diag)


def opacity_sweep(scene, object_id, alphas, width, height, **kwargs):
    """One composite per opacity of ``object_id``; everything else fixed."""
    base = scene.get(object_id)
    return [
        composite_pixels(scene.with_object(base.replace(opacity=float(a))), width, height, **kwargs)
        for a in alphas
    ]
