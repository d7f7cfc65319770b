"""Occlusion-ordered latent rendering of per-object feature layers."""

from .attention import cross_attention, embed_prompt, subject_attention_map, subject_token_index
from .exceptions import (
    ConfigError,
    CycleError,
    DegenerateBoxError,
    DimensionMismatchError,
    EmptyPromptError,
    OccludeError,
    RangeError,
    SceneParseError,
    SceneValidationError,
)
from .geometry import box_only_transmittance_map, normalize_attention_map, rasterize_bbox, transmittance_map
from .graph import OcclusionGraph, SceneObject, ValidationReport, topological_order, validate_graph
from .harness import CompositeResult, StepTrace, ToyDenoiser, composite_pixels, opacity_sweep, run_generation
from .oracle import RaySamples, equivalence_check, nerf_quadrature, piecewise_constant_integral
from .render import (
    LatentRenderer,
    RenderDiagnostics,
    accumulated_transmittance,
    density_to_opacity,
    latent_render,
    latent_render_unnormalized,
    opacity_to_density,
    render_weights,
)
from .scene import SceneFile, parse_scene, scene_from_dict, scene_to_dict
from .schedule import DensitySchedule, ScheduleKind, schedule_table, sigma_at

__version__ = "0.1.0"
