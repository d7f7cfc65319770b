"""JSON scene files.

A scene file looks like::

    {
      "canvas": {"width": 64, "height": 64},
      "objects": [
        {"id": "sky", "prompt": [], "bbox": [0, 0, 1, 1], "opacity": 0.8, "color": [1, 1, 1]},
        {"id": "cat", "prompt": ["a", "cat"], "subject_index": 1, "bbox": [0.1, 0.2, 0.6, 0.9]}
      ],
      "occlusions": [["cat", "sky"]],
      "schedule": {"kind": "inverse_proportional", "steps": 25},
      "render": {"attention_shaping": true, "epsilon": 1e-8}
    }

Omitted fields take defaults (opacity 0.8, 25 steps, attention shaping on).
"""

import json
import math
from dataclasses import dataclass

from .exceptions import SceneParseError, SceneValidationError
from .graph import OcclusionGraph, SceneObject, validate_graph
from .render import DEFAULT_EPSILON
from .schedule import ScheduleKind

DEFAULT_OPACITY = 0.8
DEFAULT_STEPS = 25


@dataclass(frozen=True)
class SceneFile:
    width: int
    height: int
    graph: OcclusionGraph
    schedule_kind: str = ScheduleKind.INVERSE_PROPORTIONAL.value
    steps: int = DEFAULT_STEPS
    attention_shaping: bool = True
    epsilon: float = DEFAULT_EPSILON


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def _is_num(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _parse_object(raw, path, issues):
    if not isinstance(raw, dict):
        issues.append((path, "object entry must be a JSON object"))
        return None
    oid = raw.get("id")
    if not isinstance(oid, str) or not oid:
        issues.append((f"{path}.id", "id must be a non-empty string"))
        oid = f"<{path}>"

    prompt = raw.get("prompt", [])
    if isinstance(prompt, str):
        prompt = prompt.split()
    if not (isinstance(prompt, list) and all(isinstance(t, str) for t in prompt)):
        issues.append((f"{path}.prompt", "prompt must be a list of token strings"))
        prompt = []

    subject_index = raw.get("subject_index")
    if subject_index is not None and not _is_int(subject_index):
        issues.append((f"{path}.subject_index", "subject_index must be an integer"))
        subject_index = None

    bbox = raw.get("bbox")
    if not (isinstance(bbox, list) and len(bbox) == 4 and all(_is_num(v) for v in bbox)):
        issues.append((f"{path}.bbox", "bbox must be a list of four numbers [x0, y0, x1, y1]"))
        bbox = (0.0, 0.0, 1.0, 1.0)

    opacity = raw.get("opacity", DEFAULT_OPACITY)
    if not _is_num(opacity):
        issues.append((f"{path}.opacity", "opacity must be a number in [0, 1)"))
        opacity = DEFAULT_OPACITY

    color = raw.get("color")
    if color is not None and not (isinstance(color, list) and len(color) == 3 and all(_is_num(v) for v in color)):
        issues.append((f"{path}.color", "color must be a list of three numbers in [0, 1]"))
        color = None

    seed = raw.get("embedding_seed", 0)
    if not _is_int(seed):
        issues.append((f"{path}.embedding_seed", "embedding_seed must be an integer"))
        seed = 0

    return SceneObject(
        id=oid,
        prompt_tokens=prompt,
        bbox=bbox,
        opacity=float(opacity),
        subject_index=subject_index,
        color=color,
        embedding_seed=seed,
    )


def scene_from_dict(data):
    """Build and validate a ``SceneFile``; raise with every violation found."""
    if not isinstance(data, dict):
        raise SceneParseError("scene must be a JSON object")
    issues = []

    canvas = data.get("canvas", {})
    width, height = 0, 0
    if not isinstance(canvas, dict):
        issues.append(("canvas", "canvas must be an object with width and height"))
    else:
        width, height = canvas.get("width"), canvas.get("height")
        for name, value in (("width", width), ("height", height)):
            if not (_is_int(value) and value >= 1):
                issues.append((f"canvas.{name}", f"{name} must be an integer >= 1"))

    raw_objects = data.get("objects")
    objects = []
    if not isinstance(raw_objects, list) or not raw_objects:
        issues.append(("objects", "objects must be a non-empty list"))
    else:
        for i, raw in enumerate(raw_objects):
            obj = _parse_object(raw, f"objects[{i}]", issues)
            if obj is not None:
                objects.append(obj)

    raw_edges = data.get("occlusions", [])
    edges = []
    if not isinstance(raw_edges, list):
        issues.append(("occlusions", "occlusions must be a list of [occluder, occluded] pairs"))
    else:
        for k, edge in enumerate(raw_edges):
            if isinstance(edge, list) and len(edge) == 2 and all(isinstance(e, str) for e in edge):
                edges.append((edge[0], edge[1]))
            else:
                issues.append((f"occlusions[{k}]", "each occlusion must be a pair of object ids"))

    schedule = data.get("schedule", {})
    kind, steps = ScheduleKind.INVERSE_PROPORTIONAL.value, DEFAULT_STEPS
    if not isinstance(schedule, dict):
        issues.append(("schedule", "schedule must be an object"))
    else:
        kind = schedule.get("kind", kind)
        if kind not in [k.value for k in ScheduleKind]:
            issues.append(("schedule.kind", f"unknown schedule kind {kind!r}"))
        steps = schedule.get("steps", steps)
        if not (_is_int(steps) and steps >= 1):
            issues.append(("schedule.steps", "steps must be an integer >= 1"))

    render = data.get("render", {})
    shaping, epsilon = True, DEFAULT_EPSILON
    if not isinstance(render, dict):
        issues.append(("render", "render must be an object"))
    else:
        shaping = render.get("attention_shaping", shaping)
        if not isinstance(shaping, bool):
            issues.append(("render.attention_shaping", "attention_shaping must be true or false"))
        epsilon = render.get("epsilon", epsilon)
        if not (_is_num(epsilon) and epsilon > 0):
            issues.append(("render.epsilon", "epsilon must be a number > 0"))

    graph = OcclusionGraph(objects, edges)
    for issue in validate_graph(graph):
        message = issue.message
        if issue.code == "opacity":
            message += " (opacity 1 is a limit, not an admissible value)"
        issues.append((issue.path, message))

    if issues:
        raise SceneValidationError(issues)
    return SceneFile(
        width=width,
        height=height,
        graph=graph,
        schedule_kind=kind,
        steps=steps,
        attention_shaping=shaping,
        epsilon=float(epsilon),
    )


def parse_scene(path):
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as exc:
        raise SceneParseError(f"{path}: malformed JSON: {exc}") from exc
    return scene_from_dict(data)


def scene_to_dict(scene):
    objects = []
    for obj in scene.graph.objects:
        entry = {
            "id": obj.id,
            "prompt": list(obj.prompt_tokens),
            "bbox": list(obj.bbox),
            "opacity": obj.opacity,
            "embedding_seed": obj.embedding_seed,
        }
        if obj.subject_index is not None:
            entry["subject_index"] = obj.subject_index
        if obj.color is not None:
            entry["color"] = list(obj.color)
        objects.append(entry)
    return {
        "canvas": {"width": scene.width, "height": scene.height},
        "objects": objects,
        "occlusions": [list(e) for e in scene.graph.edges],
        "schedule": {"kind": scene.schedule_kind, "steps": scene.steps},
        "render": {"attention_shaping": scene.attention_shaping, "epsilon": scene.epsilon},
    }


def dump_scene(scene, path):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(scene_to_dict(scene), f, indent=2)
        f.write("\n")
