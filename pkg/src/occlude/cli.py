"""Command line interface.

Usage::

    occlude validate --scene scene.json
    occlude sort     --scene scene.json
    occlude schedule --scene scene.json [--format csv|json]
    occlude maps     --scene scene.json --out maps/ [--step 1]
    occlude render   --scene scene.json --out out/
    occlude simulate --scene scene.json --out sim/ [--seed 0] [--layers 2]
    occlude sweep    --scene scene.json --out sweep/ --object cat [--alphas 0.1,0.5,0.9]
"""

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from .attention import cross_attention, embed_prompt
from .exceptions import OccludeError, SceneValidationError
from .geometry import rasterize_bbox
from .graph import ordered_objects, topological_order, validate_graph
from .harness import ToyDenoiser, composite_pixels, object_transmittance, opacity_sweep
from .imageio import write_pgm, write_ppm
from .render import opacity_to_density, render_weights
from .scene import parse_scene
from .schedule import DensitySchedule, schedule_table, sigma_at

SWEEP_ALPHAS = tuple(round(0.1 * k, 1) for k in range(1, 10))


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=False)


def _out_dir(args):
    if args.out is None:
        return None
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _steps(args, scene):
    return args.steps if args.steps is not None else scene.steps


def _shaping(args, scene):
    return scene.attention_shaping and not args.no_attention_shaping


def _schedules(scene, steps):
    return [
        DensitySchedule(opacity_to_density(obj.opacity), steps, scene.schedule_kind)
        for obj in ordered_objects(scene.graph)
    ]


def cmd_validate(args):
    try:
        scene = parse_scene(args.scene)
    except SceneValidationError as exc:
        issues = [{"severity": "error", "path": p, "message": m} for p, m in exc.issues]
        print(_dump({"ok": False, "issues": issues}))
        return 1
    report = validate_graph(scene.graph)
    print(_dump(report.as_dict()))
    return 0 if report.ok else 1


def cmd_sort(args):
    scene = parse_scene(args.scene)
    order = topological_order(scene.graph)
    out = _out_dir(args)
    if out:
        with open(os.path.join(out, "order.json"), "w") as f:
            f.write(json.dumps(order) + "\n")
    print(json.dumps(order))
    return 0


def cmd_schedule(args):
    scene = parse_scene(args.scene)
    steps = _steps(args, scene)
    objects = ordered_objects(scene.graph)
    table = schedule_table(_schedules(scene, steps), steps)
    columns = list(range(steps, 0, -1))
    if args.format == "json":
        text = _dump({
            "kind": scene.schedule_kind,
            "t": columns,
            "rows": {obj.id: row.tolist() for obj, row in zip(objects, table)},
        }) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["id"] + [f"t={t}" for t in columns])
        for obj, row in zip(objects, table):
            writer.writerow([obj.id] + [repr(float(v)) for v in row])
        text = buf.getvalue()
    out = _out_dir(args)
    if out:
        with open(os.path.join(out, f"schedule.{args.format}"), "w") as f:
            f.write(text)
    sys.stdout.write(text)
    return 0


def cmd_maps(args):
    scene = parse_scene(args.scene)
    steps = _steps(args, scene)
    step = args.step if args.step is not None else 1
    objects = ordered_objects(scene.graph)
    w, h = scene.width, scene.height
    shaping = _shaping(args, scene)
    latent = np.random.default_rng(args.seed).standard_normal((h, w, args.channels))
    masks = []
    for obj in objects:
        box = rasterize_bbox(obj.bbox, w, h)
        weights = None
        if shaping:
            _, weights = cross_attention(latent, embed_prompt(obj.prompt_tokens, obj.embedding_seed, args.channels))
        masks.append(object_transmittance(obj, box, weights, shaping))
    sigmas = [sigma_at(s, step) for s in _schedules(scene, steps)]
    diag = render_weights(masks, sigmas, scene.epsilon)

    out = _out_dir(args) or "."
    for obj, m, t, wt in zip(objects, masks, diag.transmittance, diag.weights):
        write_pgm(os.path.join(out, f"M_{obj.id}.pgm"), m)
        write_pgm(os.path.join(out, f"T_{obj.id}.pgm"), t)
        write_pgm(os.path.join(out, f"W_{obj.id}.pgm"), wt)
    write_pgm(os.path.join(out, "S.pgm"), diag.normalizer)
    summary = {"order": [o.id for o in objects], "step": step, "sigmas": sigmas}
    summary.update(diag.summary())
    with open(os.path.join(out, "maps.json"), "w") as f:
        f.write(_dump(summary) + "\n")
    print(_dump(summary))
    return 0


def cmd_render(args):
    scene = parse_scene(args.scene)
    result = composite_pixels(
        scene.graph, scene.width, scene.height,
        attention_shaping=_shaping(args, scene), epsilon=scene.epsilon,
        seed=args.seed, channels=args.channels,
    )
    out = _out_dir(args) or "."
    path = os.path.join(out, "composite.ppm")
    write_ppm(path, result.image)
    print(_dump({"image": path, "order": result.order}))
    return 0


def cmd_simulate(args):
    scene = parse_scene(args.scene)
    h = args.latent_height or max(1, scene.height // 8)
    w = args.latent_width or max(1, scene.width // 8)
    model = ToyDenoiser(
        layers=args.layers, height=h, width=w, channels=args.channels,
        steps=_steps(args, scene), seed=args.seed, blend=args.blend,
        attention_shaping=_shaping(args, scene), epsilon=scene.epsilon,
        schedule_kind=scene.schedule_kind,
    )
    latent, traces = model.fit(scene.graph).generate()
    stats = {
        "order": model.order_,
        "shape": list(latent.shape),
        "mean": float(latent.mean()),
        "std": float(latent.std()),
        "min": float(latent.min()),
        "max": float(latent.max()),
        "norm": float(np.linalg.norm(latent)),
    }
    out = _out_dir(args) or "."
    with open(os.path.join(out, "trace.json"), "w") as f:
        f.write(_dump([t.as_dict() for t in traces]) + "\n")
    with open(os.path.join(out, "latent.json"), "w") as f:
        f.write(_dump({"stats": stats, "latent": latent.tolist()}) + "\n")
    print(_dump(stats))
    return 0


def cmd_sweep(args):
    scene = parse_scene(args.scene)
    alphas = [float(a) for a in args.alphas.split(",")] if args.alphas else list(SWEEP_ALPHAS)
    results = opacity_sweep(
        scene.graph, args.object, alphas, scene.width, scene.height,
        attention_shaping=_shaping(args, scene), epsilon=scene.epsilon,
        seed=args.seed, channels=args.channels,
    )
    out = _out_dir(args) or "."
    entries = []
    for k, (alpha, result) in enumerate(zip(alphas, results)):
        path = os.path.join(out, f"sweep_{k:02d}.ppm")
        write_ppm(path, result.image)
        share = result.weight_share(args.object)
        visible = result.diagnostics.covered
        entries.append({
            "alpha": alpha,
            "image": path,
            "mean_weight_share": float(share[visible].mean()) if visible.any() else 0.0,
        })
    with open(os.path.join(out, "sweep.json"), "w") as f:
        f.write(_dump(entries) + "\n")
    print(_dump(entries))
    return 0


COMMANDS = {
    "validate": cmd_validate,
    "sort": cmd_sort,
    "schedule": cmd_schedule,
    "maps": cmd_maps,
    "render": cmd_render,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scene", required=True, help="scene JSON file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--steps", type=int, help="override the scene's step count")
    common.add_argument("--no-attention-shaping", action="store_true")
    common.add_argument("--json-diagnostics", action="store_true",
                        help="print errors as JSON on stdout")
    common.add_argument("--channels", type=int, default=8, help="toy latent channels")

    parser = argparse.ArgumentParser(prog="occlude", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("validate", "sort", "render"):
        sub.add_parser(name, parents=[common])
    p = sub.add_parser("schedule", parents=[common])
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p = sub.add_parser("maps", parents=[common])
    p.add_argument("--step", type=int, help="denoising step t (default 1, the target density)")
    p = sub.add_parser("simulate", parents=[common])
    p.add_argument("--layers", type=int, default=2)
    p.add_argument("--blend", type=float, default=1.0)
    p.add_argument("--latent-height", type=int)
    p.add_argument("--latent-width", type=int)
    p = sub.add_parser("sweep", parents=[common])
    p.add_argument("--object", required=True, help="id of the object whose opacity varies")
    p.add_argument("--alphas", help="comma separated opacities (default 0.1,...,0.9)")
    return parser


def _report_error(args, exc):
    issues = getattr(exc, "issues", None)
    if args.json_diagnostics:
        errors = [{"severity": "error", "path": p, "message": m} for p, m in issues] if issues else [
            {"severity": "error", "path": "", "message": str(exc)}
        ]
        print(_dump({"ok": False, "error": type(exc).__name__, "errors": errors}))
    else:
        print(f"error: {exc}", file=sys.stderr)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (OccludeError, ValueError, KeyError, OSError) as exc:
        _report_error(args, exc)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
