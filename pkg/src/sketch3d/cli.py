"""Command line interface.

Exit codes: 0 success, 2 invalid input, 3 stitch failure, 4 adapter
failure.  The optional --config JSON provides defaults for sketch,
RANSAC, and adapter settings; explicit flags win over config values.
See the README for the config schema.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from sketch3d import __version__
from sketch3d import kernels
from sketch3d.dataset import DatasetManifest, build_dataset
from sketch3d.errors import (
    AdapterFailureError,
    NoConsensusError,
    Sketch3DError,
    StitchFailureError,
)
from sketch3d.evalharness import (
    SWEEP_COLUMNS,
    make_synthetic_sketch,
    make_toy_pair,
    sweep,
)
from sketch3d.features import detect_and_describe
from sketch3d.geometry import Homography, RansacConfig, warp_image
from sketch3d.image import Image, load_depth_png16
from sketch3d.mesh import DepthMap, depth_to_mesh, export_obj
from sketch3d.pipeline import AdapterSpec, PipelineConfig, run_pipeline
from sketch3d.sketch import SketchParams, sketchify
from sketch3d.stitch import stitch_many


def _load_config(path):
    if path is None:
        return {}
    with open(path) as fh:
        return json.load(fh)


def _sketch_params(args, config) -> SketchParams:
    section = config.get("sketch", {})
    return SketchParams(
        blur_sigma=args.blur_sigma if getattr(args, "blur_sigma", None) is not None
        else section.get("blur_sigma", 8.0),
        highpass_sigma=args.hp_sigma if getattr(args, "hp_sigma", None) is not None
        else section.get("highpass_sigma", 4.0),
        highpass_offset=args.hp_offset if getattr(args, "hp_offset", None) is not None
        else section.get("highpass_offset", 128),
    )


def _ransac_config(args, config) -> RansacConfig:
    section = config.get("ransac", {})
    seed = args.seed if args.seed is not None else section.get("seed", 0)
    return RansacConfig(
        max_iterations=section.get("max_iterations", 2000),
        inlier_threshold=section.get("inlier_threshold", 3.0),
        min_inliers=section.get("min_inliers", 10),
        seed=seed,
    )


def _adapter_spec(kind, flag_value, config):
    section = config.get("adapters", {}).get(kind, {})
    executable = flag_value or section.get("executable", f"builtin:{kind}")
    return AdapterSpec(executable=executable, kind=kind,
                       timeout=float(section.get("timeout", 300.0)))


def cmd_sketchify(args, config):
    img = Image.load(args.input)
    sketchify(img, _sketch_params(args, config)).save(args.output)
    return 0


def cmd_features(args, config):
    img = Image.load(args.image)
    feats = detect_and_describe(img, args.max_features)
    payload = {
        "image": args.image,
        "width": img.width,
        "height": img.height,
        "backend": kernels.backend,
        "keypoints": [
            {"x": kp.x, "y": kp.y, "level": kp.scale_level,
             "orientation": kp.orientation, "response": kp.response,
             "descriptor": d.hex()}
            for kp, d in feats
        ],
    }
    with open(args.out, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    print(f"{len(feats)} keypoints -> {args.out}")
    return 0


def _parse_homography(text):
    if os.path.exists(text):
        with open(text) as fh:
            data = json.load(fh)
    else:
        data = json.loads(text)
    if isinstance(data, dict):
        data = data["homography"]
    return Homography.from_json_list(data)


def cmd_warp(args, config):
    img = Image.load(args.image)
    hom = _parse_homography(args.h)
    result = warp_image(img, hom)
    result.image.save(args.out)
    print(f"warped canvas {result.image.width}x{result.image.height} "
          f"offset {result.offset} -> {args.out}")
    return 0


def cmd_stitch(args, config):
    drawings = [Image.load(p) for p in args.images]
    result = stitch_many(drawings, _ransac_config(args, config),
                         max_features=args.max_features)
    result.canvas.save(args.out)
    if args.report:
        report = {
            "homography": result.homography.to_json_list(),
            "translation": list(result.translation),
            "stage1_matches": result.stage1_matches,
            "stage2_matches": result.stage2_matches,
            "ransac_inliers": result.ransac_inliers,
            "inlier_ratio": result.inlier_ratio,
            "steps": result.steps,
            "canvas_size": [result.canvas.width, result.canvas.height],
        }
        with open(args.report, "w") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    print(f"stitched {len(drawings)} drawings -> {args.out}")
    return 0


def cmd_dataset(args, config):
    manifest = DatasetManifest(
        subset_size=args.subset,
        seed=args.seed if args.seed is not None else 0,
        resize_to=args.resize,
        crop_size=args.crop,
        sketch_params=_sketch_params(args, config),
    )
    record = build_dataset(args.corpus, args.out, manifest)
    print(f"trainA/trainB of {record['subset_size']} images each -> {args.out} "
          f"(corpus {record['corpus_size']}, expected overlap "
          f"{record['expected_subset_overlap']:.1f})")
    return 0


def cmd_toygen(args, config):
    seed = args.seed if args.seed is not None else 0
    if args.from_sketch:
        sketch = Image.load(args.from_sketch)
    else:
        sketch = make_synthetic_sketch(args.width, args.height, seed)
    sketch.save(args.out)
    print(f"sketch -> {args.out}")
    if args.pair:
        pair = make_toy_pair(sketch, args.overlap, args.corner_shift, seed)
        pair.left.save(args.out_left)
        pair.right.save(args.out_right)
        if args.truth:
            with open(args.truth, "w") as fh:
                json.dump({"homography": pair.true_h.to_json_list(),
                           "overlap": pair.overlap_fraction,
                           "seed": seed}, fh, indent=2)
                fh.write("\n")
        print(f"toy pair -> {args.out_left} / {args.out_right}")
    return 0


def cmd_eval(args, config):
    sketch = Image.load(args.sketch)
    with open(args.grid) as fh:
        grid = json.load(fh)
    seeds = grid.get("seeds", [0])
    rows = sweep(sketch, grid["cells"], seeds, _ransac_config(args, config))
    with open(args.out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS)
        writer.writeheader()
        for row in rows:
            if row["corner_rmse"] is None:
                row = dict(row, corner_rmse="")
            writer.writerow(row)
    print(f"{len(rows)} sweep rows -> {args.out}")
    return 0


def cmd_render(args, config):
    depth = DepthMap(load_depth_png16(args.depth).astype(np.float64))
    texture = Image.load(args.texture)
    mesh = depth_to_mesh(depth, texture, args.relief)
    paths = export_obj(mesh, args.out)
    print(f"mesh {len(mesh.vertices)} vertices, {len(mesh.faces)} faces "
          f"-> {paths['obj']}")
    return 0


def cmd_pipeline(args, config):
    inputs = [Image.load(p) for p in args.images]
    cfg = PipelineConfig(
        style=_adapter_spec("style", args.style_adapter, config),
        depth=_adapter_spec("depth", args.depth_adapter, config),
        preprocess_sketch=not args.no_preprocess and config.get("preprocess_sketch", True),
        fine_size=args.fine_size if args.fine_size is not None
        else config.get("fine_size", 480),
        relief=args.relief if args.relief is not None else config.get("relief", 0.3),
        sketch_params=_sketch_params(args, config),
        ransac=_ransac_config(args, config),
    )
    paths = run_pipeline(inputs, args.out_dir, cfg)
    print(f"pipeline complete -> {paths['obj']}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sketch3d",
        description="Stitch sketches, synthesize pencil drawings, and mesh depth maps.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--seed", type=int, default=None,
                        help="seed for all randomized stages")
    parser.add_argument("--config", default=None, help="JSON config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sketchify", help="photo -> pencil sketch")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--blur-sigma", type=float, dest="blur_sigma")
    p.add_argument("--hp-sigma", type=float, dest="hp_sigma")
    p.add_argument("--hp-offset", type=int, dest="hp_offset")
    p.set_defaults(func=cmd_sketchify)

    p = sub.add_parser("features", help="detect keypoints/descriptors to JSON")
    p.add_argument("image")
    p.add_argument("--out", required=True)
    p.add_argument("--max-features", type=int, default=1500)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("warp", help="warp an image by a homography")
    p.add_argument("image")
    p.add_argument("--h", required=True,
                   help="9 row-major numbers as JSON (inline or a file path)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_warp)

    p = sub.add_parser("stitch", help="stitch two or more drawings")
    p.add_argument("images", nargs="+")
    p.add_argument("--out", required=True)
    p.add_argument("--report", default=None, help="write diagnostics JSON here")
    p.add_argument("--max-features", type=int, default=1500)
    p.set_defaults(func=cmd_stitch)

    p = sub.add_parser("dataset", help="build trainA/trainB + manifest")
    p.add_argument("corpus")
    p.add_argument("out")
    p.add_argument("--subset", type=int, default=600)
    p.add_argument("--resize", type=int, default=400)
    p.add_argument("--crop", type=int, default=320)
    p.add_argument("--blur-sigma", type=float, dest="blur_sigma")
    p.add_argument("--hp-sigma", type=float, dest="hp_sigma")
    p.add_argument("--hp-offset", type=int, dest="hp_offset")
    p.set_defaults(func=cmd_dataset)

    p = sub.add_parser("toygen", help="generate a synthetic sketch / toy pair")
    p.add_argument("--out", required=True)
    p.add_argument("--width", type=int, default=512)
    p.add_argument("--height", type=int, default=384)
    p.add_argument("--from-sketch", default=None,
                   help="split this sketch instead of generating one")
    p.add_argument("--pair", action="store_true")
    p.add_argument("--overlap", type=float, default=0.4)
    p.add_argument("--corner-shift", type=float, default=0.1)
    p.add_argument("--out-left", default="toy_left.png")
    p.add_argument("--out-right", default="toy_right.png")
    p.add_argument("--truth", default=None, help="write the true homography JSON")
    p.set_defaults(func=cmd_toygen)

    p = sub.add_parser("eval", help="sweep toy-pair stitching to CSV")
    p.add_argument("--sketch", required=True)
    p.add_argument("--grid", required=True, help="JSON: {cells: [...], seeds: [...]}")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("render", help="depth PNG + texture -> OBJ mesh")
    p.add_argument("--depth", required=True, help="16-bit grayscale PNG")
    p.add_argument("--texture", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--relief", type=float, default=0.3)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("pipeline", help="full sketch(es) -> textured mesh run")
    p.add_argument("images", nargs="+")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--style-adapter", default=None)
    p.add_argument("--depth-adapter", default=None)
    p.add_argument("--fine-size", type=int, default=None)
    p.add_argument("--relief", type=float, default=None)
    p.add_argument("--no-preprocess", action="store_true",
                   help="skip the sketch-filter pass before the style stage")
    p.add_argument("--blur-sigma", type=float, dest="blur_sigma")
    p.add_argument("--hp-sigma", type=float, dest="hp_sigma")
    p.add_argument("--hp-offset", type=int, dest="hp_offset")
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config)
        return args.func(args, config)
    except (StitchFailureError, NoConsensusError) as exc:
        print(f"stitch failure: {exc}", file=sys.stderr)
        return 3
    except AdapterFailureError as exc:
        print(f"adapter failure ({exc.reason}): {exc}", file=sys.stderr)
        return 4
    except (Sketch3DError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
