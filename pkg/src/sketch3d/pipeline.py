"""End-to-end orchestration: stitch, re-sketch, style, depth, mesh.

Neural stages run as external adapter processes exchanging files:

    <executable> --input <png> --output <png>

Success means exit code 0 plus a validating output — a 3-channel PNG of
the input's size for style adapters, a single-channel 16-bit PNG
(0 = nearest, 65535 = farthest) for depth adapters.  The special
executables "builtin:style" / "builtin:depth" resolve to the stubs in
:mod:`sketch3d.stubs`, which is why the whole pipeline runs without any
neural dependency installed.

Stage files are written atomically (temp + rename): a failed run never
leaves a truncated artifact behind.
"""

from __future__ import annotations

import json
import os
import subprocess
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np
from PIL import Image as PILImage

from sketch3d.errors import AdapterFailureError, InvalidParameterError, StitchFailureError
from sketch3d.geometry import RansacConfig
from sketch3d.image import Image, gray_to_rgb, load_depth_png16, resize
from sketch3d.mesh import DepthMap, depth_to_mesh, export_obj
from sketch3d.sketch import SketchParams, sketchify
from sketch3d.stitch import stitch_many

BUILTIN_STYLE = "builtin:style"
BUILTIN_DEPTH = "builtin:depth"
DEFAULT_FINE_SIZE = 480


@dataclass(frozen=True)
class AdapterSpec:
    executable: str
    kind: str                     # "style" or "depth"
    timeout: float = 300.0

    def __post_init__(self):
        if self.kind not in ("style", "depth"):
            raise InvalidParameterError(f"unknown adapter kind {self.kind!r}")

    def command(self) -> list[str]:
        if self.executable in (BUILTIN_STYLE, BUILTIN_DEPTH):
            return [sys.executable, "-m", "sketch3d.stubs",
                    self.executable.split(":", 1)[1]]
        if self.executable.endswith(".py"):
            return [sys.executable, self.executable]
        return [self.executable]

    def check_runnable(self) -> None:
        if self.executable in (BUILTIN_STYLE, BUILTIN_DEPTH):
            return
        path = self.executable
        if not os.path.exists(path):
            raise AdapterFailureError(
                f"adapter executable {path} does not exist", reason="not-runnable")
        if not (path.endswith(".py") or os.access(path, os.X_OK)):
            raise AdapterFailureError(
                f"adapter executable {path} is not executable", reason="not-runnable")


@dataclass(frozen=True)
class PipelineConfig:
    style: AdapterSpec = AdapterSpec(BUILTIN_STYLE, "style")
    depth: AdapterSpec = AdapterSpec(BUILTIN_DEPTH, "depth")
    preprocess_sketch: bool = True
    fine_size: int = DEFAULT_FINE_SIZE
    relief: float = 0.3
    sketch_params: SketchParams = field(default_factory=SketchParams)
    ransac: RansacConfig = field(default_factory=RansacConfig)

    def __post_init__(self):
        if self.fine_size < 64:
            raise InvalidParameterError("fine_size must be >= 64")


def validate_adapter_output(kind: str, in_path: str, out_path: str) -> list[str]:
    """Contract violations of an adapter's output file (empty = conformant)."""
    problems = []
    if not os.path.exists(out_path):
        return [f"output file {out_path} was not written"]
    with PILImage.open(in_path) as im:
        expected = im.size
    try:
        with PILImage.open(out_path) as im:
            mode, size, fmt = im.mode, im.size, im.format
    except Exception as exc:
        return [f"output is not a decodable image: {exc}"]
    if fmt != "PNG":
        problems.append(f"output must be PNG, got {fmt}")
    if size != expected:
        problems.append(f"output size {size} != input size {expected}")
    if kind == "style":
        if mode != "RGB":
            problems.append(f"style output must be 3-channel 8-bit (RGB), got {mode}")
    else:
        if mode not in ("I;16", "I"):
            problems.append(f"depth output must be single-channel 16-bit, got {mode}")
    return problems


def invoke_adapter(spec: AdapterSpec, in_path, out_path) -> str:
    """Run one adapter process and validate its output file.

    The adapter writes to a scratch path that is renamed onto
    ``out_path`` only after validation, so a crashed or nonconforming
    adapter never leaves a truncated stage file behind.
    """
    in_path = str(in_path)
    out_path = str(out_path)
    if not os.path.exists(in_path):
        raise InvalidParameterError(f"adapter input {in_path} does not exist")
    spec.check_runnable()
    scratch = f"{out_path}.part-{os.getpid()}.png"
    cmd = spec.command() + ["--input", in_path, "--output", scratch]
    try:
        try:
            proc = subprocess.run(cmd, capture_output=True, timeout=spec.timeout)
        except subprocess.TimeoutExpired:
            raise AdapterFailureError(
                f"{spec.kind} adapter exceeded {spec.timeout}s", reason="timeout")
        if proc.returncode != 0:
            tail = proc.stderr.decode(errors="replace")[-2000:]
            raise AdapterFailureError(
                f"{spec.kind} adapter exited with {proc.returncode}: {tail}",
                reason="nonzero-exit", detail=tail)
        if not os.path.exists(scratch):
            raise AdapterFailureError(
                f"{spec.kind} adapter exited 0 but wrote no output",
                reason="missing-output")
        problems = validate_adapter_output(spec.kind, in_path, scratch)
        if problems:
            raise AdapterFailureError(
                f"{spec.kind} adapter output invalid: " + "; ".join(problems),
                reason="invalid-output", detail="; ".join(problems))
        os.replace(scratch, out_path)
    finally:
        if os.path.exists(scratch):
            os.unlink(scratch)
    return out_path


def conformance_report(spec: AdapterSpec, sample_path, workdir) -> dict:
    """Run the adapter protocol checks on one sample; returns a report dict."""
    out_path = os.path.join(str(workdir), f"conformance_{spec.kind}.png")
    report = {"kind": spec.kind, "executable": spec.executable,
              "sample": str(sample_path), "passed": False, "problems": []}
    try:
        invoke_adapter(spec, sample_path, out_path)
    except (AdapterFailureError, InvalidParameterError) as exc:
        report["problems"].append(str(exc))
        return report
    report["passed"] = True
    report["output"] = out_path
    return report


def _save_atomic(img: Image, path: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".png")
    os.close(fd)
    try:
        img.save(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run_pipeline(inputs, out_dir, cfg: PipelineConfig = PipelineConfig()) -> dict:
    """Drive sketches through stitch -> sketch filter -> style -> depth -> mesh.

    ``inputs`` is a non-empty list of Images.  Returns a dict of stage
    file paths plus diagnostics.  With two or more inputs the stitch
    stage runs first; its failure propagates as StitchFailureError
    (single-sketch mode remains available by passing one input).
    """
    if not inputs:
        raise InvalidParameterError("pipeline needs at least one input image")
    cfg.style.check_runnable()
    cfg.depth.check_runnable()
    out_dir = str(out_dir)
    os.makedirs(out_dir, exist_ok=True)

    paths: dict = {"out_dir": out_dir, "stitched": None}
    diagnostics: dict = {"inputs": len(inputs), "fine_size": cfg.fine_size,
                         "preprocess_sketch": cfg.preprocess_sketch,
                         "resize_interpolation": "bilinear"}

    if len(inputs) >= 2:
        try:
            result = stitch_many(inputs, cfg.ransac)
        except StitchFailureError as exc:
            raise StitchFailureError(
                f"{exc} — consider running the sketches individually "
                f"(a single input skips the stitching stage)",
                stage1_matches=exc.stage1_matches,
                stage2_matches=exc.stage2_matches,
                step=exc.step) from exc
        current = result.canvas
        stitched_path = os.path.join(out_dir, "01_stitched.png")
        _save_atomic(current, stitched_path)
        paths["stitched"] = stitched_path
        diagnostics["stitch"] = {
            "steps": result.steps,
            "stage1_matches": result.stage1_matches,
            "stage2_matches": result.stage2_matches,
            "inlier_ratio": result.inlier_ratio,
        }
    else:
        current = inputs[0]

    current = resize(current, cfg.fine_size, cfg.fine_size)
    if cfg.preprocess_sketch:
        current = sketchify(current, cfg.sketch_params)
    style_input = gray_to_rgb(current)
    style_in_path = os.path.join(out_dir, "02_style_input.png")
    _save_atomic(style_input, style_in_path)
    paths["style_input"] = style_in_path

    styled_path = os.path.join(out_dir, "03_styled.png")
    invoke_adapter(cfg.style, style_in_path, styled_path)
    paths["styled"] = styled_path

    depth_path = os.path.join(out_dir, "04_depth.png")
    invoke_adapter(cfg.depth, styled_path, depth_path)
    paths["depth"] = depth_path

    styled = Image.load(styled_path)
    depth = DepthMap(load_depth_png16(depth_path).astype(np.float64))
    mesh = depth_to_mesh(depth, styled, cfg.relief)
    mesh_paths = export_obj(mesh, os.path.join(out_dir, "05_mesh.obj"))
    paths.update(mesh_paths)

    manifest = {
        "stages": {k: v for k, v in paths.items() if k != "out_dir"},
        "relief": cfg.relief,
        "sketch_params": {
            "blur_sigma": cfg.sketch_params.blur_sigma,
            "dodge_scale": cfg.sketch_params.dodge_scale,
            "highpass_sigma": cfg.sketch_params.highpass_sigma,
            "highpass_offset": cfg.sketch_params.highpass_offset,
        },
        "adapters": {"style": cfg.style.executable, "depth": cfg.depth.executable},
        "diagnostics": diagnostics,
    }
    manifest_path = os.path.join(out_dir, "run_manifest.json")
    fd, tmp = tempfile.mkstemp(dir=out_dir, suffix=".json")
    with os.fdopen(fd, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, manifest_path)
    paths["manifest"] = manifest_path
    paths["diagnostics"] = diagnostics
    return paths
