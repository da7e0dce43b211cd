import json
import os
import stat
import sys

import numpy as np
import pytest
from PIL import Image as PILImage

from sketch3d.errors import AdapterFailureError, InvalidParameterError
from sketch3d.evalharness import make_synthetic_sketch, make_toy_pair
from sketch3d.image import Image, gray_to_rgb, load_depth_png16, resize
from sketch3d.mesh import parse_obj
from sketch3d.pipeline import (
    AdapterSpec,
    PipelineConfig,
    conformance_report,
    invoke_adapter,
    run_pipeline,
)
from sketch3d.sketch import sketchify


@pytest.fixture
def sample_rgb(tmp_path, rng):
    path = tmp_path / "sample.png"
    Image(rng.integers(0, 256, (40, 56, 3), dtype=np.uint8)).save(path)
    return path


def write_script(path, body):
    with open(path, "w") as fh:
        fh.write("#!/usr/bin/env python3\n" + body)
    os.chmod(path, os.stat(path).st_mode | stat.S_IXUSR)
    return str(path)


def test_identity_style_stub_copies_bytes(tmp_path, sample_rgb):
    out = tmp_path / "styled.png"
    invoke_adapter(AdapterSpec("builtin:style", "style"), sample_rgb, out)
    assert out.read_bytes() == sample_rgb.read_bytes()


def test_gradient_depth_stub(tmp_path, sample_rgb):
    out = tmp_path / "depth.png"
    invoke_adapter(AdapterSpec("builtin:depth", "depth"), sample_rgb, out)
    vals = load_depth_png16(out)
    assert vals.shape == (40, 56)
    assert (vals[0] == 0).all()
    assert (vals[-1] == 65535).all()
    expected = np.floor(65535.0 * np.arange(40) / 39 + 0.5)
    assert np.array_equal(vals[:, 7], expected.astype(np.uint16))


def test_adapter_wrong_size_rejected(tmp_path, sample_rgb):
    script = write_script(tmp_path / "bad_size.py", """
import sys
from PIL import Image
args = dict(zip(sys.argv[1::2], sys.argv[2::2]))
Image.new("RGB", (8, 8)).save(args["--output"])
""")
    with pytest.raises(AdapterFailureError) as exc:
        invoke_adapter(AdapterSpec(script, "style"), sample_rgb, tmp_path / "o.png")
    assert exc.value.reason == "invalid-output"


def test_adapter_wrong_mode_rejected(tmp_path, sample_rgb):
    script = write_script(tmp_path / "bad_mode.py", """
import sys
from PIL import Image
args = dict(zip(sys.argv[1::2], sys.argv[2::2]))
with Image.open(args["--input"]) as im:
    Image.new("L", im.size).save(args["--output"])
""")
    with pytest.raises(AdapterFailureError) as exc:
        invoke_adapter(AdapterSpec(script, "style"), sample_rgb, tmp_path / "o.png")
    assert exc.value.reason == "invalid-output"


def test_adapter_nonzero_exit(tmp_path, sample_rgb):
    script = write_script(tmp_path / "fails.py", "import sys; sys.exit(3)\n")
    with pytest.raises(AdapterFailureError) as exc:
        invoke_adapter(AdapterSpec(script, "style"), sample_rgb, tmp_path / "o.png")
    assert exc.value.reason == "nonzero-exit"


def test_adapter_missing_output(tmp_path, sample_rgb):
    script = write_script(tmp_path / "noop.py", "pass\n")
    with pytest.raises(AdapterFailureError) as exc:
        invoke_adapter(AdapterSpec(script, "style"), sample_rgb, tmp_path / "o.png")
    assert exc.value.reason == "missing-output"


def test_adapter_timeout(tmp_path, sample_rgb):
    script = write_script(tmp_path / "slow.py", "import time; time.sleep(30)\n")
    with pytest.raises(AdapterFailureError) as exc:
        invoke_adapter(AdapterSpec(script, "style", timeout=1.0),
                       sample_rgb, tmp_path / "o.png")
    assert exc.value.reason == "timeout"


def test_adapter_not_runnable(tmp_path, sample_rgb):
    spec = AdapterSpec(str(tmp_path / "missing_binary"), "style")
    with pytest.raises(AdapterFailureError) as exc:
        invoke_adapter(spec, sample_rgb, tmp_path / "o.png")
    assert exc.value.reason == "not-runnable"


def test_conformance_report_for_stubs(tmp_path, sample_rgb):
    for kind in ("style", "depth"):
        report = conformance_report(AdapterSpec(f"builtin:{kind}", kind),
                                    sample_rgb, tmp_path)
        assert report["passed"], report["problems"]


def test_single_sketch_pipeline(tmp_path):
    sketch = make_synthetic_sketch(256, 192, seed=8)
    cfg = PipelineConfig(fine_size=96)
    paths = run_pipeline([sketch], tmp_path, cfg)
    assert paths["stitched"] is None
    mesh = parse_obj(paths["obj"])
    assert len(mesh.vertices) == 96 * 96
    assert len(mesh.faces) == 2 * 95 * 95
    assert os.path.exists(paths["manifest"])
    # no stray temp files
    assert not [f for f in os.listdir(tmp_path) if f.endswith(".tmp")]


def test_pipeline_preprocess_contract(tmp_path):
    sketch = make_synthetic_sketch(256, 192, seed=9)
    cfg = PipelineConfig(fine_size=96)
    paths = run_pipeline([sketch], tmp_path, cfg)
    sent = Image.load(paths["style_input"])
    expected = gray_to_rgb(sketchify(resize(sketch, 96, 96), cfg.sketch_params))
    assert np.array_equal(sent.array, expected.array)


def test_pipeline_no_preprocess(tmp_path):
    sketch = make_synthetic_sketch(256, 192, seed=9)
    cfg = PipelineConfig(fine_size=96, preprocess_sketch=False)
    paths = run_pipeline([sketch], tmp_path / "raw", cfg)
    sent = Image.load(paths["style_input"])
    expected = gray_to_rgb(resize(sketch, 96, 96))
    assert np.array_equal(sent.array, expected.array)


def test_pipeline_two_pieces_stitch_stage(tmp_path, line_sketch):
    pair = make_toy_pair(line_sketch, 0.4, 0.05, seed=4)
    cfg = PipelineConfig(fine_size=96)
    paths = run_pipeline([pair.right, pair.left], tmp_path, cfg)
    assert paths["stitched"] is not None and os.path.exists(paths["stitched"])
    manifest = json.load(open(paths["manifest"]))
    assert manifest["diagnostics"]["stitch"]["steps"][0]["step"] == 1
    stitched = Image.load(paths["stitched"])
    assert stitched.width >= line_sketch.width - 10


def test_pipeline_reruns_identically(tmp_path):
    sketch = make_synthetic_sketch(192, 160, seed=12)
    cfg = PipelineConfig(fine_size=96)
    p1 = run_pipeline([sketch], tmp_path / "a", cfg)
    p2 = run_pipeline([sketch], tmp_path / "b", cfg)
    for key in ("style_input", "styled", "depth", "obj", "texture"):
        b1 = open(p1[key], "rb").read()
        b2 = open(p2[key], "rb").read()
        assert b1 == b2, key


def test_pipeline_requires_input():
    with pytest.raises(InvalidParameterError):
        run_pipeline([], "/tmp/nowhere")


def test_stub_module_cli_contract(tmp_path, sample_rgb):
    import subprocess
    out = tmp_path / "o.png"
    proc = subprocess.run(
        [sys.executable, "-m", "sketch3d.stubs", "style",
         "--input", str(sample_rgb), "--output", str(out)],
        capture_output=True)
    assert proc.returncode == 0
    assert out.exists()
    missing = subprocess.run(
        [sys.executable, "-m", "sketch3d.stubs", "depth",
         "--input", str(tmp_path / "nope.png"), "--output", str(out)],
        capture_output=True)
    assert missing.returncode != 0
