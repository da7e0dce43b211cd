import json
import os

import numpy as np
import pytest

from sketch3d.cli import main
from sketch3d.evalharness import make_synthetic_sketch, make_toy_pair
from sketch3d.image import Image, load_depth_png16, save_depth_png16


@pytest.fixture
def sketch_png(tmp_path):
    path = tmp_path / "sketch.png"
    make_synthetic_sketch(256, 192, seed=3).save(path)
    return str(path)


@pytest.fixture
def toy_pngs(tmp_path, line_sketch):
    pair = make_toy_pair(line_sketch, 0.4, 0.05, seed=6)
    left = tmp_path / "left.png"
    right = tmp_path / "right.png"
    pair.left.save(left)
    pair.right.save(right)
    return str(left), str(right)


def test_sketchify_command(tmp_path, sketch_png):
    out = tmp_path / "out.png"
    assert main(["sketchify", sketch_png, str(out)]) == 0
    assert Image.load(out).channels == 1


def test_sketchify_missing_input(tmp_path):
    assert main(["sketchify", str(tmp_path / "nope.png"),
                 str(tmp_path / "out.png")]) == 2


def test_features_command(tmp_path, sketch_png):
    out = tmp_path / "feats.json"
    assert main(["features", sketch_png, "--out", str(out)]) == 0
    data = json.load(open(out))
    assert data["keypoints"]
    kp = data["keypoints"][0]
    assert set(kp) == {"x", "y", "level", "orientation", "response", "descriptor"}
    assert len(kp["descriptor"]) == 64


def test_warp_command_inline_h(tmp_path, sketch_png):
    out = tmp_path / "warped.png"
    h = json.dumps([1, 0, 30, 0, 1, -10, 0, 0, 1])
    assert main(["warp", sketch_png, "--h", h, "--out", str(out)]) == 0
    assert np.array_equal(Image.load(out).array, Image.load(sketch_png).array)


def test_warp_command_h_file(tmp_path, sketch_png):
    hfile = tmp_path / "h.json"
    hfile.write_text(json.dumps({"homography": [1, 0, 0, 0, 1, 0, 0, 0, 1]}))
    out = tmp_path / "warped.png"
    assert main(["warp", sketch_png, "--h", str(hfile), "--out", str(out)]) == 0


def test_stitch_command_with_report(tmp_path, toy_pngs):
    left, right = toy_pngs
    out = tmp_path / "canvas.png"
    report = tmp_path / "report.json"
    code = main(["--seed", "6", "stitch", right, left,
                 "--out", str(out), "--report", str(report)])
    assert code == 0
    data = json.load(open(report))
    assert data["stage1_matches"] > 0
    assert len(data["homography"]) == 9


def test_stitch_failure_exit_code(tmp_path):
    white = tmp_path / "white.png"
    Image(np.full((128, 128), 255, np.uint8)).save(white)
    assert main(["stitch", str(white), str(white),
                 "--out", str(tmp_path / "c.png")]) == 3


def test_toygen_pair(tmp_path):
    out = tmp_path / "s.png"
    left = tmp_path / "l.png"
    right = tmp_path / "r.png"
    truth = tmp_path / "t.json"
    code = main(["--seed", "4", "toygen", "--out", str(out), "--width", "256",
                 "--height", "192", "--pair", "--overlap", "0.4",
                 "--corner-shift", "0.05", "--out-left", str(left),
                 "--out-right", str(right), "--truth", str(truth)])
    assert code == 0
    assert Image.load(left).width == 256
    assert len(json.load(open(truth))["homography"]) == 9


def test_eval_command(tmp_path, sketch_png):
    grid = tmp_path / "grid.json"
    grid.write_text(json.dumps(
        {"cells": [{"overlap": 0.4, "corner_shift": 0.0}], "seeds": [0]}))
    out = tmp_path / "rows.csv"
    assert main(["eval", "--sketch", sketch_png, "--grid", str(grid),
                 "--out", str(out)]) == 0
    lines = open(out).read().strip().splitlines()
    assert len(lines) == 2
    assert lines[0].startswith("cell,seed,overlap")


def test_render_command(tmp_path, rng):
    depth_png = tmp_path / "depth.png"
    save_depth_png16(rng.integers(0, 65536, (12, 10), dtype=np.uint16), depth_png)
    tex = tmp_path / "tex.png"
    Image(rng.integers(0, 256, (12, 10, 3), dtype=np.uint8)).save(tex)
    out = tmp_path / "mesh.obj"
    assert main(["render", "--depth", str(depth_png), "--texture", str(tex),
                 "--out", str(out)]) == 0
    assert os.path.exists(out)
    assert load_depth_png16(depth_png).shape == (12, 10)


def test_pipeline_command_with_stubs(tmp_path, sketch_png):
    out_dir = tmp_path / "run"
    code = main(["pipeline", sketch_png, "--out-dir", str(out_dir),
                 "--fine-size", "96"])
    assert code == 0
    assert (out_dir / "05_mesh.obj").exists()


def test_pipeline_adapter_failure_exit_code(tmp_path, sketch_png):
    bad = tmp_path / "bad.py"
    bad.write_text("import sys; sys.exit(9)\n")
    code = main(["pipeline", sketch_png, "--out-dir", str(tmp_path / "run"),
                 "--fine-size", "96", "--style-adapter", str(bad)])
    assert code == 4


def test_config_file_defaults(tmp_path, sketch_png):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"fine_size": 96, "relief": 0.2}))
    out_dir = tmp_path / "run"
    code = main(["--config", str(cfg), "pipeline", sketch_png,
                 "--out-dir", str(out_dir)])
    assert code == 0
    manifest = json.load(open(out_dir / "run_manifest.json"))
    assert manifest["relief"] == 0.2
    assert manifest["diagnostics"]["fine_size"] == 96


def test_bad_config_exit_code(tmp_path, sketch_png):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{not json")
    assert main(["--config", str(cfg), "sketchify", sketch_png,
                 str(tmp_path / "o.png")]) == 2
