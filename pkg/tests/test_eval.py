import numpy as np
import pytest

from sketch3d.errors import InvalidParameterError
from sketch3d.evalharness import (
    evaluate_stitch,
    make_synthetic_sketch,
    make_toy_pair,
    piece_width,
    sweep,
)
from sketch3d.geometry import RansacConfig, apply_homography, canonicalize
from sketch3d.sketch import SketchParams


def test_piece_width_arithmetic():
    assert piece_width(512, 0.4) == 358  # round(0.7 * 512)
    assert piece_width(100, 0.5) == 75


def test_zero_shift_pair_is_plain_split(line_sketch):
    pair = make_toy_pair(line_sketch, 0.4, 0.0, seed=5)
    assert np.abs(pair.true_h.m - canonicalize(np.eye(3))).max() < 1e-12
    pw = piece_width(line_sketch.width, 0.4)
    assert np.array_equal(pair.left.array[:, :pw], line_sketch.array[:, :pw])
    assert (pair.left.array[:, pw:] == 255).all()
    start = line_sketch.width - pw
    assert np.array_equal(pair.right.array[:, start:], line_sketch.array[:, start:])
    assert (pair.right.array[:, :start] == 255).all()


def test_toy_pair_deterministic(line_sketch):
    a = make_toy_pair(line_sketch, 0.4, 0.1, seed=3)
    b = make_toy_pair(line_sketch, 0.4, 0.1, seed=3)
    assert np.array_equal(a.right.array, b.right.array)
    assert np.array_equal(a.true_h.m, b.true_h.m)


def test_toy_pair_validation(line_sketch):
    with pytest.raises(InvalidParameterError):
        make_toy_pair(line_sketch, 0.1, 0.05, seed=0)   # overlap too small
    with pytest.raises(InvalidParameterError):
        make_toy_pair(line_sketch, 0.4, 0.2, seed=0)    # shift too large
    narrow = make_synthetic_sketch(64, 128, seed=0)
    with pytest.raises(InvalidParameterError):
        make_toy_pair(narrow, 0.4, 0.1, seed=0)         # sketch too narrow


def test_true_h_maps_landmarks(line_sketch):
    pair = make_toy_pair(line_sketch, 0.4, 0.1, seed=11)
    w, h = line_sketch.width, line_sketch.height
    pw = piece_width(w, 0.4)
    src_corners = [(float(w - pw), 0.0), (float(w - 1), float(h - 1))]
    inv = pair.true_h.inverse()
    for corner in src_corners:
        in_right = apply_homography(inv, corner)
        back = apply_homography(pair.true_h, in_right)
        assert abs(back[0] - corner[0]) < 1e-6
        assert abs(back[1] - corner[1]) < 1e-6


def test_identity_pair_stitches_accurately(line_sketch):
    pair = make_toy_pair(line_sketch, 0.4, 0.0, seed=2)
    report = evaluate_stitch(pair, RansacConfig(seed=2))
    assert report.success
    assert report.corner_rmse < 1.0


def test_style_mismatch_halves_inlier_ratio(line_sketch):
    mismatched_params = SketchParams().scaled(3.0, 2.0)
    worse = 0
    for seed in range(4):
        pair = make_toy_pair(line_sketch, 0.4, 0.08, seed=seed)
        base = evaluate_stitch(pair, RansacConfig(seed=seed))
        probe = evaluate_stitch(pair, RansacConfig(seed=seed),
                                restyle=mismatched_params)
        assert base.success
        if not probe.success or probe.inlier_ratio < 0.5 * base.inlier_ratio:
            worse += 1
    assert worse >= 3


def test_unrelated_sketches_fail(line_sketch):
    other = make_synthetic_sketch(512, 384, seed=900)
    pair_a = make_toy_pair(line_sketch, 0.4, 0.0, seed=1)
    pair_b = make_toy_pair(other, 0.4, 0.0, seed=1)
    from sketch3d.evalharness import ToyPair
    crossed = ToyPair(left=pair_a.left, right=pair_b.right,
                      true_h=pair_a.true_h, overlap_fraction=0.4, seed=1)
    report = evaluate_stitch(crossed, RansacConfig(seed=1))
    assert not report.success


def test_sweep_single_cell(line_sketch):
    rows = sweep(line_sketch, [{"overlap": 0.4, "corner_shift": 0.0}], [0])
    assert len(rows) == 1
    assert rows[0]["cell"] == 0 and rows[0]["seed"] == 0
    again = sweep(line_sketch, [{"overlap": 0.4, "corner_shift": 0.0}], [0])
    assert rows == again


def test_sweep_rejects_empty_grid(line_sketch):
    with pytest.raises(InvalidParameterError):
        sweep(line_sketch, [], [0])


def test_sweep_rmse_monotone_in_corner_shift(line_sketch):
    cells = [{"overlap": 0.4, "corner_shift": s} for s in (0.0, 0.05, 0.10)]
    rows = sweep(line_sketch, cells, list(range(10)))
    means = []
    for ci in range(3):
        vals = [r["corner_rmse"] for r in rows
                if r["cell"] == ci and r["success"] and r["corner_rmse"] is not None]
        assert vals, f"cell {ci} produced no successful stitches"
        means.append(float(np.mean(vals)))
    assert means[0] <= means[1] + 1e-9
    assert means[1] <= means[2] + 1e-9


def test_zero_shift_always_succeeds(line_sketch):
    # same-style pieces with no warp: success rate must be 100% over 20 seeds
    for seed in range(20):
        pair = make_toy_pair(line_sketch, 0.4, 0.0, seed=seed)
        report = evaluate_stitch(pair, RansacConfig(seed=seed))
        assert report.success
        assert report.orientation == "right-onto-left"
