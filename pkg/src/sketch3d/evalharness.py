"""Synthetic stitching benchmarks.

A toy pair splits one line drawing into two overlapping pieces on
full-size canvases (the non-piece side is blanked to paper white) and
warps the right piece by a seeded random homography whose inverse is
stored as ground truth.  Keeping both pieces in the source coordinate
frame makes the zero-shift ground truth exactly the identity.

Style mismatch — the failure mode this harness quantifies — is produced
by re-running the sketch filter on one piece with perturbed parameters,
which changes stroke appearance without moving any geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from sketch3d.errors import InvalidParameterError, StitchFailureError
from sketch3d.geometry import (
    Homography,
    PointPair,
    RansacConfig,
    apply_homography,
    dlt,
)
from sketch3d.geometry import warp_image
from sketch3d.image import Image
from sketch3d.sketch import SketchParams, sketchify
from sketch3d.stitch import stitch_pair


@dataclass(frozen=True)
class ToyPair:
    left: Image
    right: Image
    true_h: Homography            # right-piece frame -> left-piece frame
    overlap_fraction: float
    seed: int


@dataclass(frozen=True)
class MatchReport:
    stage1_matches: int
    ransac_inliers: int
    inlier_ratio: float
    corner_rmse: Optional[float]  # None when the stitch failed
    success: bool
    orientation: str = "right-onto-left"   # which piece played drawing 1


def _draw_segment(canvas: np.ndarray, x0, y0, x1, y1, value, thickness=2):
    n = int(max(abs(x1 - x0), abs(y1 - y0))) + 1
    xs = np.round(np.linspace(x0, x1, n)).astype(int)
    ys = np.round(np.linspace(y0, y1, n)).astype(int)
    h, w = canvas.shape
    for t in range(thickness):
        for s in range(thickness):
            yy = np.clip(ys + t, 0, h - 1)
            xx = np.clip(xs + s, 0, w - 1)
            canvas[yy, xx] = value


def make_synthetic_sketch(width: int = 512, height: int = 384, seed: int = 0) -> Image:
    """A deterministic building-ish line drawing, rich in corner junctions."""
    if width < 64 or height < 64:
        raise InvalidParameterError("synthetic sketch must be at least 64x64")
    rng = np.random.Generator(np.random.PCG64(seed))
    canvas = np.full((height, width), 255, dtype=np.uint8)

    def rect(x, y, w, h, value):
        _draw_segment(canvas, x, y, x + w, y, value)
        _draw_segment(canvas, x, y + h, x + w, y + h, value)
        _draw_segment(canvas, x, y, x, y + h, value)
        _draw_segment(canvas, x + w, y, x + w, y + h, value)

    n_buildings = 4 + int(rng.integers(0, 3))
    for _ in range(n_buildings):
        bw = int(rng.integers(width // 8, width // 3))
        bh = int(rng.integers(height // 4, int(height * 0.7)))
        bx = int(rng.integers(4, max(5, width - bw - 4)))
        by = int(rng.integers(height // 6, max(height // 6 + 1, height - bh - 4)))
        shade = int(rng.integers(20, 80))
        rect(bx, by, bw, bh, shade)
        # gable roof
        apex_x = bx + bw // 2 + int(rng.integers(-bw // 6, bw // 6 + 1))
        apex_y = max(2, by - int(rng.integers(bh // 6, bh // 3 + 1)))
        _draw_segment(canvas, bx, by, apex_x, apex_y, shade)
        _draw_segment(canvas, bx + bw, by, apex_x, apex_y, shade)
        # window grid
        cols = max(1, bw // 40)
        rows = max(1, bh // 48)
        ww, wh = max(8, bw // (3 * cols)), max(8, bh // (3 * rows))
        for r in range(rows):
            for c in range(cols):
                wx = bx + (c + 1) * bw // (cols + 1) - ww // 2
                wy = by + (r + 1) * bh // (rows + 1) - wh // 2
                rect(wx, wy, ww, wh, shade)

    for _ in range(16):
        x0, x1 = rng.integers(0, width, 2)
        y0, y1 = rng.integers(0, height, 2)
        _draw_segment(canvas, int(x0), int(y0), int(x1), int(y1),
                      int(rng.integers(30, 110)), thickness=2)
    return Image(canvas)


def piece_width(width: int, overlap_fraction: float) -> int:
    """Content width of each toy piece: (1+overlap)/2 of the source width."""
    return round((1.0 + overlap_fraction) / 2.0 * width)


def make_toy_pair(sketch: Image, overlap_fraction: float, max_corner_shift: float,
                  seed: int) -> ToyPair:
    """Split a sketch into overlapping pieces and warp the right one."""
    if sketch.width < 128:
        raise InvalidParameterError("sketch must be at least 128 px wide")
    if not 0.2 <= overlap_fraction <= 0.8:
        raise InvalidParameterError("overlap_fraction must be in [0.2, 0.8]")
    if not 0.0 <= max_corner_shift <= 0.15:
        raise InvalidParameterError("max_corner_shift must be in [0, 0.15]")

    w, h = sketch.width, sketch.height
    pw = piece_width(w, overlap_fraction)
    gray = sketch.array if sketch.channels == 1 else None
    if gray is None:
        raise InvalidParameterError("toy pairs are built from single-channel sketches")

    left_arr = gray.copy()
    left_arr[:, pw:] = 255
    right_arr = gray.copy()
    right_arr[:, :w - pw] = 255

    if max_corner_shift == 0.0:
        return ToyPair(left=Image(left_arr), right=Image(right_arr),
                       true_h=Homography.identity(),
                       overlap_fraction=overlap_fraction, seed=seed)

    rng = np.random.Generator(np.random.PCG64(seed))
    corners = [(float(w - pw), 0.0), (float(w - 1), 0.0),
               (float(w - pw), float(h - 1)), (float(w - 1), float(h - 1))]
    shift = max_corner_shift * w
    displaced = [(x + rng.uniform(-shift, shift), y + rng.uniform(-shift, shift))
                 for x, y in corners]
    h_rand = dlt([PointPair(c, d) for c, d in zip(corners, displaced)])
    warped = warp_image(Image(right_arr), h_rand, output_rect=(0, 0, w, h))
    return ToyPair(left=Image(left_arr), right=warped.image,
                   true_h=h_rand.inverse(),
                   overlap_fraction=overlap_fraction, seed=seed)


def evaluate_stitch(pair: ToyPair, cfg: RansacConfig = RansacConfig(),
                    restyle: Optional[SketchParams] = None) -> MatchReport:
    """Stitch right onto left and score the estimate against the truth.

    ``restyle`` re-renders the right piece through the sketch filter
    before stitching (the style-mismatch probe).  Stitch failure is a
    reported outcome, not an exception.
    """
    d1 = pair.right if restyle is None else sketchify(pair.right, restyle)
    try:
        result = stitch_pair(d1, pair.left, cfg)
    except StitchFailureError as exc:
        return MatchReport(stage1_matches=exc.stage1_matches, ransac_inliers=0,
                           inlier_ratio=0.0, corner_rmse=None, success=False)

    est = Homography.translation(-result.translation[0],
                                 -result.translation[1]).compose(result.homography)
    w = pair.left.width
    h = pair.left.height
    pw = piece_width(w, pair.overlap_fraction)
    overlap_corners = [(float(w - pw), 0.0), (float(pw - 1), 0.0),
                       (float(w - pw), float(h - 1)), (float(pw - 1), float(h - 1))]
    inv_truth = pair.true_h.inverse()
    sq = 0.0
    for corner in overlap_corners:
        in_right = apply_homography(inv_truth, corner)
        tx, ty = apply_homography(pair.true_h, in_right)
        ex, ey = apply_homography(est, in_right)
        sq += (tx - ex) ** 2 + (ty - ey) ** 2
    rmse = math.sqrt(sq / len(overlap_corners))
    return MatchReport(stage1_matches=result.stage1_matches,
                       ransac_inliers=result.ransac_inliers,
                       inlier_ratio=result.inlier_ratio,
                       corner_rmse=rmse, success=True)


def sweep(sketch: Image, cells, seeds, cfg: RansacConfig = RansacConfig()) -> list[dict]:
    """One MatchReport row per (cell, seed); deterministic ordering.

    Each cell is a dict with overlap, corner_shift, and optional
    style_blur_scale / style_hp_scale (1.0 = same style).
    """
    if not cells:
        raise InvalidParameterError("sweep needs a non-empty grid")
    rows = []
    for ci, cell in enumerate(cells):
        overlap = float(cell["overlap"])
        shift = float(cell["corner_shift"])
        blur_scale = float(cell.get("style_blur_scale", 1.0))
        hp_scale = float(cell.get("style_hp_scale", 1.0))
        restyle = None
        if blur_scale != 1.0 or hp_scale != 1.0:
            restyle = SketchParams().scaled(blur_scale, hp_scale)
        for seed in seeds:
            pair = make_toy_pair(sketch, overlap, shift, int(seed))
            report = evaluate_stitch(
                pair, RansacConfig(max_iterations=cfg.max_iterations,
                                   inlier_threshold=cfg.inlier_threshold,
                                   min_inliers=cfg.min_inliers, seed=int(seed)),
                restyle=restyle)
            rows.append({
                "cell": ci,
                "seed": int(seed),
                "overlap": overlap,
                "corner_shift": shift,
                "style_blur_scale": blur_scale,
                "style_hp_scale": hp_scale,
                "stage1_matches": report.stage1_matches,
                "ransac_inliers": report.ransac_inliers,
                "inlier_ratio": report.inlier_ratio,
                "corner_rmse": report.corner_rmse,
                "success": report.success,
            })
    return rows


SWEEP_COLUMNS = ["cell", "seed", "overlap", "corner_shift", "style_blur_scale",
                 "style_hp_scale", "stage1_matches", "ransac_inliers",
                 "inlier_ratio", "corner_rmse", "success"]
