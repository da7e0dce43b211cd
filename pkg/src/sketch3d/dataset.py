"""Unpaired training-set construction: trainA (sketches) / trainB (photos).

Two subsets are drawn independently from the corpus — deliberately NOT
disjointly, which keeps the two sides decorrelated without discarding
data; the expected overlap (|A|*|B|/corpus) is recorded in the manifest
instead of being treated as an error.  Random-crop augmentation happens
inside the external trainer, so this builder only records the
resize/crop geometry and the training hyperparameters it was asked to
pin down.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field

import numpy as np

from sketch3d.errors import InsufficientDataError, InvalidParameterError
from sketch3d.image import Image, resize
from sketch3d.sketch import SketchParams, sketchify

logger = logging.getLogger(__name__)

IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg", ".bmp")

TRAINING_CONFIG = {
    "epochs": 200,
    "lr": 0.0002,
    "lr_decay_start_epoch": 100,
    "test_fine_size": 480,
}


def crop_fraction(resize_to: int, crop_size: int) -> float:
    """Fraction of pixels a random crop discards: 1 - (crop/resize)^2."""
    if resize_to < 1 or crop_size < 1:
        raise InvalidParameterError("sizes must be >= 1")
    if crop_size > resize_to:
        raise InvalidParameterError(
            f"crop {crop_size} larger than resize target {resize_to}")
    return 1.0 - (crop_size / resize_to) ** 2


@dataclass(frozen=True)
class DatasetManifest:
    subset_size: int = 600
    seed: int = 0
    resize_to: int = 400
    crop_size: int = 320
    sketch_params: SketchParams = field(default_factory=SketchParams)
    training_config: dict = field(default_factory=lambda: dict(TRAINING_CONFIG))

    def __post_init__(self):
        if self.subset_size < 1:
            raise InvalidParameterError("subset_size must be >= 1")
        crop_fraction(self.resize_to, self.crop_size)  # validates the pair


def _short_side_resize(img: Image, target: int) -> Image:
    short = min(img.width, img.height)
    if short == target:
        return img
    scale = target / short
    new_w = max(1, round(img.width * scale))
    new_h = max(1, round(img.height * scale))
    return resize(img, new_w, new_h)


def build_dataset(corpus_dir, out_dir, manifest: DatasetManifest = DatasetManifest()) -> dict:
    """Draw the two subsets, write trainA/ trainB/ PNGs and manifest.json.

    trainA holds sketchified images (the sketch domain), trainB the raw
    photos.  Returns the completed manifest dict.
    """
    corpus_dir = str(corpus_dir)
    out_dir = str(out_dir)
    names = sorted(
        f for f in os.listdir(corpus_dir)
        if f.lower().endswith(IMAGE_EXTENSIONS))
    decodable = []
    skipped = []
    for name in names:
        path = os.path.join(corpus_dir, name)
        try:
            decodable.append((name, Image.load(path)))
        except Exception as exc:
            logger.warning("skipping undecodable file %s: %s", path, exc)
            skipped.append(name)
    corpus_size = len(decodable)
    if corpus_size < manifest.subset_size:
        raise InsufficientDataError(
            f"corpus has {corpus_size} decodable images, "
            f"need >= {manifest.subset_size}")

    rng = np.random.Generator(np.random.PCG64(manifest.seed))
    idx_photos = rng.choice(corpus_size, size=manifest.subset_size, replace=False)
    idx_sketches = rng.choice(corpus_size, size=manifest.subset_size, replace=False)

    dir_a = os.path.join(out_dir, "trainA")
    dir_b = os.path.join(out_dir, "trainB")
    os.makedirs(dir_a, exist_ok=True)
    os.makedirs(dir_b, exist_ok=True)

    def out_name(pos, src_name):
        stem = os.path.splitext(src_name)[0]
        return f"{pos:04d}_{stem}.png"

    train_a, train_b = [], []
    for pos, i in enumerate(idx_sketches):
        src_name, img = decodable[int(i)]
        sk = sketchify(_short_side_resize(img, manifest.resize_to),
                       manifest.sketch_params)
        name = out_name(pos, src_name)
        sk.save(os.path.join(dir_a, name))
        train_a.append({"file": name, "source": src_name})
    for pos, i in enumerate(idx_photos):
        src_name, img = decodable[int(i)]
        name = out_name(pos, src_name)
        _short_side_resize(img, manifest.resize_to).save(os.path.join(dir_b, name))
        train_b.append({"file": name, "source": src_name})

    overlap = len(set(int(i) for i in idx_photos)
                  & set(int(i) for i in idx_sketches))
    record = {
        "corpus_dir": corpus_dir,
        "corpus_size": corpus_size,
        "subset_size": manifest.subset_size,
        "seed": manifest.seed,
        "resize_to": manifest.resize_to,
        "crop_size": manifest.crop_size,
        "discard_fraction": crop_fraction(manifest.resize_to, manifest.crop_size),
        "expected_subset_overlap": manifest.subset_size ** 2 / corpus_size,
        "actual_subset_overlap": overlap,
        "skipped_files": skipped,
        "sketch_params": {
            "blur_sigma": manifest.sketch_params.blur_sigma,
            "dodge_scale": manifest.sketch_params.dodge_scale,
            "highpass_sigma": manifest.sketch_params.highpass_sigma,
            "highpass_offset": manifest.sketch_params.highpass_offset,
        },
        "training_config": dict(manifest.training_config),
        "trainA": train_a,
        "trainB": train_b,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return record
