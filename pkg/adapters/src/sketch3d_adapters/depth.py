"""Single-image depth adapter: `sketch3d-depth-adapter --input --output`.

The network's relative depth (larger = farther) is min-max mapped to
the full 16-bit range — 0 nearest, 65535 farthest — and written as a
single-channel 16-bit PNG of the input's size.  Absolute scale is
unrecoverable from one image, so only normalized relative depth crosses
the adapter boundary.  A constant prediction has no relief to normalize
and exits nonzero (degenerate-depth).
"""

import sys

import numpy as np
import torch
from PIL import Image

from sketch3d_adapters.checkpoints import CheckpointRef
from sketch3d_adapters.inference import (
    crop_back,
    load_rgb,
    pad_reflect,
    run_adapter_main,
    to_batch,
)


def quantize_relative_depth(values: np.ndarray) -> np.ndarray:
    """Min-max map a relative depth field to uint16 (0 = nearest)."""
    lo = float(values.min())
    hi = float(values.max())
    if hi - lo <= 0.0:
        raise ValueError("degenerate-depth: model produced a constant depth map")
    scaled = (values - lo) / (hi - lo) * 65535.0
    return np.floor(scaled + 0.5).astype(np.uint16)


def _worker(args):
    ref = CheckpointRef.resolve("depth", args.checkpoint, args.checkpoint_hash)
    model = ref.load_model()
    arr = load_rgb(args.input)
    batch, size = pad_reflect(to_batch(arr, scale="unit"))
    with torch.no_grad():
        out = crop_back(model(batch), size)
    depth = quantize_relative_depth(out[0, 0].numpy().astype(np.float64))
    Image.fromarray(depth).save(args.output, format="PNG")


def main(argv=None) -> int:
    return run_adapter_main(argv, "sketch3d-depth-adapter", _worker)


if __name__ == "__main__":
    sys.exit(main())
