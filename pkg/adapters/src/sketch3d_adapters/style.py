"""Sketch-to-image style adapter: `sketch3d-style-adapter --input --output`.

Runs the generator at the input's own resolution (fully convolutional;
reflect-padded to a multiple of 8 and cropped back) and writes a
3-channel PNG of identical size.  Inference is eval-mode and CPU-deterministic:
two runs on the same input are byte-identical.
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


def _worker(args):
    ref = CheckpointRef.resolve("style", args.checkpoint, args.checkpoint_hash)
    model = ref.load_model()
    arr = load_rgb(args.input)
    batch, size = pad_reflect(to_batch(arr, scale="tanh"))
    with torch.no_grad():
        out = crop_back(model(batch), size)
    rgb = ((out[0].permute(1, 2, 0).numpy() + 1.0) * 0.5 * 255.0)
    rgb = np.clip(np.floor(rgb + 0.5), 0, 255).astype(np.uint8)
    Image.fromarray(rgb, mode="RGB").save(args.output, format="PNG")


def main(argv=None) -> int:
    return run_adapter_main(argv, "sketch3d-style-adapter", _worker)


if __name__ == "__main__":
    sys.exit(main())
