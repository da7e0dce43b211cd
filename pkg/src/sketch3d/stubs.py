"""Built-in adapter stubs: `python -m sketch3d.stubs {style,depth} ...`.

They speak the same process-and-file protocol as real neural adapters,
so the full pipeline runs standalone:

- style: copies the input file verbatim (the pipeline always hands the
  style stage a 3-channel PNG, so the copy satisfies the contract).
- depth: emits a 16-bit grayscale PNG of the input's size, linear in
  row index — 0 (nearest) on the top row, 65535 (farthest) on the
  bottom row.
"""

import argparse
import shutil
import sys

import numpy as np
from PIL import Image as PILImage

from sketch3d.image import save_depth_png16


def style_stub(in_path: str, out_path: str) -> None:
    shutil.copyfile(in_path, out_path)


def depth_stub(in_path: str, out_path: str) -> None:
    with PILImage.open(in_path) as im:
        w, h = im.size
    rows = np.arange(h, dtype=np.float64)
    if h > 1:
        column = np.floor(65535.0 * rows / (h - 1) + 0.5)
    else:
        column = np.zeros(1)
    grad = np.repeat(column[:, None], w, axis=1).astype(np.uint16)
    save_depth_png16(grad, out_path)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="python -m sketch3d.stubs")
    parser.add_argument("kind", choices=["style", "depth"])
    parser.add_argument("--input", required=True)
    parser.add_argument("--output", required=True)
    args = parser.parse_args(argv)
    try:
        if args.kind == "style":
            style_stub(args.input, args.output)
        else:
            depth_stub(args.input, args.output)
    except Exception as exc:
        print(f"stub adapter failed: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
