"""Shared inference plumbing: image <-> tensor, pad-to-multiple, CLI glue."""

import argparse
import sys

import numpy as np
import torch
import torch.nn.functional as F
from PIL import Image

PAD_MULTIPLE = 8


def load_rgb(path) -> np.ndarray:
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"))


def to_batch(arr: np.ndarray, scale: str) -> torch.Tensor:
    t = torch.from_numpy(np.ascontiguousarray(arr)).permute(2, 0, 1).float()
    t = t / 255.0
    if scale == "tanh":
        t = t * 2.0 - 1.0
    return t.unsqueeze(0)


def pad_reflect(batch: torch.Tensor) -> tuple[torch.Tensor, tuple[int, int]]:
    _, _, h, w = batch.shape
    ph = (-h) % PAD_MULTIPLE
    pw = (-w) % PAD_MULTIPLE
    if ph or pw:
        batch = F.pad(batch, (0, pw, 0, ph), mode="reflect")
    return batch, (h, w)


def crop_back(batch: torch.Tensor, size: tuple[int, int]) -> torch.Tensor:
    h, w = size
    return batch[:, :, :h, :w]


def adapter_arg_parser(prog: str) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=prog)
    parser.add_argument("--input", required=True)
    parser.add_argument("--output", required=True)
    parser.add_argument("--checkpoint", default=None)
    parser.add_argument("--checkpoint-hash", default=None)
    return parser


def run_adapter_main(argv, prog, worker) -> int:
    """Uniform CLI shell: argument parsing and the nonzero-exit error path."""
    args = adapter_arg_parser(prog).parse_args(argv)
    try:
        worker(args)
    except Exception as exc:
        print(f"{prog}: {exc}", file=sys.stderr)
        return 1
    return 0
