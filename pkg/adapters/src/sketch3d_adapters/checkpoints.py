"""Checkpoint references with mandatory content-hash verification.

A checkpoint is trusted only if its SHA-256 is known: either passed
explicitly or read from the sidecar file `<checkpoint>.sha256` (first
whitespace-separated token).  `sketch3d-adapters-init` materializes
seeded, randomly initialized checkpoints with sidecars — enough to
exercise the full pipeline and conformance suite; swap in trained
weights (same architectures, see models.py) for real output quality.
"""

import argparse
import hashlib
import os
import sys
from dataclasses import dataclass

import torch

from sketch3d_adapters.models import build_model

ENV_VARS = {
    "style": "SKETCH3D_STYLE_CHECKPOINT",
    "depth": "SKETCH3D_DEPTH_CHECKPOINT",
}


class CheckpointError(Exception):
    pass


def sha256_of(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass(frozen=True)
class CheckpointRef:
    kind: str
    path: str
    sha256: str

    @classmethod
    def resolve(cls, kind: str, path: str | None, sha256: str | None) -> "CheckpointRef":
        path = path or os.environ.get(ENV_VARS[kind])
        if not path:
            raise CheckpointError(
                f"no {kind} checkpoint given: pass --checkpoint or set "
                f"{ENV_VARS[kind]} (create one with sketch3d-adapters-init)")
        if not os.path.exists(path):
            raise CheckpointError(f"checkpoint {path} does not exist")
        if sha256 is None:
            sidecar = path + ".sha256"
            if not os.path.exists(sidecar):
                raise CheckpointError(
                    f"no hash for {path}: pass --checkpoint-hash or write "
                    f"{sidecar} (e.g. `sha256sum {path} > {sidecar}`)")
            with open(sidecar) as fh:
                sha256 = fh.read().split()[0]
        return cls(kind=kind, path=path, sha256=sha256.lower())

    def load_model(self) -> torch.nn.Module:
        actual = sha256_of(self.path)
        if actual != self.sha256:
            raise CheckpointError(
                f"checkpoint hash mismatch for {self.path}: "
                f"expected {self.sha256}, got {actual}")
        model = build_model(self.kind)
        state = torch.load(self.path, map_location="cpu", weights_only=True)
        model.load_state_dict(state)
        model.eval()
        return model


def init_checkpoint(kind: str, path: str, seed: int = 0) -> CheckpointRef:
    """Write a seeded randomly-initialized checkpoint plus its hash sidecar."""
    torch.manual_seed(seed)
    model = build_model(kind)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    torch.save(model.state_dict(), path)
    digest = sha256_of(path)
    with open(path + ".sha256", "w") as fh:
        fh.write(f"{digest}  {os.path.basename(path)}\n")
    return CheckpointRef(kind=kind, path=path, sha256=digest)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="Create seeded untrained checkpoints for the adapters.")
    parser.add_argument("out_dir")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--kinds", nargs="+", default=["style", "depth"],
                        choices=["style", "depth"])
    args = parser.parse_args(argv)
    for kind in args.kinds:
        path = os.path.join(args.out_dir, f"{kind}_untrained.pt")
        ref = init_checkpoint(kind, path, args.seed)
        print(f"{kind}: {ref.path} sha256={ref.sha256[:16]}...")
    return 0


if __name__ == "__main__":
    sys.exit(main())
