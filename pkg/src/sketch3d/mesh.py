"""Depth maps to textured height-field meshes, with Wavefront OBJ export.

The mesh is a regular grid over the unit square (x right, y up), two
counter-clockwise triangles per cell, displaced along -z by the
normalized depth times a relief factor: larger depth values are farther
from the viewer.  UVs mirror the vertex grid so the texture drapes 1:1.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass

import numpy as np

from sketch3d.errors import DegenerateDepthError, InvalidParameterError
from sketch3d.image import Image

DEFAULT_RELIEF = 0.3


@dataclass(frozen=True)
class DepthMap:
    values: np.ndarray        # (h, w) float64, finite, >= 0

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if arr.ndim != 2:
            raise InvalidParameterError(f"depth map must be 2-D, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidParameterError("depth map contains NaN or Inf")
        if np.any(arr < 0):
            raise InvalidParameterError("depth values must be >= 0")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class TexturedMesh:
    vertices: np.ndarray      # (n, 3) float64
    uvs: np.ndarray           # (n, 2) float64 in [0, 1]^2
    faces: np.ndarray         # (m, 3) int64, CCW seen from +z
    texture: Image


def normalize_depth(d: DepthMap) -> DepthMap:
    """Affine rescale to [0, 1]; refuses constant maps."""
    lo = float(d.values.min())
    hi = float(d.values.max())
    if hi - lo <= 0.0:
        raise DegenerateDepthError("depth map is constant; nothing to normalize")
    return DepthMap((d.values - lo) / (hi - lo))


def depth_to_mesh(d: DepthMap, tex: Image, relief: float = DEFAULT_RELIEF) -> TexturedMesh:
    """Grid-triangulate a depth map with the texture draped over it."""
    if relief <= 0:
        raise InvalidParameterError(f"relief must be > 0, got {relief}")
    if (tex.width, tex.height) != (d.width, d.height):
        raise InvalidParameterError(
            f"texture {tex.width}x{tex.height} does not match depth "
            f"{d.width}x{d.height}; resize beforehand")
    w, h = d.width, d.height
    if w < 2 or h < 2:
        raise InvalidParameterError("depth map must be at least 2x2 to mesh")

    z = -relief * normalize_depth(d).values
    jj, ii = np.meshgrid(np.arange(w, dtype=np.float64),
                         np.arange(h, dtype=np.float64))
    xs = jj / (w - 1)
    ys = 1.0 - ii / (h - 1)
    vertices = np.stack([xs.ravel(), ys.ravel(), z.ravel()], axis=1)
    uvs = np.stack([xs.ravel(), ys.ravel()], axis=1)

    # per grid cell: corners a=(i,j) b=(i,j+1) c=(i+1,j) d=(i+1,j+1);
    # (a,c,d) and (a,d,b) wind counter-clockwise seen from +z
    idx = np.arange(h * w).reshape(h, w)
    a = idx[:-1, :-1].ravel()
    b = idx[:-1, 1:].ravel()
    c = idx[1:, :-1].ravel()
    dd = idx[1:, 1:].ravel()
    faces = np.empty((2 * (h - 1) * (w - 1), 3), dtype=np.int64)
    faces[0::2] = np.stack([a, c, dd], axis=1)
    faces[1::2] = np.stack([a, dd, b], axis=1)
    return TexturedMesh(vertices=vertices, uvs=uvs, faces=faces, texture=tex)


def _write_atomic(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def export_obj(mesh: TexturedMesh, path) -> dict:
    """Write <path>, a sibling .mtl, and the texture PNG; returns the paths.

    Records: "v x y z" / "vt u v" (6 fractional digits) and
    "f i/i j/j k/k" with 1-based indices.
    """
    path = str(path)
    if not path.endswith(".obj"):
        path += ".obj"
    base = path[:-4]
    mtl_path = base + ".mtl"
    tex_path = base + "_texture.png"
    stem = os.path.basename(base)

    try:
        lines = [f"mtllib {stem}.mtl", "usemtl sketch3d_surface"]
        for x, y, z in mesh.vertices:
            lines.append(f"v {x:.6f} {y:.6f} {z:.6f}")
        for u, v in mesh.uvs:
            lines.append(f"vt {u:.6f} {v:.6f}")
        for i, j, k in mesh.faces + 1:
            lines.append(f"f {i}/{i} {j}/{j} {k}/{k}")
        _write_atomic(path, "\n".join(lines) + "\n")

        mtl = (
            "newmtl sketch3d_surface\n"
            "Ka 1.000000 1.000000 1.000000\n"
            "Kd 1.000000 1.000000 1.000000\n"
            "Ks 0.000000 0.000000 0.000000\n"
            f"map_Kd {stem}_texture.png\n"
        )
        _write_atomic(mtl_path, mtl)
        mesh.texture.save(tex_path)
    except OSError as exc:
        raise OSError(f"failed to export mesh to {path}: {exc}") from exc
    return {"obj": path, "mtl": mtl_path, "texture": tex_path}


def parse_obj(path) -> TexturedMesh:
    """Re-read an exported OBJ (the inverse of export_obj)."""
    path = str(path)
    vertices, uvs, faces = [], [], []
    tex_file = None
    base_dir = os.path.dirname(os.path.abspath(path))
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                vertices.append([float(v) for v in parts[1:4]])
            elif parts[0] == "vt":
                uvs.append([float(v) for v in parts[1:3]])
            elif parts[0] == "f":
                faces.append([int(p.split("/")[0]) - 1 for p in parts[1:4]])
            elif parts[0] == "mtllib":
                mtl = os.path.join(base_dir, parts[1])
                if os.path.exists(mtl):
                    with open(mtl) as mf:
                        for ml in mf:
                            mp = ml.split()
                            if mp and mp[0] == "map_Kd":
                                tex_file = os.path.join(base_dir, mp[1])
    if tex_file is None or not os.path.exists(tex_file):
        raise InvalidParameterError(f"OBJ at {path} has no resolvable texture")
    return TexturedMesh(
        vertices=np.array(vertices, dtype=np.float64),
        uvs=np.array(uvs, dtype=np.float64),
        faces=np.array(faces, dtype=np.int64),
        texture=Image.load(tex_file),
    )
