from collections import Counter

import numpy as np
import pytest

from sketch3d.errors import DegenerateDepthError, InvalidParameterError
from sketch3d.image import Image
from sketch3d.mesh import DepthMap, depth_to_mesh, export_obj, normalize_depth, parse_obj


def gray_texture(w, h, value=180):
    return Image(np.full((h, w), value, np.uint8))


def test_normalize_depth_affine():
    d = DepthMap(np.array([[2.0, 4.0], [6.0, 4.0]]))
    out = normalize_depth(d).values
    assert np.allclose(out, [[0.0, 0.5], [1.0, 0.5]])


def test_normalize_depth_identity_when_already_unit():
    vals = np.array([[0.0, 0.25], [0.75, 1.0]])
    out = normalize_depth(DepthMap(vals)).values
    assert np.array_equal(out, vals)


def test_normalize_depth_rejects_constant():
    with pytest.raises(DegenerateDepthError):
        normalize_depth(DepthMap(np.full((3, 3), 5.0)))


def test_depthmap_validation():
    with pytest.raises(InvalidParameterError):
        DepthMap(np.array([[1.0, -0.5]]))
    with pytest.raises(InvalidParameterError):
        DepthMap(np.array([[1.0, np.inf]]))


def test_smallest_grid_mesh():
    d = DepthMap(np.array([[0.0, 1.0], [2.0, 3.0]]))
    mesh = depth_to_mesh(d, gray_texture(2, 2), relief=0.5)
    assert mesh.vertices.shape == (4, 3)
    assert mesh.faces.shape == (2, 3)
    # z = -relief * normalized depth
    assert np.allclose(sorted(mesh.vertices[:, 2]),
                       [-0.5, -0.5 * 2 / 3, -0.5 / 3, 0.0])


def test_mesh_counts_4x3():
    d = DepthMap(np.arange(12, dtype=float).reshape(3, 4))
    mesh = depth_to_mesh(d, gray_texture(4, 3))
    assert len(mesh.vertices) == 12
    assert len(mesh.faces) == 12  # 2*(4-1)*(3-1)


def test_mesh_dimension_mismatch():
    d = DepthMap(np.arange(12, dtype=float).reshape(3, 4))
    with pytest.raises(InvalidParameterError):
        depth_to_mesh(d, gray_texture(5, 3))


def test_planar_ramp_is_coplanar():
    jj, ii = np.meshgrid(np.arange(9, dtype=float), np.arange(7, dtype=float))
    d = DepthMap(2.0 * jj + 3.0 * ii + 1.0)
    mesh = depth_to_mesh(d, gray_texture(9, 7))
    v = mesh.vertices
    a = np.column_stack([v[:, 0], v[:, 1], np.ones(len(v))])
    coeff, *_ = np.linalg.lstsq(a, v[:, 2], rcond=None)
    residual = np.abs(a @ coeff - v[:, 2]).max()
    assert residual < 1e-9


def test_winding_is_ccw_from_plus_z():
    d = DepthMap(np.arange(6, dtype=float).reshape(2, 3))
    mesh = depth_to_mesh(d, gray_texture(3, 2))
    v = mesh.vertices
    for i, j, k in mesh.faces:
        ab = v[j, :2] - v[i, :2]
        ac = v[k, :2] - v[i, :2]
        assert ab[0] * ac[1] - ab[1] * ac[0] > 0


def test_interior_edges_shared_by_two_triangles(rng):
    w, h = 7, 5
    d = DepthMap(rng.uniform(0, 4, (h, w)))
    mesh = depth_to_mesh(d, gray_texture(w, h))
    edges = Counter()
    for i, j, k in mesh.faces:
        for e in ((i, j), (j, k), (k, i)):
            edges[tuple(sorted(e))] += 1
    assert set(edges.values()) <= {1, 2}
    # boundary edge count of the grid: the open edges of the triangulation
    boundary = [e for e, c in edges.items() if c == 1]
    assert len(boundary) == 2 * (w - 1) + 2 * (h - 1)


def test_ranges_and_monotonicity(rng):
    w, h = 11, 9
    base = rng.uniform(0.0, 1.0, (h, w))
    base[0, 0] = 0.0
    base[-1, -1] = 1.0
    deeper = base.copy()
    deeper[3:6, 3:8] = np.minimum(deeper[3:6, 3:8] + 0.4, 1.0)
    relief = 0.3
    m1 = depth_to_mesh(DepthMap(base), gray_texture(w, h), relief)
    m2 = depth_to_mesh(DepthMap(deeper), gray_texture(w, h), relief)
    for m in (m1, m2):
        assert m.vertices[:, 2].min() >= -relief - 1e-12
        assert m.vertices[:, 2].max() <= 0.0
        assert m.uvs.min() >= 0.0 and m.uvs.max() <= 1.0
    # same normalization bounds (0 and 1 pinned), deeper everywhere -> z not higher
    z1 = m1.vertices[:, 2]
    z2 = m2.vertices[:, 2]
    assert (z2 <= z1 + 1e-12).all()


def test_export_counts_and_format(tmp_path):
    d = DepthMap(np.array([[0.0, 1.0], [2.0, 3.0]]))
    mesh = depth_to_mesh(d, gray_texture(2, 2))
    paths = export_obj(mesh, tmp_path / "tiny.obj")
    lines = open(paths["obj"]).read().splitlines()
    assert sum(1 for ln in lines if ln.startswith("v ")) == 4
    assert sum(1 for ln in lines if ln.startswith("vt ")) == 4
    face_lines = [ln for ln in lines if ln.startswith("f ")]
    assert len(face_lines) == 2
    for ln in face_lines:
        for token in ln.split()[1:]:
            a, b = token.split("/")
            assert a == b
    mtl = open(paths["mtl"]).read()
    assert "map_Kd tiny_texture.png" in mtl


def test_export_roundtrip(tmp_path, rng):
    w, h = 13, 9
    d = DepthMap(rng.uniform(0, 9, (h, w)))
    tex = Image(rng.integers(0, 256, (h, w, 3), dtype=np.uint8))
    mesh = depth_to_mesh(d, tex, relief=0.45)
    paths = export_obj(mesh, tmp_path / "grid.obj")
    again = parse_obj(paths["obj"])
    assert np.abs(again.vertices - mesh.vertices).max() < 1e-6
    assert np.abs(again.uvs - mesh.uvs).max() < 1e-6
    assert np.array_equal(again.faces, mesh.faces)
    assert np.array_equal(again.texture.array, tex.array)
