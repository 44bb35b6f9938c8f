import numpy as np
import pytest

from forchfem.mesh import edge_incidence, element_geometry, triangle_geometry, unit_square_mesh


@pytest.mark.parametrize("N", [1, 2, 3, 4, 7, 16])
def test_counts_and_areas(N):
    m = unit_square_mesh(N)
    assert m.n_vertices == (N + 1) ** 2
    assert m.n_triangles == 2 * N * N
    assert m.boundary_mask.sum() == 4 * N
    assert np.allclose(m.areas, 1 / (2 * N * N), rtol=1e-14)
    assert m.areas.sum() == pytest.approx(1.0, rel=1e-14)
    assert m.h == 1 / N


def test_n1_all_boundary():
    m = unit_square_mesh(1)
    assert m.boundary_mask.all()
    assert m.free_nodes.size == 0


@pytest.mark.parametrize("N", [0, -3, 2.5])
def test_bad_N(N):
    with pytest.raises(ValueError):
        unit_square_mesh(N)


@pytest.mark.parametrize("N", [1, 4, 9])
def test_conformity(N):
    edges, counts = edge_incidence(unit_square_mesh(N))
    assert counts.max() <= 2
    on_boundary = unit_square_mesh(N).boundary_mask[edges].all(axis=1) & (counts == 1)
    assert on_boundary.sum() == 4 * N
    assert (counts == 1).sum() == 4 * N
    # Euler: V - E + F = 1 for a triangulated disk
    assert (N + 1) ** 2 - len(edges) + 2 * N * N == 1


def test_same_shape_everywhere():
    m = unit_square_mesh(6)
    p = m.vertices[m.triangles]
    angles = []
    for k in range(3):
        a, b, c = p[:, k], p[:, (k + 1) % 3], p[:, (k + 2) % 3]
        u, v = b - a, c - a
        cosang = np.sum(u * v, axis=1) / np.linalg.norm(u, axis=1) / np.linalg.norm(v, axis=1)
        angles.append(np.degrees(np.arccos(cosang)))
    min_angle = np.min(angles, axis=0)
    assert np.allclose(min_angle, 45.0)


def test_reference_triangle():
    area, grads = triangle_geometry(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    assert area == 0.5
    assert np.array_equal(grads, [[-1, -1], [1, 0], [0, 1]])


def test_scaling():
    h = 0.125
    area, grads = triangle_geometry(h * np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    assert area == pytest.approx(0.5 * h**2)
    assert np.allclose(grads, np.array([[-1, -1], [1, 0], [0, 1]]) / h)


def test_partition_of_unity(rng):
    pts = rng.uniform(-5, 5, (100, 3, 2))
    area, grads = triangle_geometry(pts)
    assert np.allclose(grads.sum(axis=1), 0.0, atol=1e-9 * np.abs(grads).max())
    # gradients reproduce the coordinate functions: sum_k x_k grad phi_k = e_1
    assert np.allclose(np.einsum("ek,ekd->ed", pts[..., 0], grads), [1.0, 0.0], atol=1e-8)


def test_structured_gradients_are_multiples_of_one_over_h():
    m = unit_square_mesh(8)
    assert np.all(m.areas > 0)
    assert set(np.round(m.grads.ravel() * m.h, 12)) <= {-1.0, 0.0, 1.0}


def test_element_geometry():
    m = unit_square_mesh(2)
    geo = element_geometry(m, 3)
    assert geo.area == 0.125
    assert np.allclose(geo.grad_phi.sum(axis=0), 0)
    with pytest.raises(IndexError):
        element_geometry(m, 8)


def test_boundary_detection():
    m = unit_square_mesh(5)
    x, y = m.vertices.T
    expected = (x == 0) | (x == 1) | (y == 0) | (y == 1)
    assert np.array_equal(m.boundary_mask, expected)


def test_dump(tmp_path):
    m = unit_square_mesh(2)
    path = tmp_path / "mesh.txt"
    m.write(path)
    lines = path.read_text().splitlines()
    assert sum(l.startswith("v ") for l in lines) == 9
    tris = [tuple(map(int, l.split()[1:])) for l in lines if l.startswith("t ")]
    assert np.array_equal(np.array(tris), m.triangles)
    verts = np.array([list(map(float, l.split()[1:])) for l in lines if l.startswith("v ")])
    assert np.array_equal(verts, m.vertices)
