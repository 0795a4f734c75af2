import math

import numpy as np
import pytest

from regge_he import io, mesh, polyhedra
from regge_he.errors import Disconnected, InputError, NonManifoldFace, NotASphere, PyramidInfeasible, DegenerateTet

from support import FIXTURES, surface_metric


def test_single_tet_counts():
    t3 = mesh.build_complex([[0, 1, 2, 3]])
    assert len(t3.edges) == 6
    assert len(t3.boundary_edges) == 6 and not t3.interior_edges
    assert len(t3.boundary_triangles) == 4


def test_two_tets_share_a_face():
    t3 = mesh.build_complex([[0, 1, 2, 3], [0, 1, 2, 4]])
    assert len(t3.edges) == 9
    assert len(t3.boundary_edges) == 9
    interior_triangles = [k for k, owners in t3.triangle_tets.items() if len(owners) == 2]
    assert interior_triangles == [(0, 1, 2)]
    assert len(t3.boundary_triangles) == 6


def test_three_tets_on_a_triangle():
    with pytest.raises(NonManifoldFace):
        mesh.build_complex([[0, 1, 2, 3], [0, 1, 2, 4], [0, 1, 2, 5]])


def test_disconnected_and_repeated_vertex():
    with pytest.raises(Disconnected):
        mesh.build_complex([[0, 1, 2, 3], [4, 5, 6, 7]])
    with pytest.raises(DegenerateTet):
        mesh.build_complex([[0, 1, 1, 3]])


def test_edge_classes_partition_edges():
    t3, _ = io.load_mesh(FIXTURES / "flat_torus.json")
    assert len(t3.tets) == 162
    assert set(t3.interior_edges) | set(t3.boundary_edges) == set(range(len(t3.edges)))
    assert not t3.boundary_edges


def test_lengths_mapping_is_order_free():
    t3 = mesh.build_complex([[0, 1, 2, 3]])
    L = mesh.lengths_from_mapping(t3, {(1, 0): 2.0, (0, 2): 1.0, (0, 3): 1.0, (2, 1): 1.5, (1, 3): 1.5, (3, 2): 1.0})
    assert L[t3.edge_index[(0, 1)]] == 2.0
    with pytest.raises(InputError):
        mesh.lengths_from_mapping(t3, {(0, 1): 1.0})


def test_cone_over_tetrahedron_counts():
    s = surface_metric(polyhedra.tetrahedron())
    sc = mesh.cone_over(s, np.ones(4))
    assert len(sc.t3.interior_edges) == 4
    assert len(sc.t3.boundary_edges) == 6
    assert sorted(sc.t3.edges[e] for e in sc.t3.interior_edges) == [(i, 4) for i in range(4)]


def test_cone_over_small_radii_infeasible():
    s = surface_metric(polyhedra.tetrahedron())
    # the face circumradius is 1/sqrt(3); the pyramid cannot close at 0.2
    with pytest.raises(PyramidInfeasible) as info:
        mesh.cone_over(s, np.full(4, 0.2))
    assert info.value.triangle == 0


def test_cone_over_cube_counts():
    s = surface_metric(polyhedra.cube())
    sc = mesh.cone_over(s, np.full(8, math.sqrt(3) / 2))
    assert len(sc.t3.tets) == 12
    assert len(sc.t3.interior_edges) == 8
    assert len(sc.t3.boundary_edges) == 18


def test_boundary_of_single_tet():
    t3 = mesh.build_complex([[0, 1, 2, 3]])
    s = mesh.boundary_surface(t3, np.ones(6))
    assert len(s.triangles) == 4
    assert np.allclose(s.cone_angles(), math.pi, atol=1e-14)


def test_boundary_of_cube_star():
    s = surface_metric(polyhedra.cube())
    sc = mesh.cone_over(s, np.full(8, math.sqrt(3) / 2))
    b = mesh.boundary_surface(sc.t3, sc.lengths)
    # every cube corner sees three right angles, split or not by diagonals
    assert np.allclose(b.cone_angles(), 1.5 * math.pi, atol=1e-13)
    assert b.curvatures().sum() == pytest.approx(4 * math.pi, abs=1e-12)


def test_closed_manifold_has_no_boundary_sphere():
    t3, L = io.load_mesh(FIXTURES / "flat_torus.json")
    with pytest.raises(NotASphere):
        mesh.boundary_surface(t3, L)


def test_make_surface_rejects_open_surface():
    with pytest.raises(NotASphere):
        mesh.make_surface([(0, 1, 2), (0, 2, 3)], {(0, 1): 1, (1, 2): 1, (0, 2): 1, (2, 3): 1, (0, 3): 1})


def test_orient_faces_outward():
    cube = polyhedra.cube()
    shuffled = [f if k % 2 else (f[0], f[2], f[1]) for k, f in enumerate(cube.faces)]
    out = mesh.orient_faces(shuffled, cube.points - cube.points.mean(axis=0))
    P = cube.points - cube.points.mean(axis=0)
    assert all(np.linalg.det(P[list(f)]) > 0 for f in out)
