import math

from hypothesis import given, settings, strategies as st
import numpy as np
import pytest

from regge_he import geom
from regge_he.errors import DegenerateTet, DegenerateTriangle, IllConditioned

from support import dihedral_oracle, random_tet, tet_lengths_from_points

ORTHOSCHEME = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]], dtype=float)
REGULAR = np.array([(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)], dtype=float) / math.sqrt(8)

coords = st.lists(st.floats(-10, 10, allow_nan=False), min_size=12, max_size=12)


def _fd_jacobian(L, h=1e-5):
    """Five-point central differences of the dihedral angles."""
    J = np.zeros((6, 6))
    for f in range(6):
        step = h * L[f]
        vals = []
        for k in (-2, -1, 1, 2):
            x = np.array(L, dtype=float)
            x[f] += k * step
            vals.append(geom.dihedral_angles(x))
        J[:, f] = (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * step)
    return J


def test_triangle_angles_equilateral():
    assert np.allclose(geom.triangle_angles(1, 1, 1), [math.pi / 3] * 3, atol=1e-15)


def test_triangle_angles_right():
    a, b, c = geom.triangle_angles(3, 4, 5)
    assert c == pytest.approx(math.pi / 2, abs=1e-15)
    assert a + b + c == pytest.approx(math.pi, abs=1e-15)


@pytest.mark.parametrize("sides", [(1, 1, 2), (1, 2, 4), (0, 1, 1)])
def test_triangle_degenerate(sides):
    with pytest.raises(DegenerateTriangle):
        geom.triangle_angles(*sides)


def test_volume_regular_matches_coordinates():
    L = tet_lengths_from_points(REGULAR)
    assert L == pytest.approx(np.ones(6))
    det_volume = abs(np.linalg.det(REGULAR[1:] - REGULAR[0])) / 6
    assert geom.tet_volume(L) == pytest.approx(det_volume, rel=1e-13)
    assert geom.tet_volume(np.ones(6)) == pytest.approx(math.sqrt(2) / 12, rel=1e-13)


def test_volume_orthoscheme():
    L = tet_lengths_from_points(ORTHOSCHEME)
    assert geom.tet_volume(L) == pytest.approx(1 / 6, rel=1e-13)


def test_volume_flat_face_raises_and_names_tet():
    with pytest.raises(DegenerateTet) as info:
        geom.tet_volume([1, 1, 1, 1, 1, 2], tet=7)
    assert info.value.tet == 7


def test_coplanar_points_are_degenerate():
    p = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]], dtype=float)
    assert not geom.is_admissible(tet_lengths_from_points(p))


def test_dihedral_regular():
    assert np.allclose(geom.dihedral_angles(np.ones(6)), math.acos(1 / 3), atol=1e-14)


def test_dihedral_orthoscheme_right_angles_on_cube_edges():
    theta = geom.dihedral_angles(tet_lengths_from_points(ORTHOSCHEME))
    # edges 01, 02, 03 are the cube edges at the corner
    assert np.allclose(theta[:3], math.pi / 2, atol=1e-14)
    assert np.allclose(theta, dihedral_oracle(ORTHOSCHEME), atol=1e-14)


def test_dihedral_near_flat_stays_open():
    p = REGULAR.copy()
    p[3] = p[:3].mean(axis=0) + np.array([0, 0, 1e-4])
    p[3] += 0.3 * (p[0] - p[3])
    theta = geom.dihedral_angles(tet_lengths_from_points(p))
    assert np.all(theta > 0) and np.all(theta < math.pi)
    assert theta.min() < 1e-3 or theta.max() > math.pi - 1e-3


def test_dihedral_matches_coordinate_oracle_random():
    rng = np.random.default_rng(11)
    for _ in range(200):
        p = rng.normal(size=(4, 3))
        L = tet_lengths_from_points(p)
        if geom.cayley_menger(L) < 1e-4 * L.mean() ** 6:
            continue
        assert np.allclose(geom.dihedral_angles(L), dihedral_oracle(p), atol=1e-10)


def test_jacobian_regular_closed_form():
    J = geom.dihedral_jacobian(np.ones(6))
    V = math.sqrt(2) / 12
    assert np.allclose(np.diag(J), 1 / (18 * V), rtol=1e-12)
    for e, f in enumerate(geom.OPPOSITE_EDGE):
        assert J[e, f] == pytest.approx(1 / (6 * V), rel=1e-12)


def test_jacobian_schlaefli_regular():
    L = np.ones(6)
    assert np.abs(L @ geom.dihedral_jacobian(L)).max() <= 1e-10


def test_jacobian_matches_finite_differences():
    rng = np.random.default_rng(5)
    for _ in range(50):
        L = random_tet(rng, min_quality=1e-2)
        J = geom.dihedral_jacobian(L)
        fd = _fd_jacobian(L)
        assert np.abs(J - fd).max() <= 1e-6 * np.abs(J).max()


def test_jacobian_is_symmetric():
    rng = np.random.default_rng(6)
    for _ in range(50):
        J = geom.dihedral_jacobian(random_tet(rng))
        assert np.abs(J - J.T).max() <= 1e-12 * np.abs(J).max()


def test_jacobian_ill_conditioned_raises():
    p = REGULAR.copy()
    p[3] = p[:3].mean(axis=0) + np.array([0, 0, 1e-5])
    L = tet_lengths_from_points(p)
    assert geom.is_admissible(L)
    with pytest.raises(IllConditioned):
        geom.dihedral_jacobian(L, tet=3)


@settings(max_examples=200, deadline=None)
@given(coords)
def test_dihedral_properties(xs):
    p = np.array(xs).reshape(4, 3)
    L = tet_lengths_from_points(p)
    if not np.all(L > 1e-3) or geom.cayley_menger(L) <= 1e-6 * L.mean() ** 6:
        return
    theta = geom.dihedral_angles(L)
    assert np.all((theta > 0) & (theta < math.pi))
    # the link of a vertex is a spherical triangle with these angles: the sum
    # exceeds pi and the polar triangle (sides pi - angle) obeys the triangle inequality
    for v in range(4):
        at_v = [theta[geom.TET_EDGE_INDEX[tuple(sorted((v, w)))]] for w in range(4) if w != v]
        assert sum(at_v) > math.pi - 1e-9
        for a in range(3):
            assert at_v[(a + 1) % 3] + at_v[(a + 2) % 3] < math.pi + at_v[a] + 1e-9


@settings(max_examples=200, deadline=None)
@given(coords, st.floats(0.1, 10))
def test_scale_invariance(xs, lam):
    p = np.array(xs).reshape(4, 3)
    L = tet_lengths_from_points(p)
    if not np.all(L > 1e-3) or geom.cayley_menger(L) <= 1e-4 * L.mean() ** 6:
        return
    assert np.allclose(geom.dihedral_angles(lam * L), geom.dihedral_angles(L), atol=1e-10)
    assert geom.tet_volume(lam * L) == pytest.approx(lam ** 3 * geom.tet_volume(L), rel=1e-9)
