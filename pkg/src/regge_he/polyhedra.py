"""Embedded triangulated polyhedra and a small built-in catalog."""

from dataclasses import dataclass
import math

import numpy as np
from scipy.spatial import ConvexHull

from .errors import DegenerateTwist, InputError
from .mesh import orient_faces

GOLDEN = (1 + math.sqrt(5)) / 2


@dataclass(frozen=True)
class EmbeddedPolyhedron:
    points: np.ndarray
    faces: tuple
    star_point: np.ndarray
    name: str = ""

    @property
    def vertex_count(self):
        return len(self.points)

    def signed_pyramid_volumes(self, apex=None):
        a = self.star_point if apex is None else np.asarray(apex, dtype=float)
        P = self.points - a
        return np.array([np.linalg.det(P[list(f)]) / 6.0 for f in self.faces])


def _make(name, points, faces, star_point=None):
    points = np.array(points, dtype=float)
    faces = orient_faces(faces, points - points.mean(axis=0))
    a = points.mean(axis=0) if star_point is None else np.asarray(star_point, dtype=float)
    return EmbeddedPolyhedron(points=points, faces=faces, star_point=a, name=name)


def _hull_faces(points):
    return [tuple(int(v) for v in s) for s in ConvexHull(points).simplices]


def convex_polyhedron(points, name="hull"):
    """Convex hull of points in general position (simplicial faces)."""
    points = np.asarray(points, dtype=float)
    hull = ConvexHull(points)
    if len(hull.vertices) != len(points):
        raise InputError("not every point is a vertex of the convex hull")
    return _make(name, points, _hull_faces(points))


def random_convex(rng, n, name="random"):
    """Convex hull of ``n`` random points on the unit sphere.

    Points in exact general position are almost sure, so the hull is
    simplicial with every point a vertex; degenerate draws are redrawn.
    """
    for _ in range(100):
        x = rng.normal(size=(n, 3))
        x /= np.linalg.norm(x, axis=1)[:, None]
        try:
            return convex_polyhedron(x, name=name)
        except InputError:
            continue
    raise InputError(f"could not draw {n} points in convex position")


def tetrahedron():
    pts = np.array([(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)], dtype=float) / math.sqrt(8)
    return _make("tetrahedron", pts, [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)])


def cube():
    """Unit cube, each square face split along one diagonal."""
    pts = [(x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1)]
    # vertex index = 4x + 2y + z
    quads = [(0, 1, 3, 2), (4, 5, 7, 6), (0, 1, 5, 4), (2, 3, 7, 6), (0, 2, 6, 4), (1, 3, 7, 5)]
    faces = []
    for a, b, c, d in quads:
        faces += [(a, b, c), (a, c, d)]
    return _make("cube", pts, faces)


def octahedron():
    pts = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    faces = [(x, y, z) for x in (0, 1) for y in (2, 3) for z in (4, 5)]
    return _make("octahedron", pts, faces)


def _icosahedron_points(a, b):
    pts = []
    for s1 in (1, -1):
        for s2 in (1, -1):
            pts += [(0, s1 * a, s2 * b), (s2 * b, 0, s1 * a), (s1 * a, s2 * b, 0)]
    return np.array(pts, dtype=float)


def icosahedron():
    pts = _icosahedron_points(1.0, GOLDEN)
    return _make("icosahedron", pts, _hull_faces(pts))


def jessen():
    """Jessen's orthogonal icosahedron.

    Icosahedral combinatorics (taken from the regular icosahedron with
    vertices at cyclic permutations of (0, +-1, +-phi)) with the vertices
    moved to the cyclic permutations of (0, +-2, +-1). The six edges of
    length 4 become reflex.
    """
    faces = _hull_faces(_icosahedron_points(1.0, GOLDEN))
    pts = _icosahedron_points(2.0, 1.0)
    return _make("jessen", pts, faces, star_point=np.zeros(3))


def schoenhardt(twist_degrees=30.0, height=1.0):
    """Schoenhardt's twisted octahedron.

    Two unit-circumradius equilateral triangles in the planes z=0 and
    z=height, the top one rotated by ``twist_degrees``; each side quad is
    split along the diagonal that becomes reflex under a positive twist.
    """
    if not 0.0 < twist_degrees < 60.0:
        raise DegenerateTwist(f"twist must lie strictly between 0 and 60 degrees, got {twist_degrees}")
    tau = math.radians(twist_degrees)
    pts = []
    for z, off in ((0.0, 0.0), (height, tau)):
        for k in range(3):
            ang = math.pi / 2 + 2 * math.pi * k / 3 + off
            pts.append((math.cos(ang), math.sin(ang), z))
    faces = [(0, 1, 2), (3, 4, 5)]
    for i in range(3):
        j = (i + 1) % 3
        faces += [(i, j, 3 + j), (i, 3 + j, 3 + i)]
    return _make("schoenhardt", pts, faces)


def builtin_polyhedra():
    return {
        "tetrahedron": tetrahedron(),
        "cube": cube(),
        "octahedron": octahedron(),
        "icosahedron": icosahedron(),
        "schoenhardt": schoenhardt(),
        "jessen": jessen(),
    }
