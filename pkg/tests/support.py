"""Shared generators and oracles for the test suite."""

from collections import deque
import itertools
import math
from pathlib import Path

import numpy as np
from scipy.spatial import Delaunay

from regge_he import geom, mesh, polyhedra
from regge_he.mesh import edge_key

FIXTURES = Path(__file__).parent / "fixtures"


def tet_lengths_from_points(p):
    """Six lengths in the fixed order (01, 02, 03, 12, 13, 23)."""
    p = np.asarray(p, dtype=float)
    return np.array([np.linalg.norm(p[i] - p[j]) for i, j in geom.TET_EDGES])


def dihedral_oracle(p):
    """Interior dihedral angles from coordinates, via outward face normals."""
    p = np.asarray(p, dtype=float)
    out = []
    for i, j in geom.TET_EDGES:
        k, m = (v for v in range(4) if v not in (i, j))
        # normals of faces (i, j, k) and (i, j, m), each pointing away from the other vertex
        n1 = np.cross(p[j] - p[i], p[k] - p[i])
        n1 *= -np.sign(n1 @ (p[m] - p[i]))
        n2 = np.cross(p[j] - p[i], p[m] - p[i])
        n2 *= -np.sign(n2 @ (p[k] - p[i]))
        c = n1 @ n2 / (np.linalg.norm(n1) * np.linalg.norm(n2))
        out.append(math.pi - math.acos(max(-1.0, min(1.0, c))))
    return np.array(out)


def random_tet(rng, min_quality=1e-3):
    """Random nondegenerate tet lengths with normalized volume above ``min_quality``."""
    while True:
        p = rng.normal(size=(4, 3))
        L = tet_lengths_from_points(p)
        if geom.cayley_menger(L) > min_quality * (L.mean() ** 6):
            return L


def random_complex(rng, max_tets=10, jitter=0.05):
    """A connected face-glued complex of at most ``max_tets`` tets.

    Built from a Delaunay tetrahedralization of random points; lengths are
    measured and then jittered, so interior edges carry curvature.
    """
    while True:
        pts = rng.normal(size=(rng.integers(6, 12), 3))
        tri = Delaunay(pts)
        want = int(rng.integers(1, max_tets + 1))
        chosen, queue = [0], deque([0])
        while queue and len(chosen) < want:
            for nb in tri.neighbors[queue.popleft()]:
                if nb >= 0 and nb not in chosen and len(chosen) < want:
                    chosen.append(int(nb))
                    queue.append(int(nb))
        cells = tri.simplices[chosen]
        used = sorted(set(cells.ravel()))
        remap = {v: k for k, v in enumerate(used)}
        tets = [[remap[v] for v in c] for c in cells]
        t3 = mesh.build_complex(tets)
        L = mesh.lengths_from_coordinates(t3, pts[used])
        L = L * (1 + jitter * rng.uniform(-1, 1, size=len(L)))
        quality = [geom.cayley_menger(L[t3.tet_edges[n]]) / L[t3.tet_edges[n]].mean() ** 6 for n in range(len(tets))]
        if min(quality) > 1e-3:
            return t3, L


def surface_metric(poly):
    """Boundary cone-metric of an embedded polyhedron."""
    lengths = {}
    for f in poly.faces:
        for a, b in itertools.combinations(f, 2):
            lengths[edge_key(a, b)] = float(np.linalg.norm(poly.points[a] - poly.points[b]))
    return mesh.make_surface(poly.faces, lengths, vertex_count=poly.vertex_count)


def distance_matrix(points):
    P = np.asarray(points, dtype=float)
    return np.linalg.norm(P[:, None, :] - P[None, :, :], axis=2)


def congruence_error(a, b):
    """Max relative gap between the pairwise distance matrices of two point sets."""
    da, db = distance_matrix(a), distance_matrix(b)
    return float(np.abs(da - db).max() / db.max())


def random_polytope(rng, n):
    return polyhedra.random_convex(rng, n)


def doubled_quad(points2d):
    """Sphere metric of a planar quadrilateral a, b, c, d glued to its mirror copy.

    The top sheet uses diagonal a-c and the bottom sheet diagonal b-d.
    """
    P = np.asarray(points2d, dtype=float)
    tris = [(0, 1, 2), (0, 2, 3), (0, 3, 1), (1, 3, 2)]
    lengths = {}
    for t in tris:
        for u, w in itertools.combinations(t, 2):
            lengths[edge_key(u, w)] = float(np.linalg.norm(P[u] - P[w]))
    return mesh.make_surface(tris, lengths)
