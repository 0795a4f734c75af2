"""Simplicial 3-complexes, triangulated cone surfaces and star complexes.

Edges are always canonical sorted vertex pairs. Per-edge data on a
:class:`Triangulation3` lives in numpy arrays aligned with ``t3.edges``.
"""

from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field
from itertools import combinations
import math

import numpy as np

from . import geom
from .errors import (
    DegenerateTet,
    DegenerateTriangle,
    Disconnected,
    InputError,
    NonManifoldFace,
    NotASphere,
    PyramidInfeasible,
)


def edge_key(a, b):
    a, b = int(a), int(b)
    return (a, b) if a < b else (b, a)


def _connected(n_vertices, cells):
    parent = list(range(n_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for cell in cells:
        r = find(cell[0])
        for v in cell[1:]:
            parent[find(v)] = r
    return len({find(v) for v in range(n_vertices)}) == 1


@dataclass(frozen=True)
class Triangulation3:
    vertex_count: int
    tets: tuple
    edges: tuple
    edge_index: dict = field(repr=False)
    triangles: tuple = field(repr=False)
    triangle_tets: dict = field(repr=False)
    boundary_triangles: tuple = field(repr=False)
    interior_edges: tuple = field(repr=False)
    boundary_edges: tuple = field(repr=False)
    tet_edges: np.ndarray = field(repr=False)

    def tet_lengths(self, lengths, t):
        return np.asarray(lengths, dtype=float)[self.tet_edges[t]]


def build_complex(tets, vertex_count=None):
    """Validate a list of tetrahedra and derive edges, triangles and classes."""
    tets = tuple(tuple(int(v) for v in t) for t in tets)
    if not tets:
        raise InputError("a complex needs at least one tetrahedron")
    for n, t in enumerate(tets):
        if len(t) != 4:
            raise InputError(f"tet {n} does not have 4 vertices")
        if min(t) < 0:
            raise InputError(f"tet {n} has a negative vertex index")
        if len(set(t)) != 4:
            raise DegenerateTet(f"tet {n} repeats a vertex: {t}", n)
    used = max(max(t) for t in tets) + 1
    if vertex_count is None:
        vertex_count = used
    elif used > vertex_count:
        raise InputError(f"vertex index {used - 1} out of range for {vertex_count} vertices")

    tri_tets = defaultdict(list)
    for n, t in enumerate(tets):
        for omit in range(3, -1, -1):
            face = tuple(t[k] for k in range(4) if k != omit)
            key = tuple(sorted(face))
            tri_tets[key].append(n)
    for key, owners in tri_tets.items():
        if len(owners) > 2:
            raise NonManifoldFace(f"triangle {key} is shared by {len(owners)} tets")
        if len(owners) == 2 and owners[0] == owners[1]:
            raise NonManifoldFace(f"triangle {key} is glued to its own tet")
    if not _connected(vertex_count, tets):
        raise Disconnected("the complex is not connected")

    edges = sorted({edge_key(t[a], t[b]) for t in tets for a, b in geom.TET_EDGES})
    edge_index = {e: n for n, e in enumerate(edges)}
    tet_edges = np.array(
        [[edge_index[edge_key(t[a], t[b])] for a, b in geom.TET_EDGES] for t in tets], dtype=int
    )
    # boundary triangles, in tet order then local face order
    boundary = []
    for n, t in enumerate(tets):
        for omit in range(3, -1, -1):
            face = tuple(t[k] for k in range(4) if k != omit)
            if len(tri_tets[tuple(sorted(face))]) == 1:
                boundary.append(face)
    on_boundary = set()
    for f in boundary:
        for a, b in ((0, 1), (0, 2), (1, 2)):
            on_boundary.add(edge_index[edge_key(f[a], f[b])])
    interior = tuple(n for n in range(len(edges)) if n not in on_boundary)
    bnd = tuple(sorted(on_boundary))
    return Triangulation3(
        vertex_count=vertex_count,
        tets=tets,
        edges=tuple(edges),
        edge_index=edge_index,
        triangles=tuple(sorted(tri_tets)),
        triangle_tets={k: tuple(v) for k, v in tri_tets.items()},
        boundary_triangles=tuple(boundary),
        interior_edges=interior,
        boundary_edges=bnd,
        tet_edges=tet_edges,
    )


def lengths_from_mapping(t3, mapping):
    """Array of lengths aligned with ``t3.edges`` from an edge -> length mapping."""
    canon = {edge_key(*e): float(v) for e, v in mapping.items()}
    missing = [e for e in t3.edges if e not in canon]
    if missing:
        raise InputError(f"no length given for edge(s) {missing[:5]}")
    extra = set(canon) - set(t3.edge_index)
    if extra:
        raise InputError(f"length given for edge(s) not in the complex: {sorted(extra)[:5]}")
    out = np.array([canon[e] for e in t3.edges])
    if np.any(out <= 0) or not np.all(np.isfinite(out)):
        raise InputError("edge lengths must be finite and strictly positive")
    return out


def lengths_from_coordinates(t3, points):
    points = np.asarray(points, dtype=float)
    return np.array([np.linalg.norm(points[a] - points[b]) for a, b in t3.edges])


def check_admissible(t3, lengths):
    """Raise DegenerateTet naming the first tet that is not Euclidean-realizable."""
    lengths = np.asarray(lengths, dtype=float)
    for n in range(len(t3.tets)):
        geom.tet_volume(lengths[t3.tet_edges[n]], tet=n)


@dataclass(frozen=True)
class ConeSurface:
    """A triangulated metric 2-sphere; lengths keyed by canonical edge."""

    vertex_count: int
    triangles: tuple
    lengths: dict

    @property
    def edges(self):
        return sorted(self.lengths)

    def triangle_angles(self, n):
        """Angles of triangle n at its three vertices, in triangle order."""
        a, b, c = self.triangles[n]
        la = self.lengths[edge_key(b, c)]
        lb = self.lengths[edge_key(a, c)]
        lc = self.lengths[edge_key(a, b)]
        return geom.triangle_angles(la, lb, lc)

    def cone_angles(self):
        out = np.zeros(self.vertex_count)
        for n, tri in enumerate(self.triangles):
            for v, ang in zip(tri, self.triangle_angles(n)):
                out[v] += ang
        return out

    def curvatures(self):
        return 2 * math.pi - self.cone_angles()

    def area(self):
        total = 0.0
        for a, b, c in self.triangles:
            total += geom.triangle_area(
                self.lengths[edge_key(a, b)], self.lengths[edge_key(a, c)], self.lengths[edge_key(b, c)]
            )
        return total


def make_surface(triangles, lengths, vertex_count=None):
    """Validate a closed triangulated sphere with edge lengths."""
    triangles = tuple(tuple(int(v) for v in t) for t in triangles)
    if not triangles:
        raise InputError("a surface needs at least one triangle")
    for n, t in enumerate(triangles):
        if len(t) != 3 or len(set(t)) != 3 or min(t) < 0:
            raise InputError(f"triangle {n} is not a triple of distinct vertex indices: {t}")
    used = max(max(t) for t in triangles) + 1
    if vertex_count is None:
        vertex_count = used
    elif used > vertex_count:
        raise InputError(f"vertex index {used - 1} out of range")
    if len({tuple(sorted(t)) for t in triangles}) != len(triangles):
        raise NotASphere("duplicate triangle")
    counts = Counter(edge_key(t[a], t[b]) for t in triangles for a, b in ((0, 1), (0, 2), (1, 2)))
    bad = [e for e, c in counts.items() if c != 2]
    if bad:
        raise NotASphere(f"edge {bad[0]} is shared by {counts[bad[0]]} triangle(s); surface must be closed")
    if not _connected(vertex_count, triangles):
        raise NotASphere("surface is disconnected or has isolated vertices")
    chi = vertex_count - len(counts) + len(triangles)
    if chi != 2:
        raise NotASphere(f"Euler characteristic {chi} != 2")
    canon = {edge_key(*e): float(v) for e, v in dict(lengths).items()}
    missing = [e for e in counts if e not in canon]
    if missing:
        raise InputError(f"no length given for surface edge(s) {sorted(missing)[:5]}")
    extra = set(canon) - set(counts)
    if extra:
        raise InputError(f"length given for edge(s) not in the surface: {sorted(extra)[:5]}")
    for n, (a, b, c) in enumerate(triangles):
        try:
            geom.triangle_area(canon[edge_key(a, b)], canon[edge_key(a, c)], canon[edge_key(b, c)])
        except DegenerateTriangle as exc:
            raise DegenerateTriangle(f"triangle {n} {triangles[n]}: {exc}") from None
    return ConeSurface(vertex_count=vertex_count, triangles=triangles, lengths=canon)


@dataclass(frozen=True)
class StarComplex:
    """A cone surface coned over an apex with index ``base.vertex_count``."""

    base: ConeSurface
    radii: np.ndarray
    t3: Triangulation3
    lengths: np.ndarray

    @property
    def apex(self):
        return self.base.vertex_count

    @property
    def radial_edges(self):
        """Edge indices (into ``t3.edges``) of the apex edges, by surface vertex."""
        return np.array([self.t3.edge_index[(i, self.apex)] for i in range(self.base.vertex_count)])


def cone_over(surface, radii):
    radii = np.asarray(radii, dtype=float).copy()
    n = surface.vertex_count
    if radii.shape != (n,):
        raise InputError(f"expected {n} radii, got shape {radii.shape}")
    if np.any(radii <= 0) or not np.all(np.isfinite(radii)):
        raise InputError("radii must be finite and strictly positive")
    tets = [(a, b, c, n) for a, b, c in surface.triangles]
    t3 = build_complex(tets, vertex_count=n + 1)
    lengths = np.empty(len(t3.edges))
    for k, (a, b) in enumerate(t3.edges):
        lengths[k] = radii[a] if b == n else surface.lengths[(a, b)]
    for k, tri in enumerate(surface.triangles):
        if not geom.is_admissible(lengths[t3.tet_edges[k]]):
            raise PyramidInfeasible(f"pyramid over triangle {k} {tri} is not Euclidean-realizable", k)
    radii.setflags(write=False)
    lengths.setflags(write=False)
    return StarComplex(base=surface, radii=radii, t3=t3, lengths=lengths)


def boundary_surface(t3, lengths):
    """The boundary 2-sphere with its inherited edge lengths.

    Boundary vertices are renumbered in increasing order of their original
    index; when they already form 0..m-1 the numbering is unchanged.
    """
    if not t3.boundary_triangles:
        raise NotASphere("the complex has no boundary")
    lengths = np.asarray(lengths, dtype=float)
    verts = sorted({v for f in t3.boundary_triangles for v in f})
    remap = {v: k for k, v in enumerate(verts)}
    tris = [tuple(remap[v] for v in f) for f in t3.boundary_triangles]
    surf_lengths = {}
    for f in t3.boundary_triangles:
        for a, b in combinations(f, 2):
            e = edge_key(a, b)
            surf_lengths[edge_key(remap[a], remap[b])] = float(lengths[t3.edge_index[e]])
    return make_surface(tris, surf_lengths, vertex_count=len(verts))


def orient_faces(faces, points=None):
    """Coherently orient a closed triangle list; outward if points are given."""
    faces = [tuple(int(v) for v in f) for f in faces]
    by_edge = defaultdict(list)
    for k, f in enumerate(faces):
        for a, b in ((0, 1), (1, 2), (2, 0)):
            by_edge[edge_key(f[a], f[b])].append(k)
    out = [None] * len(faces)
    for start in range(len(faces)):
        if out[start] is not None:
            continue
        out[start] = faces[start]
        queue = deque([start])
        while queue:
            k = queue.popleft()
            f = out[k]
            directed = ((f[0], f[1]), (f[1], f[2]), (f[2], f[0]))
            for a, b in directed:
                for m in by_edge[edge_key(a, b)]:
                    if m == k:
                        continue
                    g = faces[m]
                    gd = {(g[0], g[1]), (g[1], g[2]), (g[2], g[0])}
                    fixed = (g[0], g[2], g[1]) if (a, b) in gd else g
                    if out[m] is None:
                        out[m] = fixed
                        queue.append(m)
                    elif out[m] != fixed:
                        raise InputError("surface is not orientable")
    if points is not None:
        P = np.asarray(points, dtype=float)
        vol = sum(np.linalg.det(P[list(f)]) for f in out)
        if vol < 0:
            out = [(f[0], f[2], f[1]) for f in out]
    return tuple(out)
