"""Placing a coned surface in R^3 from its radii and surface edge lengths."""

from collections import deque

import numpy as np

from .mesh import edge_key, orient_faces


def trilaterate(p, q, dist0, dist_p, dist_q):
    """Both points at distance dist0 from the origin, dist_p from p, dist_q from q.

    Returns (plus, minus) where ``plus`` lies on the side of the plane
    (0, p, q) pointed to by p x q.
    """
    dp = np.linalg.norm(p)
    ex = p / dp
    i = ex @ q
    ey = q - i * ex
    ey /= np.linalg.norm(ey)
    ez = np.cross(ex, ey)
    j = ey @ q
    x = (dist0 ** 2 - dist_p ** 2 + dp ** 2) / (2 * dp)
    y = (dist0 ** 2 - dist_q ** 2 + i * i + j * j) / (2 * j) - (i / j) * x
    z = np.sqrt(max(dist0 ** 2 - x * x - y * y, 0.0))
    base = x * ex + y * ey
    return base + z * ez, base - z * ez


def surface_tables(surface):
    """Per-triangle side lengths and side adjacency for a ConeSurface.

    Side s of triangle k runs from vertex s to vertex s+1 (mod 3).
    ``across[k][s]`` is the (triangle, side) glued to it.
    """
    tris = [tuple(t) for t in surface.triangles]
    sides = np.array(
        [[surface.lengths[edge_key(t[s], t[(s + 1) % 3])] for s in range(3)] for t in tris]
    )
    owners = {}
    for k, t in enumerate(tris):
        for s in range(3):
            owners.setdefault(edge_key(t[s], t[(s + 1) % 3]), []).append((k, s))
    across = [[None] * 3 for _ in tris]
    for pair in owners.values():
        (k1, s1), (k2, s2) = pair
        across[k1][s1] = (k2, s2)
        across[k2][s2] = (k1, s1)
    return tris, sides, across


def embed_star(surface, radii):
    surface = type(surface)(surface.vertex_count, orient_faces(surface.triangles), surface.lengths)
    return embed_triangulation(*surface_tables(surface), radii)


def embed_triangulation(tris, sides, across, radii):
    """Coordinates of the surface vertices with the apex at the origin.

    Vertices are placed breadth-first across the dual graph of the surface
    triangles. Each new vertex is trilaterated from the apex and the shared
    side; of the two mirror solutions, the one that best matches distances
    to other already-placed neighbours wins, falling back to the side of the
    shared edge opposite the triangle already placed there.

    Returns ``(points, max_relative_closure_error)``.
    """
    radii = np.asarray(radii, dtype=float)
    n = len(radii)
    pts = np.full((n, 3), np.nan)
    placed = np.zeros(n, dtype=bool)

    incident = [[] for _ in range(n)]  # (neighbour vertex, length)
    for k, t in enumerate(tris):
        for s in range(3):
            a, b = t[s], t[(s + 1) % 3]
            incident[a].append((b, sides[k][s]))
            incident[b].append((a, sides[k][s]))

    v0, v1, v2 = tris[0]
    r0, r1 = radii[v0], radii[v1]
    pts[v0] = (r0, 0.0, 0.0)
    x = (r0 ** 2 + r1 ** 2 - sides[0][0] ** 2) / (2 * r0)
    pts[v1] = (x, np.sqrt(max(r1 ** 2 - x * x, 0.0)), 0.0)
    plus, _ = trilaterate(pts[v0], pts[v1], radii[v2], sides[0][2], sides[0][1])
    # plus has det[v0, v1, v2] > 0: positive orientation of the first pyramid
    pts[v2] = plus
    placed[[v0, v1, v2]] = True

    seen = {0}
    queue = deque([0])
    while queue:
        k = queue.popleft()
        tri = tris[k]
        for s in range(3):
            m, sm = across[k][s]
            if m in seen:
                continue
            seen.add(m)
            queue.append(m)
            u, w = tri[s], tri[(s + 1) % 3]
            xv = tris[m][(sm + 2) % 3]
            if placed[xv]:
                continue
            y = tri[(s + 2) % 3]
            l_next, l_prev = sides[m][(sm + 1) % 3], sides[m][(sm + 2) % 3]
            l_ux, l_wx = (l_next, l_prev) if tris[m][(sm + 1) % 3] == u else (l_prev, l_next)
            cands = trilaterate(pts[u], pts[w], radii[xv], l_ux, l_wx)
            pts[xv] = _choose(cands, xv, u, w, pts[y], pts, placed, incident)
            placed[xv] = True

    err = 0.0
    for k, t in enumerate(tris):
        for s in range(3):
            a, b = t[s], t[(s + 1) % 3]
            err = max(err, abs(np.linalg.norm(pts[a] - pts[b]) - sides[k][s]) / sides[k][s])
    for v in range(n):
        err = max(err, abs(np.linalg.norm(pts[v]) - radii[v]) / radii[v])
    return pts, err


def _choose(cands, xv, u, w, opposite, pts, placed, incident):
    others = [(z, l) for z, l in incident[xv] if placed[z] and z not in (u, w)]
    if others:
        scores = [sum((np.linalg.norm(c - pts[z]) - l) ** 2 for z, l in others) for c in cands]
        scale = max(l for _, l in others) ** 2
        if abs(scores[0] - scores[1]) > 1e-10 * scale:
            return cands[int(np.argmin(scores))]
    normal = np.cross(pts[u], pts[w])
    side = normal @ opposite
    return cands[0] if (normal @ cands[0]) * side < (normal @ cands[1]) * side else cands[1]
