"""Convex polyhedra from prescribed boundary metrics.

The solver cones the target sphere metric over an apex, starting from the
intrinsic Delaunay triangulation with all radii equal and large. The radii
are then deformed so that every apex-edge curvature follows
kappa_i(t) = (1 - t) kappa_i(0); whenever a boundary dihedral angle exceeds
pi the corresponding surface edge is flipped, which keeps the surface
triangulation weighted Delaunay for the weights r_i^2. At t = 1 all
curvatures vanish and the coned complex embeds as a convex polyhedron.
"""

from dataclasses import dataclass, field
import logging
import math

import numpy as np

from . import geom
from .embedding import embed_triangulation
from .errors import (
    DegenerateTet,
    DegeneratesToPolygon,
    EmbeddingInconsistent,
    FlipLoop,
    IllConditioned,
    InitFailed,
    InvalidTargetMetric,
    JacobianSingular,
    SolverError,
    StepUnderflow,
)
from .mesh import ConeSurface, edge_key, make_surface, orient_faces

log = logging.getLogger(__name__)

CURVATURE_TOL = 1e-10


@dataclass(frozen=True)
class SolverConfig:
    newton_tol: float = 1e-10  # relative to max |kappa_0|
    final_tol: float = 1e-9
    theta_tol: float = 1e-9
    cond_max: float = 1e12
    initial_step: float = 0.1
    max_step: float = 0.25
    min_step: float = 1e-7
    growth: float = 1.5
    newton_max_iters: int = 12
    max_flips_per_step: int = 200
    max_steps: int = 10000
    initial_radius: float = None  # start of the doubling search; default: longest edge
    max_doublings: int = 60


@dataclass(frozen=True)
class TargetMetric:
    surface: ConeSurface
    cone_points: tuple
    curvature: np.ndarray


def target_metric(surface):
    """Check that every vertex of ``surface`` is a cone point of positive curvature."""
    faces = orient_faces(surface.triangles)
    surface = ConeSurface(surface.vertex_count, faces, dict(surface.lengths))
    curv = surface.curvatures()
    bad = [int(v) for v in np.flatnonzero(curv <= CURVATURE_TOL)]
    if bad:
        v = bad[0]
        raise InvalidTargetMetric(
            f"positive curvature required at every cone point; vertex {v} has curvature {curv[v]:.6g}"
        )
    if len(curv) < 4:
        raise InvalidTargetMetric("at least 4 cone points are required")
    if abs(curv.sum() - 4 * math.pi) > 1e-9:
        raise InvalidTargetMetric(f"total curvature {curv.sum():.12g} differs from 4 pi")
    return TargetMetric(surface=surface, cone_points=tuple(range(surface.vertex_count)), curvature=curv)


class SurfaceTriangulation:
    """Coherently oriented triangulation of a metric sphere, flippable in place.

    Edges carry integer ids rather than vertex pairs: intrinsic and weighted
    Delaunay triangulations may join the same two cone points by two
    different geodesic edges, or a cone point to itself by a loop. Side s of triangle k runs from vertex s to
    vertex s+1 (mod 3) and is the edge ``tri_edges[k][s]``.
    """

    def __init__(self, surface):
        surface_faces = orient_faces(surface.triangles)
        self.n = surface.vertex_count
        ids = {e: i for i, e in enumerate(sorted(surface.lengths))}
        self.length = [surface.lengths[e] for e in sorted(surface.lengths)]
        self.tri_verts = [tuple(t) for t in surface_faces]
        self.tri_edges = [
            tuple(ids[edge_key(t[s], t[(s + 1) % 3])] for s in range(3)) for t in self.tri_verts
        ]
        self._index()

    def _index(self):
        self.sides_of = [[] for _ in self.length]
        for k, es in enumerate(self.tri_edges):
            for s, e in enumerate(es):
                self.sides_of[e].append((k, s))

    def copy(self):
        out = SurfaceTriangulation.__new__(SurfaceTriangulation)
        out.n = self.n
        out.length = list(self.length)
        out.tri_verts = list(self.tri_verts)
        out.tri_edges = list(self.tri_edges)
        out.sides_of = [list(x) for x in self.sides_of]
        return out

    @property
    def edge_count(self):
        return len(self.length)

    def endpoints(self, e):
        k, s = self.sides_of[e][0]
        t = self.tri_verts[k]
        return edge_key(t[s], t[(s + 1) % 3])

    def is_simplicial(self):
        return len({self.endpoints(e) for e in range(self.edge_count)}) == self.edge_count

    def side_lengths(self, k):
        return tuple(self.length[e] for e in self.tri_edges[k])

    def to_cone_surface(self):
        lengths = {}
        for e in range(self.edge_count):
            key = self.endpoints(e)
            if key in lengths or key[0] == key[1]:
                raise FlipLoop(f"triangulation has a loop or a double edge at {key}; it is not simplicial")
            lengths[key] = self.length[e]
        return make_surface(self.tri_verts, lengths, vertex_count=self.n)

    def corner_angles(self, k):
        """Angles of triangle k at its vertices 0, 1, 2."""
        l01, l12, l20 = self.side_lengths(k)
        return geom.triangle_angles(l12, l20, l01)

    def quad(self, e):
        """Vertices a, b, c, d and sides of the two triangles around edge e.

        The triangles are (a, b, c) and (b, a, d), e being the side a -> b of
        the first. Returns (a, b, c, d, (k1, s1), (k2, s2)).
        """
        (k1, s1), (k2, s2) = self.sides_of[e]
        t1, t2 = self.tri_verts[k1], self.tri_verts[k2]
        a, b, c = t1[s1], t1[(s1 + 1) % 3], t1[(s1 + 2) % 3]
        d = t2[(s2 + 2) % 3]
        return a, b, c, d, (k1, s1), (k2, s2)

    def opposite_angle_sum(self, e):
        _, _, _, _, (k1, s1), (k2, s2) = self.quad(e)
        return self.corner_angles(k1)[(s1 + 2) % 3] + self.corner_angles(k2)[(s2 + 2) % 3]

    def flip(self, e):
        """Replace edge e by the other diagonal of its quad, keeping its id."""
        a, b, c, d, (k1, s1), (k2, s2) = self.quad(e)
        if k1 == k2:
            raise FlipLoop(f"edge {e} is glued to its own triangle and cannot be flipped")
        ang1, ang2 = self.corner_angles(k1), self.corner_angles(k2)
        at_a = ang1[s1] + ang2[(s2 + 1) % 3]
        at_b = ang1[(s1 + 1) % 3] + ang2[s2]
        if at_a >= math.pi or at_b >= math.pi:
            raise FlipLoop(f"edge {e} is not flippable: its quad is not convex")
        e1 = self.tri_edges[k1]
        e2 = self.tri_edges[k2]
        e_bc, e_ca = e1[(s1 + 1) % 3], e1[(s1 + 2) % 3]
        e_ad, e_db = e2[(s2 + 1) % 3], e2[(s2 + 2) % 3]
        lac, lad = self.length[e_ca], self.length[e_ad]
        self.length[e] = math.sqrt(max(lac * lac + lad * lad - 2 * lac * lad * math.cos(at_a), 0.0))
        self.tri_verts[k1], self.tri_edges[k1] = (a, d, c), (e_ad, e, e_ca)
        self.tri_verts[k2], self.tri_edges[k2] = (b, c, d), (e_bc, e, e_db)
        self._index()
        return edge_key(c, d)

    def cone_angles(self):
        out = np.zeros(self.n)
        for k, t in enumerate(self.tri_verts):
            for v, ang in zip(t, self.corner_angles(k)):
                out[v] += ang
        return out

    def area(self):
        return sum(geom.triangle_area(*self.side_lengths(k)) for k in range(len(self.tri_verts)))


def _delaunay_flips(surf, theta_tol, max_iters=None):
    """In-place intrinsic Delaunay flipping; returns the number of flips."""
    if max_iters is None:
        max_iters = 50 * surf.edge_count ** 2 + 100
    stack = list(range(surf.edge_count))
    flips = 0
    iters = 0
    while stack:
        iters += 1
        if iters > max_iters:
            raise FlipLoop(f"Delaunay flipping did not terminate after {max_iters} checks")
        e = stack.pop()
        if surf.opposite_angle_sum(e) > math.pi + theta_tol:
            _, _, _, _, (k1, s1), (k2, s2) = surf.quad(e)
            stack += [f for f in surf.tri_edges[k1] + surf.tri_edges[k2] if f != e]
            surf.flip(e)
            flips += 1
    return flips


def surface_delaunay(target, theta_tol=1e-9):
    """Intrinsic Delaunay retriangulation by edge flips.

    An edge is kept when its two opposite angles sum to at most
    pi + theta_tol (an exact tie keeps the current edge).
    Returns ``(triangulation, flip_count)``; the triangulation may join two
    cone points by more than one edge.
    """
    surface = target.surface if isinstance(target, TargetMetric) else target
    surf = SurfaceTriangulation(surface)
    flips = _delaunay_flips(surf, theta_tol)
    return surf, flips


def _star(surf, radii, with_jacobian=True):
    """Apex curvatures, boundary dihedrals per edge id and d kappa / d r."""
    n = len(radii)
    omega = np.zeros(n)
    theta = np.zeros(surf.edge_count)
    J = np.zeros((n, n)) if with_jacobian else None
    for k, (a, b, c) in enumerate(surf.tri_verts):
        e_ab, e_bc, e_ca = surf.tri_edges[k]
        # local vertices (a, b, c, apex): edges ab, ac, a-apex, bc, b-apex, c-apex
        L = (surf.length[e_ab], surf.length[e_ca], radii[a], surf.length[e_bc], radii[b], radii[c])
        ang = geom.dihedral_angles(L, tet=k)
        omega[a] += ang[2]
        omega[b] += ang[4]
        omega[c] += ang[5]
        theta[e_ab] += ang[0]
        theta[e_ca] += ang[1]
        theta[e_bc] += ang[3]
        if with_jacobian:
            jac = geom.dihedral_jacobian(L, tet=k)
            idx = np.array([a, b, c])
            # a triangle with a loop side repeats a vertex, so accumulate
            np.add.at(J, (idx[:, None], idx[None, :]), -jac[np.ix_((2, 4, 5), (2, 4, 5))])
    return 2 * math.pi - omega, theta, J


@dataclass
class HomotopyState:
    t: float
    surface: SurfaceTriangulation = field(repr=False)
    r: np.ndarray
    kappa: np.ndarray
    kappa0: np.ndarray
    flip_count: int = 0
    step_count: int = 0

    @property
    def triangulation(self):
        return self.surface.to_cone_surface()

    def boundary_dihedrals(self):
        """Boundary dihedral angle per edge id of ``surface``."""
        return _star(self.surface, self.r, with_jacobian=False)[1]


def curvature_and_jacobian(state):
    kappa, _, J = _star(state.surface, state.r)
    return kappa, J


def _admissible(surf, R):
    for k in range(len(surf.tri_verts)):
        l01, l12, l20 = surf.side_lengths(k)
        if not geom.is_admissible((l01, l20, R, l12, R, R)):
            return False
    return True


def init_radii(surface, theta_tol=1e-9, start=None, max_doublings=60):
    """Smallest R = start * 2**k making every pyramid exist and every boundary dihedral <= pi."""
    surf = surface if isinstance(surface, SurfaceTriangulation) else SurfaceTriangulation(surface)
    R = float(start) if start is not None else max(surf.length)
    for _ in range(max_doublings + 1):
        if _admissible(surf, R):
            radii = np.full(surf.n, R)
            _, theta, _ = _star(surf, radii, with_jacobian=False)
            if theta.max() <= math.pi + theta_tol:
                return radii
        R *= 2
    raise InitFailed(f"no admissible uniform radius found after {max_doublings} doublings")


@dataclass(frozen=True)
class RealizationResult:
    points: np.ndarray
    triangulation: ConeSurface
    radii: np.ndarray
    max_residual_curvature: float
    trace: dict


class _NewtonFailed(Exception):
    pass


def _newton(surf, r, target, tol, cfg, final):
    """Solve kappa(r) = target from r; returns (r, iterations, condition estimate)."""
    prev = math.inf
    cond = 0.0
    for it in range(cfg.newton_max_iters + 1):
        try:
            kappa, _, J = _star(surf, r)
        except (DegenerateTet, IllConditioned) as exc:
            raise _NewtonFailed(str(exc)) from None
        res = kappa - target
        err = float(np.abs(res).max())
        if err <= tol:
            return r, it, cond
        if err >= prev:
            raise _NewtonFailed(f"residual stalled at {err:.3e}")
        prev = err
        if final:
            # at t = 1 the Jacobian has the 3-dimensional kernel of apex translations
            delta = np.linalg.lstsq(J, -res, rcond=1e-10)[0]
        else:
            cond = float(np.linalg.cond(J))
            if not np.isfinite(cond) or cond > cfg.cond_max:
                raise JacobianSingular(f"Jacobian condition estimate {cond:.3e} exceeds {cfg.cond_max:.1e}")
            delta = np.linalg.solve(J, -res)
        r = r + delta
        if np.any(r <= 0):
            raise _NewtonFailed("a radius became non-positive")
    raise _NewtonFailed(f"no convergence within {cfg.newton_max_iters} iterations")


def _most_reflex(surf, r):
    theta = _star(surf, r, with_jacobian=False)[1]
    e = int(np.argmax(theta))
    return e, float(theta[e])


def homotopy_solve(target, cfg=None):
    cfg = cfg or SolverConfig()
    if not isinstance(target, TargetMetric):
        target = target_metric(target)
    surf = SurfaceTriangulation(target.surface)
    delaunay_flips = _delaunay_flips(surf, cfg.theta_tol)
    r = init_radii(surf, cfg.theta_tol, start=cfg.initial_radius, max_doublings=cfg.max_doublings)
    kappa0 = _star(surf, r, with_jacobian=False)[0]
    scale = float(np.abs(kappa0).max())
    tol = cfg.newton_tol * scale
    state = HomotopyState(t=0.0, surface=surf, r=r, kappa=kappa0.copy(), kappa0=kappa0)
    trace = {
        "initial_radius": float(r[0]),
        "delaunay_flips": delaunay_flips,
        "steps": 0,
        "rejected_steps": 0,
        "flips": 0,
        "newton_iterations": 0,
        "max_condition": 0.0,
        "history": [],
    }
    log.info("start: %d cone points, R=%.6g, max kappa0=%.6g", surf.n, r[0], scale)

    dt = cfg.initial_step
    successes = 0
    while state.t < 1.0:
        if state.step_count >= cfg.max_steps:
            raise StepUnderflow(f"step limit {cfg.max_steps} reached at t={state.t:.6g}")
        t_new = min(1.0, state.t + dt)
        final = t_new == 1.0
        saved = (state.surface.copy(), state.r.copy())
        try:
            new_surf, r_new, iters, cond, flips = _advance(state, t_new, tol, cfg, final)
        except _NewtonFailed as exc:
            trace["rejected_steps"] += 1
            dt *= 0.5
            successes = 0
            log.debug("reject t=%.6g dt->%.3g: %s", t_new, dt, exc)
            if dt < cfg.min_step:
                _maybe_polygon(state)
                raise StepUnderflow(f"step size fell below {cfg.min_step} at t={state.t:.9g}: {exc}") from None
            state.surface, state.r = saved
            continue
        except JacobianSingular:
            _maybe_polygon(state)
            raise
        state.surface = new_surf
        state.r = r_new
        state.t = t_new
        state.step_count += 1
        state.flip_count += flips
        state.kappa = _star(new_surf, r_new, with_jacobian=False)[0]
        trace["steps"] += 1
        trace["flips"] += flips
        trace["newton_iterations"] += iters
        trace["max_condition"] = max(trace["max_condition"], cond)
        residual = float(np.abs(state.kappa - (1.0 - t_new) * state.kappa0).max())
        trace["history"].append(
            {"t": t_new, "dt": dt, "newton": iters, "flips": flips, "cond": cond, "residual": residual}
        )
        log.info("t=%.6f dt=%.4g newton=%d flips=%d cond=%.3e", t_new, dt, iters, flips, cond)
        successes += 1
        if successes >= 2:
            dt = min(dt * cfg.growth, cfg.max_step)
            successes = 0

    kappa = state.kappa
    max_k = float(np.abs(kappa).max())
    if max_k > cfg.final_tol:
        raise SolverError(f"final curvature {max_k:.3e} exceeds {cfg.final_tol:.1e}")
    points = embed(state, cfg.final_tol)
    return RealizationResult(
        points=points,
        triangulation=state.triangulation,
        radii=state.r.copy(),
        max_residual_curvature=max_k,
        trace=trace,
    )


def _advance(state, t_new, tol, cfg, final):
    """Predictor, corrector and flips for one step; does not mutate ``state``."""
    surf = state.surface.copy()
    kappa, _, J = _star(surf, state.r)
    try:
        tangent = np.linalg.solve(J, -state.kappa0)
    except np.linalg.LinAlgError:
        raise JacobianSingular("singular Jacobian in predictor") from None
    r_pred = state.r + (t_new - state.t) * tangent
    if np.any(r_pred <= 0):
        r_pred = state.r.copy()
    goal = (1.0 - t_new) * state.kappa0
    step_tol = min(tol, cfg.final_tol) if final else tol
    r, iters, cond = _newton(surf, r_pred, goal, step_tol, cfg, final)
    flips = 0
    while True:
        e, theta = _most_reflex(surf, r)
        if theta <= math.pi + cfg.theta_tol:
            break
        if flips >= cfg.max_flips_per_step:
            raise FlipLoop(f"more than {cfg.max_flips_per_step} flips at t={t_new:.9g}")
        new = surf.flip(e)
        flips += 1
        log.debug("flip %s -> %s at t=%.6g (theta=%.12g)", e, new, t_new, theta)
        r, more, c2 = _newton(surf, r, goal, step_tol, cfg, final)
        iters += more
        cond = max(cond, c2)
    return surf, r, iters, cond, flips


def _maybe_polygon(state):
    try:
        pts, _ = _embed_state(state)
    except Exception:
        return
    if state.t < 0.9 or not np.all(np.isfinite(pts)):
        return
    s = np.linalg.svd(pts - pts.mean(axis=0), compute_uv=False)
    if s[-1] <= 1e-3 * s[0]:
        raise DegeneratesToPolygon(
            f"solution flattens onto a plane as t -> 1 (t={state.t:.6g}); the target is a doubled polygon"
        )


def _embed_state(state):
    surf = state.surface
    across = [[None] * 3 for _ in surf.tri_verts]
    for (k1, s1), (k2, s2) in surf.sides_of:
        across[k1][s1] = (k2, s2)
        across[k2][s2] = (k1, s1)
    sides = [surf.side_lengths(k) for k in range(len(surf.tri_verts))]
    return embed_triangulation(surf.tri_verts, sides, across, state.r)


def embed(state, tol=1e-8):
    """Surface vertex coordinates of a flat final state, apex at the origin."""
    max_k = float(np.abs(state.kappa).max())
    if max_k > tol:
        raise EmbeddingInconsistent(f"residual curvature {max_k:.3e} above {tol:.1e}")
    pts, err = _embed_state(state)
    if not err <= 1e-8:
        raise EmbeddingInconsistent(f"embedded lengths disagree with the metric (relative error {err:.3e})")
    return pts


def realize(surface, cfg=None):
    """Validate ``surface`` as a target metric and run the homotopy."""
    return homotopy_solve(target_metric(surface), cfg)


def boundary_dihedrals_from_points(points, triangles):
    """Interior dihedral angle at every edge of an outward-oriented closed surface."""
    P = np.asarray(points, dtype=float)
    by_edge = {}
    for k, (a, b, c) in enumerate(triangles):
        for u, w, o in ((a, b, c), (b, c, a), (c, a, b)):
            by_edge.setdefault(edge_key(u, w), []).append((u, w, o, k))
    out = {}
    for e, ((u, w, o1, k1), (_, _, o2, k2)) in by_edge.items():
        t1, t2 = triangles[k1], triangles[k2]
        n1 = np.cross(P[t1[1]] - P[t1[0]], P[t1[2]] - P[t1[0]])
        n2 = np.cross(P[t2[1]] - P[t2[0]], P[t2[2]] - P[t2[0]])
        n1 /= np.linalg.norm(n1)
        n2 /= np.linalg.norm(n2)
        bend = math.atan2(np.linalg.norm(np.cross(n1, n2)), float(n1 @ n2))
        convex = float((P[o2] - P[u]) @ n1) <= 0
        out[e] = math.pi - bend if convex else math.pi + bend
    return out

