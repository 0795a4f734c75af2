"""Infinitesimal rigidity of polyhedra through Hessian kernels.

A polyhedron is coned from an interior star point; the boundary lengths are
frozen and the radii vary. Deformations of the radii that leave every
interior curvature unchanged to first order form the kernel of the Hessian
d kappa_i / d r_j. Moving the star point gives a 3-dimensional trivial part
of that kernel; anything beyond it is a genuine infinitesimal flex.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import functional
from .embedding import embed_star
from .errors import NotFlat, PyramidInfeasible, StarPointInvalid
from .mesh import cone_over, make_surface

FLAT_TOL = 1e-9


@dataclass(frozen=True)
class RigidityVerdict:
    kernel_dimension: int
    trivial_dimension: int
    rigid: bool
    report: functional.HessianReport
    nontrivial_flex: Optional[np.ndarray]
    trivial_basis: np.ndarray  # orthonormal columns, one per apex translation direction
    trivial_residual: float  # max ||H t|| / ||H|| over the trivial basis
    max_curvature: float
    advisory: bool  # true when the star complex is not flat

    @property
    def signature(self):
        return self.report.signature

    @property
    def spectral_gap(self):
        return self.report.spectral_gap


def star_from_embedding(poly):
    vols = poly.signed_pyramid_volumes()
    scale = np.ptp(poly.points, axis=0).max() ** 3
    if np.any(vols <= 1e-12 * scale):
        bad = int(np.argmin(vols))
        raise StarPointInvalid(
            f"star point does not see face {bad} {poly.faces[bad]} from inside (signed volume {vols[bad]:.3e})"
        )
    P = poly.points
    lengths = {}
    for f in poly.faces:
        for a, b in ((f[0], f[1]), (f[1], f[2]), (f[0], f[2])):
            lengths[(a, b)] = float(np.linalg.norm(P[a] - P[b]))
    surface = make_surface(poly.faces, lengths, vertex_count=len(P))
    radii = np.linalg.norm(P - poly.star_point, axis=1)
    try:
        return cone_over(surface, radii)
    except PyramidInfeasible as exc:
        raise StarPointInvalid(str(exc)) from None


def trivial_subspace(sc):
    """Orthonormal basis of radius changes induced by translating the apex.

    Directions (p_i - a)/r_i come from a breadth-first local embedding of the
    pyramid fan; for non-flat complexes this depends on the traversal order.
    """
    pts, _ = embed_star(sc.base, sc.radii)
    dirs = pts / sc.radii[:, None]
    q, _ = np.linalg.qr(dirs)
    return q


def rigidity_verdict(sc, tol=functional.DEFAULT_ZERO_TOL):
    radial = sc.radial_edges
    report = functional.hessian(sc.t3, sc.lengths, free_edges=radial, zero_tol=tol)
    kappa = functional.curvatures(sc.t3, sc.lengths).kappa[radial]
    max_k = float(np.abs(kappa).max())

    triv = trivial_subspace(sc)
    H = report.matrix
    hnorm = np.linalg.norm(H, 2)
    residual = float(np.linalg.norm(H @ triv, axis=0).max() / hnorm) if hnorm > 0 else 0.0

    kdim = report.signature[1]
    tdim = triv.shape[1]
    flex = None
    if kdim > tdim:
        K = report.kernel
        comp = K - triv @ (triv.T @ K)
        u, s, _ = np.linalg.svd(comp, full_matrices=False)
        flex = u[:, 0]
        flex = flex - triv @ (triv.T @ flex)
        flex /= np.linalg.norm(flex)
    return RigidityVerdict(
        kernel_dimension=kdim,
        trivial_dimension=tdim,
        rigid=kdim == tdim,
        report=report,
        nontrivial_flex=flex,
        trivial_basis=triv,
        trivial_residual=residual,
        max_curvature=max_k,
        advisory=max_k > FLAT_TOL,
    )


def corank_check(t3, lengths, interior_vertices, face_vertices, tol=functional.DEFAULT_ZERO_TOL):
    """Corank and positive index of the Hessian over all interior edges.

    Returns ``(corank, positive_index, passed)`` where ``passed`` means
    corank == 3i + b and positive index == i.
    """
    field = functional.curvatures(t3, lengths)
    interior = list(t3.interior_edges)
    if interior:
        worst = float(np.abs(field.kappa[interior]).max())
        if worst > FLAT_TOL:
            raise NotFlat(f"interior curvature {worst:.3e} exceeds {FLAT_TOL}")
    report = functional.hessian(t3, lengths, free_edges=interior, zero_tol=tol)
    pos, zero, _ = report.signature
    i, b = int(interior_vertices), int(face_vertices)
    return zero, pos, (zero == 3 * i + b and pos == i)
