"""The discrete Hilbert-Einstein functional, its gradient and Hessian.

For interior edges the curvature is 2*pi minus the total dihedral angle
around the edge; for boundary edges it is pi minus the boundary dihedral
angle. The functional is the length-weighted sum of curvatures and its
gradient in the edge lengths is the curvature vector itself.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import geom

DEFAULT_ZERO_TOL = 1e-8


@dataclass(frozen=True)
class CurvatureField:
    kappa: np.ndarray
    angle: np.ndarray  # total angle: omega_e for interior, theta_e for boundary
    interior: np.ndarray  # boolean mask over t3.edges


@dataclass(frozen=True)
class HessianReport:
    free_edges: tuple
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    signature: tuple
    kernel: np.ndarray  # columns form an orthonormal basis
    zero_tol: float

    @property
    def spectral_gap(self):
        """(largest |lambda| counted as zero, smallest |lambda| counted as nonzero)."""
        mags = np.abs(self.eigenvalues)
        scale = mags.max() if mags.size else 0.0
        zero = mags <= self.zero_tol * scale
        return (
            float(mags[zero].max()) if zero.any() else 0.0,
            float(mags[~zero].min()) if (~zero).any() else math.inf,
        )


def _interior_mask(t3):
    mask = np.zeros(len(t3.edges), dtype=bool)
    mask[list(t3.interior_edges)] = True
    return mask


def _check(t3, lengths):
    lengths = np.asarray(lengths, dtype=float)
    if lengths.shape != (len(t3.edges),):
        raise ValueError(f"expected {len(t3.edges)} lengths, got shape {lengths.shape}")
    return lengths


def curvatures(t3, lengths):
    lengths = _check(t3, lengths)
    angle = np.zeros(len(t3.edges))
    for n in range(len(t3.tets)):
        idx = t3.tet_edges[n]
        angle[idx] += geom.dihedral_angles(lengths[idx], tet=n)
    interior = _interior_mask(t3)
    kappa = np.where(interior, 2 * math.pi - angle, math.pi - angle)
    return CurvatureField(kappa=kappa, angle=angle, interior=interior)


def energy(t3, lengths):
    lengths = _check(t3, lengths)
    return float(lengths @ curvatures(t3, lengths).kappa)


def gradient(t3, lengths):
    return curvatures(t3, lengths).kappa


def hessian_matrix(t3, lengths):
    """Full |E| x |E| matrix of d kappa_e / d l_f, assembled in tet order."""
    lengths = _check(t3, lengths)
    H = np.zeros((len(t3.edges), len(t3.edges)))
    for n in range(len(t3.tets)):
        idx = t3.tet_edges[n]
        H[np.ix_(idx, idx)] -= geom.dihedral_jacobian(lengths[idx], tet=n)
    return H


def signature(eigenvalues, zero_tol=DEFAULT_ZERO_TOL):
    ev = np.asarray(eigenvalues)
    scale = np.abs(ev).max() if ev.size else 0.0
    zero = np.abs(ev) <= zero_tol * scale
    return int(np.sum((ev > 0) & ~zero)), int(np.sum(zero)), int(np.sum((ev < 0) & ~zero))


def analyze(matrix, free_edges=(), zero_tol=DEFAULT_ZERO_TOL):
    """Eigen-decomposition, signature and kernel of a symmetric matrix."""
    H = 0.5 * (matrix + matrix.T)
    ev, vecs = np.linalg.eigh(H)
    scale = np.abs(ev).max() if ev.size else 0.0
    zero = np.abs(ev) <= zero_tol * scale
    return HessianReport(
        free_edges=tuple(int(e) for e in free_edges),
        matrix=np.asarray(matrix),
        eigenvalues=ev,
        eigenvectors=vecs,
        signature=signature(ev, zero_tol),
        kernel=vecs[:, zero],
        zero_tol=zero_tol,
    )


def hessian(t3, lengths, free_edges=None, zero_tol=DEFAULT_ZERO_TOL):
    """Hessian of the functional restricted to ``free_edges`` (edge indices).

    ``free_edges`` defaults to all interior edges.
    """
    if free_edges is None:
        free_edges = t3.interior_edges
    free = [int(e) for e in free_edges]
    if not free:
        raise ValueError("free_edges must be nonempty")
    H = hessian_matrix(t3, lengths)[np.ix_(free, free)]
    return analyze(H, free, zero_tol)


def finite_difference_gradient(t3, lengths, h=1e-5):
    """Five-point central differences of the functional, step ``h`` relative to each length."""
    lengths = _check(t3, lengths)
    out = np.zeros(len(lengths))
    for e in range(len(lengths)):
        step = h * lengths[e]
        vals = []
        for k in (-2, -1, 1, 2):
            x = lengths.copy()
            x[e] += k * step
            vals.append(energy(t3, x))
        out[e] = (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * step)
    return out


def gradient_mismatch(t3, lengths, h=1e-5, floor=1e-2):
    """Largest component-wise relative gap between curvatures and finite differences.

    The denominator is max(|kappa_e|, floor), so nearly flat edges are
    compared on an absolute scale instead of dividing by roundoff.
    """
    kappa = gradient(t3, lengths)
    fd = finite_difference_gradient(t3, lengths, h)
    return float(np.max(np.abs(fd - kappa) / np.maximum(np.abs(kappa), floor)))
