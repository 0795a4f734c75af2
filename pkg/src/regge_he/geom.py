"""Metric kernel for a single Euclidean triangle and tetrahedron.

Everything here is computed from edge lengths alone. A tetrahedron with
vertices 0..3 is described by its six lengths in the fixed order

    (01, 02, 03, 12, 13, 23)

and every per-edge output (dihedral angles, Jacobian rows and columns)
uses the same order.
"""

import math

import numpy as np

from .errors import DegenerateTet, DegenerateTriangle, IllConditioned

TET_EDGES = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
TET_EDGE_INDEX = {e: n for n, e in enumerate(TET_EDGES)}
for (_a, _b), _n in list(TET_EDGE_INDEX.items()):
    TET_EDGE_INDEX[(_b, _a)] = _n

# edge n and OPPOSITE_EDGE[n] share no vertex
OPPOSITE_EDGE = (5, 4, 3, 2, 1, 0)

DEGENERATE_CM = 1e-12
ILL_CONDITIONED_CM = 1e-8


def _eidx(i, j):
    return TET_EDGE_INDEX[(i, j)]


def _area2x4(a, b, c):
    """16 * area**2 of a triangle, using Kahan's ordering for stability."""
    x, y, z = sorted((a, b, c), reverse=True)
    return (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z))


def triangle_area(a, b, c):
    p = _area2x4(a, b, c)
    if not (a > 0 and b > 0 and c > 0) or p <= 0.0:
        raise DegenerateTriangle(f"lengths ({a}, {b}, {c}) violate the strict triangle inequality")
    return 0.25 * math.sqrt(p)


def triangle_angles(a, b, c):
    """Angles opposite to the sides a, b, c."""
    area4 = 4.0 * triangle_area(a, b, c)
    return (
        math.atan2(area4, b * b + c * c - a * a),
        math.atan2(area4, a * a + c * c - b * b),
        math.atan2(area4, a * a + b * b - c * c),
    )


def cayley_menger(L):
    """Cayley-Menger determinant of a tetrahedron, equal to 288 * volume**2."""
    l01, l02, l03, l12, l13, l23 = (float(x) for x in L)
    d01, d02, d03 = l01 * l01, l02 * l02, l03 * l03
    g12 = 0.5 * (d01 + d02 - l12 * l12)
    g13 = 0.5 * (d01 + d03 - l13 * l13)
    g23 = 0.5 * (d02 + d03 - l23 * l23)
    gram = np.array([[d01, g12, g13], [g12, d02, g23], [g13, g23, d03]])
    return 8.0 * float(np.linalg.det(gram))


def _scale6(L):
    m = sum(L) / 6.0
    return m ** 6


def _check_tet(L, tet=None):
    L = [float(x) for x in L]
    if len(L) != 6:
        raise ValueError("a tetrahedron needs exactly 6 edge lengths")
    if min(L) <= 0:
        raise DegenerateTet(f"non-positive edge length in tet {tet}", tet)
    for f in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)):
        a, b, c = (L[_eidx(f[0], f[1])], L[_eidx(f[0], f[2])], L[_eidx(f[1], f[2])])
        if _area2x4(a, b, c) <= 0:
            raise DegenerateTet(f"face {f} of tet {tet} is flat or violates the triangle inequality", tet)
    cm = cayley_menger(L)
    if cm <= DEGENERATE_CM * _scale6(L):
        raise DegenerateTet(f"tet {tet} is degenerate (Cayley-Menger {cm:.3e})", tet)
    return L, cm


def tet_volume(L, tet=None):
    _, cm = _check_tet(L, tet)
    return math.sqrt(cm / 288.0)


def is_admissible(L):
    try:
        _check_tet(L)
    except DegenerateTet:
        return False
    return True


def _face_data(L):
    """Per-face areas keyed by the opposite vertex."""
    areas = {}
    for k in range(4):
        i, j, m = (v for v in range(4) if v != k)
        areas[k] = triangle_area(L[_eidx(i, j)], L[_eidx(i, m)], L[_eidx(j, m)])
    return areas


def dihedral_angles(L, tet=None):
    """Interior dihedral angles at the six edges.

    The cosine comes from the face angles at one endpoint through the
    spherical law of cosines; the sine from sin(theta_ij) = 3 V l_ij / (2 A A').
    Combining the two with atan2 keeps the result in (0, pi) and accurate
    near 0 and pi.
    """
    L, cm = _check_tet(L, tet)
    vol = math.sqrt(cm / 288.0)
    areas = _face_data(L)
    out = np.empty(6)
    for n, (i, j) in enumerate(TET_EDGES):
        k, m = (v for v in range(4) if v not in (i, j))
        lij, lik, lim = L[_eidx(i, j)], L[_eidx(i, k)], L[_eidx(i, m)]
        ljk, ljm, lkm = L[_eidx(j, k)], L[_eidx(j, m)], L[_eidx(k, m)]
        # face angles at vertex i
        ca = (lij * lij + lik * lik - ljk * ljk) / (2 * lij * lik)
        cb = (lij * lij + lim * lim - ljm * ljm) / (2 * lij * lim)
        cg = (lik * lik + lim * lim - lkm * lkm) / (2 * lik * lim)
        sa = 2 * areas[m] / (lij * lik)
        sb = 2 * areas[k] / (lij * lim)
        cos_t = (cg - ca * cb) / (sa * sb)
        sin_t = 3 * vol * lij / (2 * areas[k] * areas[m])
        out[n] = math.atan2(sin_t, cos_t)
    return out


def dihedral_jacobian(L, tet=None, margin=ILL_CONDITIONED_CM):
    """Analytic 6x6 matrix J[e, f] = d theta_e / d l_f.

    For the edge ij with remaining vertices k, m, let s_k, h_k be the foot
    position along ij and the distance of k from the line ij (likewise for m).
    Then cos(theta_ij) = N / (2 h_k h_m) with
    N = l_ik^2 + l_im^2 - l_km^2 - 2 s_k s_m, and
    sin(theta_ij) = 6 V / (l_ij h_k h_m). Differentiating that closed form
    gives every entry without finite differences.
    """
    L, cm = _check_tet(L, tet)
    if cm <= margin * _scale6(L):
        raise IllConditioned(f"tet {tet} too close to degenerate for derivatives (Cayley-Menger {cm:.3e})", tet)
    vol = math.sqrt(cm / 288.0)
    J = np.zeros((6, 6))
    for n, (i, j) in enumerate(TET_EDGES):
        k, m = (v for v in range(4) if v not in (i, j))
        ia, ip, iq = n, _eidx(i, k), _eidx(j, k)
        iu, iw, im = _eidx(i, m), _eidx(j, m), _eidx(k, m)
        a, p, q, u, w, lm = L[ia], L[ip], L[iq], L[iu], L[iw], L[im]

        sk = (p * p + a * a - q * q) / (2 * a)
        sm = (u * u + a * a - w * w) / (2 * a)
        hk = math.sqrt(p * p - sk * sk)
        hm = math.sqrt(u * u - sm * sm)

        dsk = np.zeros(6)
        dsk[ia], dsk[ip], dsk[iq] = 1 - sk / a, p / a, -q / a
        dsm = np.zeros(6)
        dsm[ia], dsm[iu], dsm[iw] = 1 - sm / a, u / a, -w / a

        dhk = -sk * dsk
        dhk[ip] += p
        dhk /= hk
        dhm = -sm * dsm
        dhm[iu] += u
        dhm /= hm

        N = p * p + u * u - lm * lm - 2 * sk * sm
        dN = -2 * sm * dsk - 2 * sk * dsm
        dN[ip] += 2 * p
        dN[iu] += 2 * u
        dN[im] -= 2 * lm

        F = N / (2 * hk * hm)
        dF = dN / (2 * hk * hm) - F * (dhk / hk + dhm / hm)
        J[n] = -dF * (a * hk * hm) / (6 * vol)
    return J
