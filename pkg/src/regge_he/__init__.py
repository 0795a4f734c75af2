"""Discrete Hilbert-Einstein functional on triangulated 3-manifolds.

Edge-length geometry of tetrahedra, the functional with its exact gradient
and Hessian, infinitesimal rigidity of star-shaped polyhedra, and convex
realization of cone-metrics on the sphere by a Newton homotopy.
"""

from .errors import GeometryError, InputError, PreconditionError, SolverError
from .functional import curvatures, energy, gradient, hessian
from .mesh import ConeSurface, StarComplex, Triangulation3, build_complex, cone_over, make_surface
from .rigidity import corank_check, rigidity_verdict, star_from_embedding
from .alexandrov import SolverConfig, realize

__version__ = "0.1.0"
