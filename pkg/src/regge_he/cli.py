"""Command-line interface.

Subcommands: validate, energy, rigidity, realize. Machine reports are JSON on
stdout, progress traces go to stderr, geometry is written as Wavefront OBJ.

Exit codes: 0 success, 2 input error, 3 precondition violation, 4 solver failure.
"""

import argparse
from dataclasses import dataclass
import logging
import os
import sys

import numpy as np

from . import alexandrov, functional, io, polyhedra, rigidity
from .errors import DegenerateTet, GeometryError, IllConditioned, InputError, PreconditionError
from .mesh import check_admissible, orient_faces

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PRECONDITION = 3
EXIT_SOLVER = 4

DEFAULT_SEED = 20240601
GRADIENT_TOL = 1e-6
RANDOM_VERTICES = 10


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: str = None
    out: str = None
    tol_zero: float = functional.DEFAULT_ZERO_TOL
    tol_newton: float = alexandrov.SolverConfig.newton_tol
    tol_final: float = alexandrov.SolverConfig.final_tol
    tol_theta: float = alexandrov.SolverConfig.theta_tol
    max_steps: int = alexandrov.SolverConfig.max_steps
    max_flips: int = alexandrov.SolverConfig.max_flips_per_step
    trace: int = 0
    seed: int = DEFAULT_SEED
    builtin: str = None
    check_gradient: bool = False

    def __post_init__(self):
        for name in ("tol_zero", "tol_newton", "tol_final", "tol_theta"):
            if not getattr(self, name) > 0:
                raise InputError(f"--{name.replace('_', '-')} must be positive")
        if self.max_steps < 1 or self.max_flips < 1:
            raise InputError("--max-steps and --max-flips must be at least 1")

    def solver_config(self):
        return alexandrov.SolverConfig(
            newton_tol=self.tol_newton,
            final_tol=self.tol_final,
            theta_tol=self.tol_theta,
            max_steps=self.max_steps,
            max_flips_per_step=self.max_flips,
        )


def _emit(report):
    sys.stdout.write(io.dumps(report) + "\n")


def cmd_validate(cfg):
    t3, lengths = io.load_mesh(cfg.input)
    counts = (
        f"tets={len(t3.tets)} edges={len(t3.edges)} "
        f"interior={len(t3.interior_edges)} boundary={len(t3.boundary_edges)}"
    )
    try:
        check_admissible(t3, lengths)
    except (DegenerateTet, IllConditioned) as exc:
        tet = exc.tet
        print(f"{counts} admissible=no tet={tet} vertices={list(t3.tets[tet])}")
        print(f"reason: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    print(f"{counts} admissible=yes")
    return EXIT_OK


def cmd_energy(cfg):
    t3, lengths = io.load_mesh(cfg.input)
    check_admissible(t3, lengths)
    field = functional.curvatures(t3, lengths)
    report = {
        "S": float(lengths @ field.kappa),
        "edges": [
            {
                "edge": list(e),
                "class": "interior" if field.interior[n] else "boundary",
                "l": lengths[n],
                "kappa": field.kappa[n],
            }
            for n, e in enumerate(t3.edges)
        ],
    }
    code = EXIT_OK
    if cfg.check_gradient:
        mismatch = functional.gradient_mismatch(t3, lengths)
        passed = mismatch <= GRADIENT_TOL
        report["gradient_check"] = {"max_relative_mismatch": mismatch, "tolerance": GRADIENT_TOL, "passed": passed}
        print(f"max finite-difference mismatch: {mismatch:.3e}", file=sys.stderr)
        code = EXIT_OK if passed else EXIT_SOLVER
    _emit(report)
    return code


def _polyhedron(cfg):
    if cfg.builtin is not None:
        if cfg.builtin == "random":
            rng = np.random.default_rng(cfg.seed)
            return polyhedra.random_convex(rng, RANDOM_VERTICES, name=f"random(seed={cfg.seed})")
        catalog = polyhedra.builtin_polyhedra()
        if cfg.builtin not in catalog:
            names = ", ".join(sorted(catalog) + ["random"])
            raise InputError(f"unknown builtin {cfg.builtin!r}; choose from {names}")
        return catalog[cfg.builtin]
    if cfg.input is None:
        raise InputError("rigidity needs a polyhedron file or --builtin NAME")
    return io.load_polyhedron(cfg.input)


def cmd_rigidity(cfg):
    poly = _polyhedron(cfg)
    sc = rigidity.star_from_embedding(poly)
    v = rigidity.rigidity_verdict(sc, tol=cfg.tol_zero)
    zero_max, nonzero_min = v.spectral_gap
    report = {
        "name": poly.name,
        "vertices": poly.vertex_count,
        "rigid": v.rigid,
        "verdict": "rigid" if v.rigid else "flexible",
        "kernel_dimension": v.kernel_dimension,
        "trivial_dimension": v.trivial_dimension,
        "signature": list(v.signature),
        "spectral_gap": {"largest_zero": zero_max, "smallest_nonzero": nonzero_min},
        "trivial_residual": v.trivial_residual,
        "max_curvature": v.max_curvature,
        "advisory": v.advisory,
        "eigenvalues": v.report.eigenvalues,
    }
    if v.nontrivial_flex is not None:
        report["nontrivial_flex"] = v.nontrivial_flex
    _emit(report)
    return EXIT_OK


def cmd_realize(cfg):
    surface = io.load_surface(cfg.input)
    result = alexandrov.realize(surface, cfg.solver_config())
    faces = orient_faces(result.triangulation.triangles, result.points)
    dihedrals = alexandrov.boundary_dihedrals_from_points(result.points, faces)
    trace = dict(result.trace)
    if cfg.trace == 0:
        trace.pop("history")
    report = {
        "vertices": result.points,
        "faces": [list(f) for f in faces],
        "radii": result.radii,
        "max_residual_curvature": result.max_residual_curvature,
        "max_boundary_dihedral": max(dihedrals.values()),
        "trace": trace,
    }
    if cfg.out is not None:
        try:
            with open(cfg.out, "w", encoding="utf-8") as fh:
                fh.write(io.obj_text(result.points, faces))
        except OSError as exc:
            raise InputError(f"{cfg.out}: {exc.strerror}") from None
    _emit(report)
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "energy": cmd_energy,
    "rigidity": cmd_rigidity,
    "realize": cmd_realize,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="regge-he",
        description="Discrete Hilbert-Einstein functional, polyhedral rigidity and convex realization.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-zero", type=float, default=functional.DEFAULT_ZERO_TOL,
                        help="relative threshold for zero eigenvalues")
    common.add_argument("--tol-newton", type=float, default=alexandrov.SolverConfig.newton_tol,
                        help="corrector tolerance, relative to the initial curvature")
    common.add_argument("--tol-final", type=float, default=alexandrov.SolverConfig.final_tol,
                        help="required max |kappa| at the end of the homotopy")
    common.add_argument("--tol-theta", type=float, default=alexandrov.SolverConfig.theta_tol,
                        help="flip an edge when its dihedral exceeds pi by this much")
    common.add_argument("--max-steps", type=int, default=alexandrov.SolverConfig.max_steps)
    common.add_argument("--max-flips", type=int, default=alexandrov.SolverConfig.max_flips_per_step,
                        help="flip budget per homotopy step")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for --builtin random")
    common.add_argument("--trace", action="count", default=0,
                        help="progress on stderr; repeat for more detail")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a 3-manifold mesh file")
    p.add_argument("input")
    p = sub.add_parser("energy", parents=[common], help="functional value and edge curvatures")
    p.add_argument("input")
    p.add_argument("--check-gradient", action="store_true",
                   help="compare curvatures with central finite differences")
    p = sub.add_parser("rigidity", parents=[common], help="infinitesimal rigidity of a star-shaped polyhedron")
    p.add_argument("input", nargs="?")
    p.add_argument("--builtin", help="tetrahedron, cube, octahedron, icosahedron, schoenhardt, jessen or random")
    p = sub.add_parser("realize", parents=[common], help="convex polyhedron with a given boundary metric")
    p.add_argument("input")
    p.add_argument("--out", help="write the polyhedron as OBJ")
    return parser


def _trace_level(args):
    env = os.environ.get("REGGE_HE_TRACE", "").strip()
    level = args.trace
    if env and env.lower() not in ("0", "false", "no"):
        level = max(level, int(env) if env.isdigit() else 1)
    return level


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    level = _trace_level(args)
    if level:
        logging.basicConfig(
            stream=sys.stderr,
            level=logging.DEBUG if level > 1 else logging.INFO,
            format="%(name)s: %(message)s",
        )
    try:
        cfg = RunConfig(
            command=args.command,
            input=args.input,
            out=getattr(args, "out", None),
            tol_zero=args.tol_zero,
            tol_newton=args.tol_newton,
            tol_final=args.tol_final,
            tol_theta=args.tol_theta,
            max_steps=args.max_steps,
            max_flips=args.max_flips,
            trace=level,
            seed=args.seed,
            builtin=getattr(args, "builtin", None),
            check_gradient=getattr(args, "check_gradient", False),
        )
        return COMMANDS[cfg.command](cfg)
    except GeometryError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _exit_code(exc)


def _exit_code(exc):
    if isinstance(exc, InputError):
        return EXIT_INPUT
    if isinstance(exc, PreconditionError):
        return EXIT_PRECONDITION
    return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
