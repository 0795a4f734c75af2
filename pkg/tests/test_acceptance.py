"""Acceptance criteria, each run at its stated tolerance and time budget.

Run with ``pytest tests/test_acceptance.py`` (the summary section lists one
PASS/FAIL line per criterion) or directly with ``python tests/test_acceptance.py``.
"""

import math
from pathlib import Path
import subprocess
import sys
import time

import numpy as np
from scipy.spatial import Delaunay

sys.path.insert(0, str(Path(__file__).parent))

from regge_he import alexandrov, functional, geom, mesh, polyhedra, rigidity  # noqa: E402

from acceptance_log import record  # noqa: E402
from support import FIXTURES, congruence_error, random_complex, random_polytope, random_tet, surface_metric  # noqa: E402

SEED = 2024


def test_criterion_1_gradient_is_curvature():
    rng = np.random.default_rng(SEED)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        t3, L = random_complex(rng, max_tets=10)
        worst = max(worst, functional.gradient_mismatch(t3, L))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and elapsed < 10
    record(1, "gradient equals curvature", ok, f"100 complexes, max rel err {worst:.2e} (<= 1e-6), {elapsed:.2f} s (< 10 s)")
    assert ok


def test_criterion_2_schlaefli():
    rng = np.random.default_rng(SEED + 1)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        L = random_tet(rng)
        J = geom.dihedral_jacobian(L)
        worst = max(worst, np.abs(L @ J).max() / np.abs(L).max())
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 5
    record(2, "Schlaefli identity", ok, f"1000 tets, max |l^T J|/|l| {worst:.2e} (<= 1e-9), {elapsed:.2f} s (< 5 s)")
    assert ok


def test_criterion_3_convex_signature():
    rng = np.random.default_rng(SEED + 2)
    start = time.perf_counter()
    failures = []
    for k in range(20):
        n = int(rng.integers(6, 15))
        sc = rigidity.star_from_embedding(random_polytope(rng, n))
        v = rigidity.rigidity_verdict(sc, tol=1e-8)
        if v.signature != (1, 3, n - 4) or not v.rigid:
            failures.append((k, n, v.signature))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 30
    record(3, "convex signature (1, 3, n-4)", ok, f"20 polytopes, mismatches {failures}, {elapsed:.2f} s (< 30 s)")
    assert ok


def test_criterion_4_flexible_catalog():
    dims = {}
    for name in ("schoenhardt", "jessen"):
        poly = polyhedra.builtin_polyhedra()[name]
        dims[name] = rigidity.rigidity_verdict(rigidity.star_from_embedding(poly)).kernel_dimension
    ok = dims == {"schoenhardt": 4, "jessen": 4}
    record(4, "flexible catalog", ok, f"kernel dimensions {dims} (> 3, pinned at 4)")
    assert ok


def test_criterion_5_corank():
    start = time.perf_counter()
    cube = polyhedra.cube()
    t3 = mesh.build_complex([(*f, 8) for f in cube.faces])
    L = mesh.lengths_from_coordinates(t3, np.vstack([cube.points, [[0.5, 0.5, 0.5]]]))
    corank, positive, passed = rigidity.corank_check(t3, L, 1, 0)
    cube_ok = (corank, positive) == (3, 1) and passed

    rng = np.random.default_rng(SEED + 3)
    definite = []
    while len(definite) < 5:
        pts = random_polytope(rng, int(rng.integers(8, 13))).points
        t3 = mesh.build_complex(Delaunay(pts).simplices)
        if not t3.interior_edges:
            continue
        L = mesh.lengths_from_coordinates(t3, pts)
        report = functional.hessian(t3, L)
        definite.append(bool(np.all(report.eigenvalues < 0)) and rigidity.corank_check(t3, L, 0, 0)[2])
    elapsed = time.perf_counter() - start
    ok = cube_ok and all(definite) and elapsed < 5
    record(
        5, "corank 3i + b", ok,
        f"cube (corank, positive) = ({corank}, {positive}), vertex-only negative definite {sum(definite)}/5, {elapsed:.2f} s (< 5 s)",
    )
    assert ok


def test_criterion_6_round_trip():
    rng = np.random.default_rng(SEED + 4)
    start = time.perf_counter()
    worst_dist, worst_kappa = 0.0, 0.0
    for _ in range(10):
        poly = random_polytope(rng, int(rng.integers(6, 13)))
        result = alexandrov.realize(surface_metric(poly))
        worst_dist = max(worst_dist, congruence_error(result.points, poly.points))
        worst_kappa = max(worst_kappa, result.max_residual_curvature)
    elapsed = time.perf_counter() - start
    ok = worst_dist <= 1e-4 and worst_kappa <= 1e-8 and elapsed < 300
    record(
        6, "convex realization round trip", ok,
        f"10 polytopes, distance error {worst_dist:.2e} (<= 1e-4), max |kappa| {worst_kappa:.2e} (<= 1e-8), {elapsed:.2f} s (< 300 s)",
    )
    assert ok


def test_criterion_7_tetrahedron_radii():
    result = alexandrov.realize(surface_metric(polyhedra.tetrahedron()))
    err = float(np.abs(result.radii - math.sqrt(3 / 8)).max())
    ok = err <= 1e-6
    record(7, "regular tetrahedron radii sqrt(3/8)", ok, f"max deviation {err:.2e} (<= 1e-6)")
    assert ok


def test_criterion_8_uniqueness():
    rng = np.random.default_rng(SEED + 5)
    worst = 0.0
    for _ in range(3):
        metric = surface_metric(random_polytope(rng, int(rng.integers(6, 13))))
        a = alexandrov.realize(metric)
        b = alexandrov.realize(metric, alexandrov.SolverConfig(initial_radius=8 * a.trace["initial_radius"]))
        worst = max(worst, congruence_error(a.points, b.points))
    ok = worst <= 1e-6
    record(8, "uniqueness under a different initial R", ok, f"3 metrics, max distance gap {worst:.2e} (<= 1e-6)")
    assert ok


def test_criterion_9_cli_determinism():
    runs = [
        ["validate", str(FIXTURES / "single_tet.json")],
        ["energy", str(FIXTURES / "flat_torus.json"), "--check-gradient"],
        ["rigidity", "--builtin", "jessen"],
        ["rigidity", "--builtin", "random", "--seed", "3"],
        ["realize", str(FIXTURES / "cube_metric.json")],
    ]
    mismatched = []
    for args in runs:
        cmd = [sys.executable, "-m", "regge_he", *args]
        outputs = [subprocess.run(cmd, capture_output=True).stdout for _ in range(2)]
        if outputs[0] != outputs[1] or not outputs[0]:
            mismatched.append(args[0])
    ok = not mismatched
    record(9, "CLI determinism", ok, f"{len(runs)} commands run twice, differing: {mismatched or 'none'}")
    assert ok


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
