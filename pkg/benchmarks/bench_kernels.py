"""Throughput comparison of the compiled kernels and their numpy fallbacks.

Runs each hot kernel (P1 stiffness triplets, boundary edge mass,
triangle quality, point-in-polygon) on a real generated mesh and prints
the best-of-N wall time for the numba build next to the pure numpy
implementation.  The numba side is warmed once so JIT compilation does
not pollute the timings.

Usage:

    python benchmarks/bench_kernels.py --h 0.005 --repeats 7

Set SLOSHSPEC_PURE_NUMPY=1 to check that the dispatch really falls back
(the two columns then time the same function).
"""

import argparse
import math
import time

import numpy as np

from sloshspec import _backend
from sloshspec.geometry.domain import build_triangle_domain
from sloshspec.geometry.mesh import generate_mesh


def best_time(fn, args, repeats):
    fn(*args)  # warm up; first numba call compiles
    best = math.inf
    for _ in range(repeats):
        started = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - started)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--h", type=float, default=0.005, help="mesh size for the specimen tank")
    parser.add_argument("--repeats", type=int, default=7, help="timing repetitions per kernel")
    args = parser.parse_args()

    domain = build_triangle_domain(math.pi / 4, math.pi / 4, 1.0)
    mesh = generate_mesh(domain, args.h)
    xy = mesh.nodes
    tris = mesh.triangles
    edges = mesh.edges_with_tag("steklov")
    poly = np.concatenate(
        [xy[[i for i, _, _ in mesh.boundary_edges]], xy[[mesh.boundary_edges[0][0]]]]
    )[:-1]
    pts = np.random.default_rng(0).uniform(
        xy.min(axis=0), xy.max(axis=0), size=(200_000, 2)
    )

    print(f"mesh: {mesh.num_nodes} nodes, {mesh.num_triangles} triangles, "
          f"{len(edges)} surface edges, polygon with {len(poly)} vertices")
    print(f"numba available: {_backend.HAS_NUMBA}, dispatch uses numba: {_backend.USING_NUMBA}")
    print()

    cases = [
        ("stiffness_triplets", _backend.stiffness_triplets,
         _backend._stiffness_triplets_numpy, (xy, tris)),
        ("edge_mass_triplets", _backend.edge_mass_triplets,
         _backend._edge_mass_triplets_numpy, (xy, edges)),
        ("triangle_quality", _backend.triangle_quality,
         _backend._triangle_quality_numpy, (xy, tris)),
        ("points_in_polygon", _backend.points_in_polygon,
         _backend._points_in_polygon_numpy, (pts, poly)),
    ]

    header = f"{'kernel':<22}{'dispatched':>12}{'numpy':>12}{'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, fast, reference, call_args in cases:
        t_fast = best_time(fast, call_args, args.repeats)
        t_ref = best_time(reference, call_args, args.repeats)
        print(f"{name:<22}{t_fast * 1e3:>10.2f}ms{t_ref * 1e3:>10.2f}ms{t_ref / t_fast:>8.1f}x")


if __name__ == "__main__":
    main()
