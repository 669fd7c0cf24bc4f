"""Timing comparison of the compiled kernels against their numpy twins.

Runs every hot kernel on a realistic workload with both the numba build
and the pure-numpy fallback, and prints best-of-N wall times plus the
speedup. The script forces the compiled path on for its own process;
pipeline code keeps honoring TENSORTOPO_NUMBA.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import os
import time

os.environ["TENSORTOPO_NUMBA"] = "1"

import numpy as np

from tensortopo import _accel
from tensortopo.fields import LinearRandomField
from tensortopo.mesh import PLField, generate_box, sample_field_onto_mesh


def best_of(fn, repeat):
    fn()  # warmup (and JIT compile on the numba side)
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def random_sym6(rng, n):
    t6 = rng.normal(size=(n, 6))
    t6[:, :3] *= 2.0
    return np.ascontiguousarray(t6)


def workloads(rng):
    """Yield (name, numba callable, numpy callable) triples."""
    t6 = random_sym6(rng, 200_000)
    yield "eigvals_sym6 (200k)", lambda: _accel.eigvals_sym6_nb(t6), lambda: _accel.eigvals_sym6_np(t6)
    yield "mode_sym6 (200k)", lambda: _accel.mode_sym6_nb(t6), lambda: _accel.mode_sym6_np(t6)
    yield "min_gap_sym6 (200k)", lambda: _accel.min_gap_sym6_nb(t6), lambda: _accel.min_gap_sym6_np(t6)

    n_faces, n_seeds = 4_000, 24_000
    corners = random_sym6(rng, 3 * n_faces).reshape(n_faces, 3, 6)
    du6 = np.ascontiguousarray(corners[:, 1] - corners[:, 0])
    dv6 = np.ascontiguousarray(corners[:, 2] - corners[:, 0])
    flat = corners.reshape(n_faces, 3, 6)
    fro = np.sqrt(
        (flat[..., :3] ** 2).sum(axis=-1) + 2.0 * (flat[..., 3:] ** 2).sum(axis=-1)
    )
    scale = np.maximum(fro.max(axis=1), 1e-30)
    face_idx = np.ascontiguousarray(
        rng.integers(0, n_faces, size=n_seeds, dtype=np.int64)
    )
    uv = rng.random(size=(n_seeds, 2))
    flip = uv.sum(axis=1) > 1.0
    uv[flip] = 1.0 - uv[flip]
    uv = np.ascontiguousarray(uv)
    yield (
        f"gn_polish ({n_seeds // 1000}k seeds)",
        lambda: _accel.gn_polish(corners, du6, dv6, scale, face_idx, uv, True),
        lambda: _accel.gn_polish_np(corners, du6, dv6, scale, face_idx, uv, True),
    )

    theta = np.linspace(0.0, 2.0 * np.pi, 400, endpoint=False)
    c1 = np.column_stack([np.cos(theta), np.sin(theta), np.zeros_like(theta)])
    c2 = np.column_stack(
        [1.0 + np.cos(theta), np.zeros_like(theta), np.sin(theta)]
    )
    a0, a1 = c1, np.roll(c1, -1, axis=0)
    b0, b1 = c2, np.roll(c2, -1, axis=0)
    yield (
        "pair_solid_angle_sum (400x400)",
        lambda: _accel.pair_solid_angle_sum_nb(a0, a1, b0, b1),
        lambda: _accel.pair_solid_angle_sum_np(a0, a1, b0, b1),
    )

    t = np.linspace(0.0, 2.0 * np.pi, 600, endpoint=False)
    tref = np.column_stack(
        [
            np.sin(t) + 2.0 * np.sin(2.0 * t),
            np.cos(t) - 2.0 * np.cos(2.0 * t),
            -np.sin(3.0 * t),
        ]
    )
    p0, p1 = tref, np.roll(tref, -1, axis=0)
    yield (
        "self_solid_angle_sum (600)",
        lambda: _accel.self_solid_angle_sum_nb(p0, p1, True),
        lambda: _accel.self_solid_angle_sum_np(p0, p1, True),
    )

    mesh = sample_field_onto_mesh(
        generate_box((-1, -1, -1), (1, 1, 1), 16), LinearRandomField(seed=3)
    )
    field = PLField(mesh)
    pts = np.ascontiguousarray(rng.uniform(-1.0, 1.0, size=(200_000, 3)))
    args = (
        field.origin,
        field.scale,
        field.dims,
        field.bin_ptr,
        field.bin_items,
        field.v0,
        field.inv,
        1e-10,
    )
    yield (
        "locate_points (200k)",
        lambda: _accel.locate_points_nb(pts, *args),
        lambda: _accel.locate_points_np(pts, *args),
    )


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    if not _accel.NUMBA_ENABLED:
        raise SystemExit(
            "numba is not importable here; only the numpy fallback exists, "
            "so there is nothing to compare"
        )

    rng = np.random.default_rng(20240)
    header = f"{'kernel':34} {'numba':>10} {'numpy':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, fn_nb, fn_np in workloads(rng):
        t_nb = best_of(fn_nb, args.repeat)
        t_np = best_of(fn_np, args.repeat)
        print(f"{name:34} {t_nb * 1e3:9.2f}ms {t_np * 1e3:9.2f}ms {t_np / t_nb:7.1f}x")


if __name__ == "__main__":
    main()
