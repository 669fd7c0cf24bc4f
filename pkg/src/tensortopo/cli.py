"""Command-line driver: generate fields, analyze meshes, report invariants.

Every analysis writes its full configuration next to its outputs, and
all randomness flows from the single recorded seed, so reruns of the
same inputs produce byte-identical graph.json files regardless of the
requested parallelism.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import asdict, dataclass

import numpy as np

from .curves import Polyline3, linking_integral, curves_from_json, writhe
from .diagram import DiagramError, IntractableDiagram, jones_polynomial, project_to_diagram
from .extract import (
    ExtractConfig,
    PointClass,
    _sample_tangent,
    classify_curve,
    extract_neutral_surface,
    find_transition_points,
    trace_degenerate_curves,
)
from .fields import FIELD_IDS, make_field
from .graph import build_graph, layout, serialize
from .mesh import PLField, generate_mesh, read_tft, sample_field_onto_mesh, write_tft
from .regions import assign_curve_region, betti, compute_relations, segment_regions
from .tensor import mode
from .winding import WindingError, point_index

__all__ = ["Config", "main", "cmd_gen", "cmd_analyze", "cmd_invariants"]

log = logging.getLogger("tensortopo")


@dataclass
class Config:
    """Knobs of one analysis run, serialized to config.json verbatim.

    ``link_round_guard`` records the near-integer acceptance band used
    when linking values become graph edges.
    """

    mode_tol: float = 1e-6
    point_tol: float | None = None
    face_subdiv_depth: int = 5
    eigen_gap_tol: float = 1e-9
    snap_tol: float = 0.2
    max_crossings: int = 16
    link_round_guard: float = 0.1
    seed: int = 0
    subdivide_level: int = 0
    min_curve_length: float = 0.0

    def validate(self):
        positive = (
            ("mode_tol", self.mode_tol),
            ("eigen_gap_tol", self.eigen_gap_tol),
            ("snap_tol", self.snap_tol),
            ("link_round_guard", self.link_round_guard),
        )
        for name, value in positive:
            if value <= 0:
                raise ValueError(f"{name} must be > 0, got {value}")
        if self.point_tol is not None and self.point_tol <= 0:
            raise ValueError(f"point_tol must be > 0, got {self.point_tol}")
        if self.min_curve_length < 0:
            raise ValueError("min_curve_length must be >= 0")
        if self.max_crossings < 0 or self.subdivide_level < 0:
            raise ValueError("budgets must be >= 0")
        if self.face_subdiv_depth < 0:
            raise ValueError("face_subdiv_depth must be >= 0")
        return self


def _extract_config(cfg: Config, jobs: int) -> ExtractConfig:
    return ExtractConfig(
        mode_tol=cfg.mode_tol,
        point_tol=cfg.point_tol,
        depth=cfg.face_subdiv_depth,
        subdiv=cfg.subdivide_level,
        jobs=jobs,
        min_curve_length=cfg.min_curve_length,
    )


def _curve_polyline(curve) -> Polyline3:
    pts = np.asarray(curve.samples, dtype=np.float64)
    if curve.closed and len(pts) > 3 and np.array_equal(pts[0], pts[-1]):
        pts = pts[:-1]
    return Polyline3(pts, closed=bool(curve.closed))


def _curve_index(field, mesh, curve, cfg: Config, warnings_out):
    """Winding index at the first cleanly classified sample, or None."""
    candidates = [
        i
        for i, c in enumerate(curve.classes)
        if c in (PointClass.WEDGE, PointClass.TRISECTOR)
    ] or [0]
    i = candidates[0]
    try:
        w = point_index(
            field,
            curve.samples[i],
            _sample_tangent(curve, i),
            mesh.cell_size(),
            snap_tol=cfg.snap_tol,
            gap_tol=cfg.eigen_gap_tol,
        )
        return w.value
    except (WindingError, ValueError) as exc:
        warnings_out.append(f"winding index unresolved: {exc}")
        return None


def _curve_jones(poly: Polyline3, cfg: Config, warnings_out):
    """(jones text, knotted flag) for a closed curve, (None, None) if refused."""
    if not poly.closed:
        return None, None
    try:
        diagram = project_to_diagram([poly], seed=cfg.seed)
        jones = jones_polynomial(diagram, max_crossings=cfg.max_crossings)
    except (DiagramError, IntractableDiagram) as exc:
        warnings_out.append(f"jones polynomial unresolved: {exc}")
        return None, None
    return jones.text(), not jones.is_one()


def run_analysis(mesh, cfg: Config, jobs: int = 1):
    """Full pipeline on a loaded mesh; returns (graph, report lines)."""
    cfg.validate()
    mu = mode(mesh.tensors)
    if bool(np.all(np.isnan(mu) | (np.abs(mu) >= 1.0 - cfg.mode_tol))):
        raise ValueError(
            "every vertex is degenerate; the field has no isolated "
            "degenerate curves to extract"
        )
    timings = []
    warnings_out = []

    def stage(name, fn):
        start = time.perf_counter()
        result = fn()
        timings.append((name, time.perf_counter() - start))
        log.info("stage %s finished in %.2fs", name, timings[-1][1])
        return result

    ecfg = _extract_config(cfg, jobs)
    curves = stage("curves", lambda: trace_degenerate_curves(mesh, ecfg))
    field = PLField(mesh)

    def classify_all():
        for curve in curves:
            classify_curve(mesh, curve, field=field)
            find_transition_points(
                mesh, curve, field=field, point_tol=cfg.point_tol
            )
        return curves

    stage("classify", classify_all)
    surface = stage("surface", lambda: extract_neutral_surface(mesh, ecfg))

    def region_pass():
        regions = segment_regions(mesh, surface)
        relations = compute_relations(regions, surface)
        for r in regions:
            betti(r, regions, relations)
        return regions, relations

    regions, relations = stage("regions", region_pass)
    curve_regions = stage(
        "assign", lambda: [assign_curve_region(c, regions) for c in curves]
    )

    def invariants():
        polylines = [_curve_polyline(c) for c in curves]
        infos = []
        for curve, poly in zip(curves, polylines):
            unresolved = sum(
                1
                for c in curve.classes
                if c in (None, PointClass.UNRESOLVED)
            )
            if unresolved:
                warnings_out.append(
                    f"curve with {unresolved} unresolved samples"
                )
            jones, knotted = _curve_jones(poly, cfg, warnings_out)
            infos.append(
                {
                    "writhe": writhe(poly) if poly.closed else None,
                    "jones": jones,
                    "knotted": knotted,
                    "index": _curve_index(field, mesh, curve, cfg, warnings_out),
                }
            )
        n = len(polylines)
        lk = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                lk[i, j] = lk[j, i] = linking_integral(
                    polylines[i], polylines[j]
                )
        return infos, lk

    curve_invariants, link_matrix = stage("invariants", invariants)
    g = stage(
        "graph",
        lambda: layout(
            build_graph(
                regions,
                relations,
                curves,
                curve_regions,
                link_matrix=link_matrix,
                curve_invariants=curve_invariants,
            )
        ),
    )

    report = [
        f"nodes: {len(g.nodes)}",
        f"edges: {len(g.edges)}",
        f"curves: {len(curves)}",
        f"regions: {len(regions)}",
        f"surface sheets: {len(surface.sheet_closed)}",
    ]
    report += [f"stage {name}: {dt:.2f}s" for name, dt in timings]
    report += [f"warning: {w}" for w in warnings_out]
    return g, report


def cmd_gen(args) -> int:
    params = {}
    for key in ("r0", "swirl", "cap", "width", "separation", "axis_bias"):
        value = getattr(args, key)
        if value is not None:
            params[key] = value
    if args.mirror:
        params["mirror"] = True
    if args.seed is not None:
        params["seed"] = args.seed
    field = make_field(args.field, **params)

    spec = args.domain
    kind = spec[0]
    values = [float(v) for v in spec[1:]]
    if kind == "box":
        if len(values) == 2:
            kw = {"min": (values[0],) * 3, "max": (values[1],) * 3}
        elif len(values) == 6:
            kw = {"min": tuple(values[:3]), "max": tuple(values[3:])}
        else:
            raise ValueError("box domain takes 2 or 6 bounds")
    elif kind == "torus":
        if len(values) != 2:
            raise ValueError("torus domain takes R and r")
        kw = {"R": values[0], "r": values[1]}
    else:
        raise ValueError(f"unknown domain {kind!r}")

    geometry = generate_mesh(kind, args.res, **kw)
    mesh = sample_field_onto_mesh(geometry, field)
    write_tft(mesh, args.out)
    log.info("wrote %s (%d vertices, %d tets)", args.out, mesh.n_vertices, mesh.n_tets)
    return 0


def cmd_analyze(args) -> int:
    cfg = Config(
        mode_tol=args.mode_tol,
        point_tol=args.point_tol,
        eigen_gap_tol=args.eps,
        max_crossings=args.max_crossings,
        seed=args.seed,
        subdivide_level=args.subdiv,
        min_curve_length=args.min_curve_length,
    )
    mesh = read_tft(args.tft)
    g, report = run_analysis(mesh, cfg, jobs=args.jobs)

    out = args.out
    graph_path = serialize(g, out)
    (graph_path.parent / "config.json").write_text(
        json.dumps(asdict(cfg), indent=2) + "\n"
    )
    (graph_path.parent / "report.txt").write_text("\n".join(report) + "\n")
    print(graph_path)
    return 0


def _print_invariants(curves, with_jones: bool) -> None:
    lines = ["writhe:"]
    for i, c in enumerate(curves):
        if c.closed:
            lines.append(f"  curve {i}: {writhe(c):.6f}")
        else:
            lines.append(f"  curve {i}: n/a (open)")
    lines.append("linking matrix:")
    for i in range(len(curves)):
        row = []
        for j in range(len(curves)):
            if i == j:
                row.append("     .")
            else:
                row.append(f"{linking_integral(curves[i], curves[j]):6.3f}")
        lines.append(f"  curve {i}: " + " ".join(row))
    if with_jones:
        lines.append("jones:")
        for i, c in enumerate(curves):
            if not c.closed:
                lines.append(f"  curve {i}: n/a (open)")
                continue
            try:
                diagram = project_to_diagram([c], seed=0)
                poly = jones_polynomial(diagram)
            except (DiagramError, IntractableDiagram) as exc:
                lines.append(f"  curve {i}: unresolved ({exc})")
                continue
            lines.append(f"  curve {i}: {poly.text()}")
    print("\n".join(lines))


def cmd_invariants(args) -> int:
    with open(args.curves, "r", encoding="utf-8") as fh:
        curves = curves_from_json(fh.read())
    _print_invariants(curves, args.jones)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tensortopo",
        description="Topology of 3D symmetric tensor fields on tet meshes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="sample an analytic field onto a mesh")
    gen.add_argument("--field", required=True, choices=FIELD_IDS)
    gen.add_argument(
        "--domain",
        nargs="+",
        default=["box", "-1", "1"],
        metavar="SPEC",
        help="box LO HI | box X0 Y0 Z0 X1 Y1 Z1 | torus R r",
    )
    gen.add_argument("--res", type=int, required=True)
    gen.add_argument("-o", "--out", required=True)
    gen.add_argument("--r0", type=float)
    gen.add_argument("--swirl", type=float)
    gen.add_argument("--cap", type=float)
    gen.add_argument("--width", type=float)
    gen.add_argument("--separation", type=float)
    gen.add_argument("--axis-bias", dest="axis_bias", type=float)
    gen.add_argument("--mirror", action="store_true")
    gen.add_argument("--seed", type=int)
    gen.set_defaults(fn=cmd_gen, usage_errors=True)

    an = sub.add_parser("analyze", help="run the full pipeline on a TFT file")
    an.add_argument("tft")
    an.add_argument("-o", "--out", required=True)
    an.add_argument("--mode-tol", dest="mode_tol", type=float, default=1e-6)
    an.add_argument("--point-tol", dest="point_tol", type=float, default=None)
    an.add_argument("--subdiv", type=int, default=0)
    an.add_argument("--eps", type=float, default=1e-9)
    an.add_argument(
        "--max-crossings", dest="max_crossings", type=int, default=16
    )
    an.add_argument("--seed", type=int, default=0)
    an.add_argument("--jobs", type=int, default=1)
    an.add_argument(
        "--min-curve-length", dest="min_curve_length", type=float, default=0.0
    )
    an.set_defaults(fn=cmd_analyze, usage_errors=False)

    inv = sub.add_parser("invariants", help="report invariants of a curve file")
    inv.add_argument("curves")
    inv.add_argument("--jones", action="store_true")
    inv.set_defaults(fn=cmd_invariants, usage_errors=True)
    return parser


def main(argv=None) -> int:
    level = os.environ.get("TENSORTOPO_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        if log.isEnabledFor(logging.DEBUG):
            raise
        return 2 if args.usage_errors else 1


if __name__ == "__main__":
    sys.exit(main())
