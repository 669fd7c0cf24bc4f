"""Topological graph assembly, row layout, and stable serialization.

Regions and degenerate curves become nodes; adjacency, containment,
curve membership, and linking become typed edges. Layout places nodes
on four fixed rows (planar curves, planar regions, linear regions,
linear curves) with fully deterministic column orders, and the
serializer writes graph.json plus one geometry file per node so the
result can be consumed without the library.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .curves import Polyline3, curves_to_json, linking_verdict
from .extract import Linearity
from .regions import RelationKind

__all__ = [
    "NodeKind",
    "EdgeKind",
    "GraphNode",
    "GraphEdge",
    "TopoGraph",
    "GRAPH_SCHEMA",
    "build_graph",
    "layout",
    "serialize",
    "deserialize",
]


class NodeKind(str, Enum):
    REGION = "RegionNode"
    CURVE = "CurveNode"


class EdgeKind(str, Enum):
    ADJACENCY = "Adjacency"
    CONTAINMENT = "Containment"
    MEMBERSHIP = "Membership"
    LINK = "Link"


_CURVE_KEYS = ("closed", "writhe", "jones", "knotted", "index", "segments", "length")


@dataclass
class GraphNode:
    """One region or curve with its summary payload and grid position.

    ``geometry_data`` carries the shapes to write at serialization time
    (a Polyline3 for curves, a (positions, triangles) pair for regions)
    and is excluded from equality so a deserialized graph compares equal
    to the one that produced it.
    """

    id: str
    kind: NodeKind
    linearity: Linearity
    betti: tuple | None = None
    volume: float | None = None
    curve: dict | None = None
    row: int | None = None
    col: int | None = None
    geometry: str | None = None
    geometry_data: object = field(default=None, compare=False, repr=False)


@dataclass
class GraphEdge:
    kind: EdgeKind
    a: str
    b: str
    linking: float | None = None
    contained: str | None = None


@dataclass
class TopoGraph:
    nodes: list
    edges: list

    def node(self, node_id: str) -> GraphNode:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(f"no node {node_id!r}")


GRAPH_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["version", "nodes", "edges"],
    "additionalProperties": False,
    "properties": {
        "version": {"const": "1"},
        "nodes": {
            "type": "array",
            "items": {
                "type": "object",
                "required": [
                    "id",
                    "kind",
                    "row",
                    "col",
                    "linearity",
                    "betti",
                    "volume",
                    "curve",
                    "geometry",
                ],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string"},
                    "kind": {"enum": ["RegionNode", "CurveNode"]},
                    "row": {"type": "integer", "minimum": 0, "maximum": 3},
                    "col": {"type": "integer", "minimum": 0},
                    "linearity": {"enum": ["Linear", "Planar"]},
                    "betti": {
                        "type": ["array", "null"],
                        "items": {"type": "integer", "minimum": 0},
                        "minItems": 2,
                        "maxItems": 2,
                    },
                    "volume": {"type": ["number", "null"]},
                    "curve": {
                        "type": ["object", "null"],
                        "required": list(_CURVE_KEYS),
                        "additionalProperties": False,
                        "properties": {
                            "closed": {"type": "boolean"},
                            "writhe": {"type": ["number", "null"]},
                            "jones": {"type": ["string", "null"]},
                            "knotted": {"type": ["boolean", "null"]},
                            "index": {"type": ["string", "null"]},
                            "segments": {
                                "type": "array",
                                "items": {
                                    "type": "object",
                                    "required": ["class", "fraction"],
                                    "additionalProperties": False,
                                    "properties": {
                                        "class": {"type": "string"},
                                        "fraction": {"type": "number"},
                                    },
                                },
                            },
                            "length": {"type": "number"},
                        },
                    },
                    "geometry": {"type": ["string", "null"]},
                },
            },
        },
        "edges": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["kind", "a", "b", "linking", "containedNode"],
                "additionalProperties": False,
                "properties": {
                    "kind": {
                        "enum": ["Adjacency", "Containment", "Membership", "Link"]
                    },
                    "a": {"type": "string"},
                    "b": {"type": "string"},
                    "linking": {"type": ["number", "null"]},
                    "containedNode": {"type": ["string", "null"]},
                },
            },
        },
    },
}


def _curve_length(points, closed):
    steps = np.linalg.norm(np.diff(points, axis=0), axis=1)
    total = float(steps.sum())
    if closed:
        total += float(np.linalg.norm(points[0] - points[-1]))
    return total


def _class_segments(curve):
    """Contiguous class runs along the curve as arc-length fractions."""
    pts = np.asarray(curve.samples, dtype=np.float64)
    if len(pts) < 2:
        return []
    steps = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    names = [
        c.value if c is not None else "Unresolved" for c in curve.classes
    ][: len(steps)]
    total = float(steps.sum())
    if total <= 0.0:
        return []
    runs = []
    for name, step in zip(names, steps):
        if runs and runs[-1][0] == name:
            runs[-1][1] += float(step)
        else:
            runs.append([name, float(step)])
    return [
        {"class": name, "fraction": length / total} for name, length in runs
    ]


def _normalize_curve_payload(curve, info):
    payload = {key: info.get(key) for key in _CURVE_KEYS}
    payload["closed"] = bool(curve.closed)
    jones = payload["jones"]
    if jones is not None and not isinstance(jones, str):
        payload["jones"] = jones.text()
    if payload["segments"] is None:
        payload["segments"] = _class_segments(curve)
    if payload["length"] is None:
        payload["length"] = _curve_length(
            np.asarray(curve.samples, dtype=np.float64), curve.closed
        )
    return payload


def build_graph(
    regions,
    relations,
    curves,
    curve_regions,
    link_matrix=None,
    curve_invariants=None,
) -> TopoGraph:
    """One node per region and curve, with every typed edge attached.

    ``curve_regions`` maps curve position to its container region id;
    ``link_matrix`` holds pairwise linking values; ``curve_invariants``
    carries per-curve summary dicts (missing entries are derived from
    the curve samples where possible and null otherwise). Dangling
    references raise.
    """
    region_ids = {r.id for r in regions}
    if len(curve_regions) != len(curves):
        raise ValueError("curve_regions must match curves one to one")
    for rid in curve_regions:
        if rid not in region_ids:
            raise ValueError(f"curve container region {rid} does not exist")
    if curve_invariants is None:
        curve_invariants = [{} for _ in curves]
    if len(curve_invariants) != len(curves):
        raise ValueError("curve_invariants must match curves one to one")
    n_curves = len(curves)
    if link_matrix is None:
        link_matrix = np.zeros((n_curves, n_curves))
    link_matrix = np.asarray(link_matrix, dtype=np.float64)
    if link_matrix.shape != (n_curves, n_curves):
        raise ValueError("link_matrix must be square over the curves")

    nodes = []
    for r in sorted(regions, key=lambda r: r.id):
        nid = f"R{r.id}"
        nodes.append(
            GraphNode(
                id=nid,
                kind=NodeKind.REGION,
                linearity=r.linearity,
                betti=tuple(r.betti) if r.betti is not None else None,
                volume=float(r.volume),
                geometry=f"regions/{nid}.obj",
                geometry_data=(r.positions, r.boundary_tris),
            )
        )
    for i, curve in enumerate(curves):
        nid = f"C{i}"
        pts = np.asarray(curve.samples, dtype=np.float64)
        closed = bool(curve.closed)
        if closed and len(pts) > 3 and np.array_equal(pts[0], pts[-1]):
            pts = pts[:-1]
        nodes.append(
            GraphNode(
                id=nid,
                kind=NodeKind.CURVE,
                linearity=curve.linearity,
                curve=_normalize_curve_payload(curve, curve_invariants[i]),
                geometry=f"curves/{nid}.json",
                geometry_data=Polyline3(pts, closed=closed),
            )
        )

    edges = []
    for rel in relations:
        a, b = f"R{rel.a}", f"R{rel.b}"
        if rel.a not in region_ids or rel.b not in region_ids:
            raise ValueError(f"relation references missing region {rel!r}")
        if rel.kind == RelationKind.ADJACENT:
            edges.append(GraphEdge(kind=EdgeKind.ADJACENCY, a=a, b=b))
        else:
            edges.append(
                GraphEdge(kind=EdgeKind.CONTAINMENT, a=a, b=b, contained=b)
            )
    for i, rid in enumerate(curve_regions):
        region = next(r for r in regions if r.id == rid)
        if region.linearity != curves[i].linearity:
            raise ValueError(
                f"curve C{i} is {curves[i].linearity.value} but its "
                f"container region R{rid} is {region.linearity.value}"
            )
        edges.append(GraphEdge(kind=EdgeKind.MEMBERSHIP, a=f"C{i}", b=f"R{rid}"))
    for i in range(n_curves):
        for j in range(i + 1, n_curves):
            lk = float(link_matrix[i, j])
            both_closed = bool(curves[i].closed) and bool(curves[j].closed)
            if not linking_verdict(lk, both_closed):
                continue
            value = float(round(lk)) if both_closed else lk
            edges.append(
                GraphEdge(kind=EdgeKind.LINK, a=f"C{i}", b=f"C{j}", linking=value)
            )
    return TopoGraph(nodes=nodes, edges=edges)


def _row_of(node: GraphNode) -> int:
    planar = node.linearity == Linearity.PLANAR
    if node.kind == NodeKind.CURVE:
        return 0 if planar else 3
    return 1 if planar else 2


def layout(g: TopoGraph) -> TopoGraph:
    """Assign (row, col) to every node, deterministically.

    Region columns sort by (total Betti, volume), ascending on the
    linear row and descending on the planar row. Curves group under
    their container region's column and sort by entanglement strength
    (|writhe|, summed |linking|, length) descending. Node id breaks all
    ties, so the result is invariant to input node order.
    """
    for node in g.nodes:
        node.row = _row_of(node)

    container = {}
    link_strength = {}
    for e in g.edges:
        if e.kind == EdgeKind.MEMBERSHIP:
            container[e.a] = e.b
        elif e.kind == EdgeKind.LINK:
            for nid in (e.a, e.b):
                link_strength[nid] = link_strength.get(nid, 0.0) + abs(
                    e.linking or 0.0
                )

    region_col = {}
    for row, ascending in ((1, False), (2, True)):
        members = [n for n in g.nodes if n.row == row]

        def region_key(n):
            total = sum(n.betti) if n.betti is not None else 0
            vol = n.volume if n.volume is not None else 0.0
            if ascending:
                return (total, vol, n.id)
            return (-total, -vol, n.id)

        for col, node in enumerate(sorted(members, key=region_key)):
            node.col = col
            region_col[node.id] = col

    for row in (0, 3):
        members = [n for n in g.nodes if n.row == row]

        def curve_key(n):
            payload = n.curve or {}
            wr = payload.get("writhe")
            return (
                region_col.get(container.get(n.id), 0),
                -abs(wr if wr is not None else 0.0),
                -link_strength.get(n.id, 0.0),
                -(payload.get("length") or 0.0),
                n.id,
            )

        for col, node in enumerate(sorted(members, key=curve_key)):
            node.col = col
    return g


def _node_dict(node: GraphNode) -> dict:
    curve = None
    if node.curve is not None:
        curve = {key: node.curve.get(key) for key in _CURVE_KEYS}
    return {
        "id": node.id,
        "kind": node.kind.value,
        "row": node.row,
        "col": node.col,
        "linearity": node.linearity.value,
        "betti": list(node.betti) if node.betti is not None else None,
        "volume": node.volume,
        "curve": curve,
        "geometry": node.geometry,
    }


def _edge_dict(edge: GraphEdge) -> dict:
    return {
        "kind": edge.kind.value,
        "a": edge.a,
        "b": edge.b,
        "linking": edge.linking,
        "containedNode": edge.contained,
    }


def to_dict(g: TopoGraph) -> dict:
    return {
        "version": "1",
        "nodes": [_node_dict(n) for n in g.nodes],
        "edges": [_edge_dict(e) for e in g.edges],
    }


def from_dict(doc: dict) -> TopoGraph:
    if doc.get("version") != "1":
        raise ValueError(f"unsupported graph version {doc.get('version')!r}")
    nodes = [
        GraphNode(
            id=n["id"],
            kind=NodeKind(n["kind"]),
            linearity=Linearity(n["linearity"]),
            betti=tuple(n["betti"]) if n.get("betti") is not None else None,
            volume=n.get("volume"),
            curve=n.get("curve"),
            row=n.get("row"),
            col=n.get("col"),
            geometry=n.get("geometry"),
        )
        for n in doc["nodes"]
    ]
    edges = [
        GraphEdge(
            kind=EdgeKind(e["kind"]),
            a=e["a"],
            b=e["b"],
            linking=e.get("linking"),
            contained=e.get("containedNode"),
        )
        for e in doc["edges"]
    ]
    return TopoGraph(nodes=nodes, edges=edges)


def _write_obj(path: Path, positions, triangles) -> None:
    tris = np.asarray(triangles, dtype=np.int64)
    used = np.unique(tris)
    remap = {int(v): i + 1 for i, v in enumerate(used)}
    lines = []
    for v in used:
        x, y, z = (repr(float(c)) for c in positions[int(v)])
        lines.append(f"v {x} {y} {z}")
    for tri in tris:
        a, b, c = (remap[int(v)] for v in tri)
        lines.append(f"f {a} {b} {c}")
    path.write_text("\n".join(lines) + "\n")


def serialize(g: TopoGraph, out_dir) -> Path:
    """Write graph.json and per-node geometry files; return the json path.

    Key order and 2-space indentation are fixed, so identical graphs
    serialize byte-identically.
    """
    if any(n.row is None or n.col is None for n in g.nodes):
        raise ValueError("layout missing; call layout() before serialize()")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for node in g.nodes:
        if node.geometry is None or node.geometry_data is None:
            continue
        target = out / node.geometry
        target.parent.mkdir(parents=True, exist_ok=True)
        if node.kind == NodeKind.CURVE:
            target.write_text(curves_to_json([node.geometry_data]) + "\n")
        else:
            positions, triangles = node.geometry_data
            _write_obj(target, positions, triangles)
    graph_path = out / "graph.json"
    graph_path.write_text(json.dumps(to_dict(g), indent=2) + "\n")
    return graph_path


def deserialize(path) -> TopoGraph:
    """Read a graph.json (or a directory containing one) back."""
    p = Path(path)
    if p.is_dir():
        p = p / "graph.json"
    return from_dict(json.loads(p.read_text()))
