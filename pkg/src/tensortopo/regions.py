"""Linear/planar region segmentation with volumes and homology.

The neutral surface splits each tet into at most two convex cells of
opposite mode sign. Cells merge across shared faces into regions. Each
region boundary (its neutral triangles plus clipped domain-boundary
patches) is watertight by construction, so volume follows from the
divergence theorem and the Euler characteristic from boundary sheet
counts, without tetrahedralizing the interior.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .extract import DegenerateCurve, Linearity, NeutralSurface, _unique_faces
from .mesh import TensorMesh
from .tensor import mode

__all__ = [
    "Side",
    "RelationKind",
    "BoundarySheet",
    "Region",
    "RegionRelation",
    "segment_regions",
    "region_volume",
    "euler_characteristic",
    "betti",
    "compute_relations",
    "assign_curve_region",
]


class Side(str, Enum):
    INNER = "Inner"
    OUTER = "Outer"


class RelationKind(str, Enum):
    ADJACENT = "Adjacent"
    CONTAINS = "Contains"


@dataclass
class BoundarySheet:
    sheet_id: int
    closed: bool
    side: Side


@dataclass
class Region:
    """Maximal connected set of cells with one mode sign.

    ``cells`` lists (tet_id, sign) pairs; ``boundary_tris`` holds the
    outward-oriented watertight boundary in the shared ``positions``
    index space (mesh vertices first, then surface crossings).
    """

    id: int
    linearity: Linearity
    cells: list
    boundary_sheets: list = field(default_factory=list)
    volume: float = 0.0
    euler_char: int = 0
    betti: tuple | None = None
    boundary_tris: np.ndarray | None = field(default=None, repr=False)
    positions: np.ndarray | None = field(default=None, repr=False)


@dataclass
class RegionRelation:
    kind: RelationKind
    a: int
    b: int
    sheets: list


def _vertex_signs(mesh: TensorMesh) -> np.ndarray:
    """Effective mode sign per vertex, matching the surface extractor.

    Near-neutral and undefined-mode vertices count as positive exactly
    when mode >= 0 there, the extractor's symbolic perturbation rule.
    """
    mu = mode(mesh.tensors)
    mu = np.where(np.isnan(mu), 1.0, mu)
    return np.where(mu >= 0.0, 1, -1).astype(np.int8)


class _UnionFind:
    def __init__(self, n):
        self.parent = np.arange(n, dtype=np.int64)

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def _cell_slot(tet_id: int, sign: int) -> int:
    return 2 * tet_id + (0 if sign > 0 else 1)


def _expected_cuts(s0, s1, s2, s3) -> int:
    neg = int(s0 < 0) + int(s1 < 0) + int(s2 < 0) + int(s3 < 0)
    if neg in (0, 4):
        return 0
    return 1 if neg in (1, 3) else 2


def _quad_fan(quad):
    """Two triangles of a convex quad, diagonal from its smallest id.

    The smallest-id rule makes the diagonal independent of which side
    of the face asks, so shared patches stay edge-compatible.
    """
    k = int(np.argmin(quad))
    q = quad[k:] + quad[:k]
    return [(q[0], q[1], q[2]), (q[0], q[2], q[3])]


def segment_regions(mesh: TensorMesh, surface: NeutralSurface):
    """Split the mesh into uniform-sign regions bounded by the surface.

    Returns Region objects with volume, Euler characteristic, and
    boundary sheets (with containment side) filled in; betti stays None
    until relations are known.
    """
    if surface.crossing_edges is None or surface.tri_tets is None:
        raise ValueError(
            "surface lacks crossing_edges/tri_tets; extract it from this mesh"
        )
    signs = _vertex_signs(mesh)
    tets = mesh.tets
    n_tets = len(tets)

    cuts = np.zeros(n_tets, dtype=np.int64)
    for tid in surface.tri_tets:
        cuts[tid] += 1
    tet_signs = signs[tets]
    for tid in range(n_tets):
        s = tet_signs[tid]
        if _expected_cuts(*s) != cuts[tid]:
            raise ValueError(
                f"neutral surface inconsistent with mode signs in tet {tid}"
            )

    uf = _UnionFind(2 * n_tets)
    uniq, start, counts, owner_tet = _unique_faces(mesh)
    face_signs = signs[uniq]
    interior = np.nonzero(counts == 2)[0]
    for fi in interior:
        ta = int(owner_tet[start[fi]])
        tb = int(owner_tet[start[fi] + 1])
        fs = face_signs[fi]
        if fs.max() > 0:
            uf.union(_cell_slot(ta, 1), _cell_slot(tb, 1))
        if fs.min() < 0:
            uf.union(_cell_slot(ta, -1), _cell_slot(tb, -1))

    # live cells: one per sign present in the tet
    cell_region = {}
    groups = {}
    for tid in range(n_tets):
        for sgn in (1, -1):
            if (tet_signs[tid] == sgn).any():
                root = uf.find(_cell_slot(tid, sgn))
                groups.setdefault(root, []).append((tid, sgn))
    ordered = sorted(groups.values(), key=lambda cells: cells[0])
    n_mesh = mesh.n_vertices
    positions = (
        np.vstack([mesh.vertices, surface.positions])
        if len(surface.positions)
        else mesh.vertices.copy()
    )
    regions = []
    slot_to_region = np.full(2 * n_tets, -1, dtype=np.int64)
    for rid, cells in enumerate(ordered):
        sgn = cells[0][1]
        regions.append(
            Region(
                id=rid,
                linearity=Linearity.LINEAR if sgn > 0 else Linearity.PLANAR,
                cells=cells,
                positions=positions,
            )
        )
        for tid, s in cells:
            slot_to_region[_cell_slot(tid, s)] = rid

    # neutral triangles: stored orientation points to the positive side,
    # which is outward for the negative region
    tris_of = [[] for _ in regions]
    sheet_pair = {}
    for ti in range(len(surface.triangles)):
        tid = int(surface.tri_tets[ti])
        g = surface.triangles[ti] + n_mesh
        r_pos = int(slot_to_region[_cell_slot(tid, 1)])
        r_neg = int(slot_to_region[_cell_slot(tid, -1)])
        tris_of[r_neg].append((int(g[0]), int(g[1]), int(g[2])))
        tris_of[r_pos].append((int(g[0]), int(g[2]), int(g[1])))
        sid = int(surface.sheet_ids[ti])
        prev = sheet_pair.setdefault(sid, (r_pos, r_neg))
        if prev != (r_pos, r_neg):
            raise RuntimeError(f"sheet {sid} borders more than two regions")

    crossing_of = {}
    for ci, (a, b) in enumerate(surface.crossing_edges):
        crossing_of[(int(a), int(b))] = n_mesh + ci

    boundary = np.nonzero(counts == 1)[0]
    for fi in boundary:
        tid = int(owner_tet[start[fi]])
        face = [int(v) for v in uniq[fi]]
        opp = [int(v) for v in tets[tid] if int(v) not in face]
        a, b, c = face
        n = np.cross(positions[b] - positions[a], positions[c] - positions[a])
        if np.dot(n, positions[opp[0]] - positions[a]) > 0.0:
            b, c = c, b
        fs = [int(signs[a]), int(signs[b]), int(signs[c])]
        if fs[0] == fs[1] == fs[2]:
            tris_of[slot_to_region[_cell_slot(tid, fs[0])]].append((a, b, c))
            continue
        cyc = [a, b, c]
        lone_k = next(k for k in range(3) if fs[k] != fs[(k + 1) % 3] and fs[k] != fs[(k + 2) % 3])
        l, m, nn = cyc[lone_k], cyc[(lone_k + 1) % 3], cyc[(lone_k + 2) % 3]
        c1 = crossing_of[(l, m) if l < m else (m, l)]
        c2 = crossing_of[(nn, l) if nn < l else (l, nn)]
        s_l = int(signs[l])
        tris_of[slot_to_region[_cell_slot(tid, s_l)]].append((l, c1, c2))
        quad_region = slot_to_region[_cell_slot(tid, -s_l)]
        for tri in _quad_fan([c1, m, nn, c2]):
            tris_of[quad_region].append(tri)

    for r in regions:
        r.boundary_tris = np.asarray(tris_of[r.id], dtype=np.int64)
        r.volume = region_volume(r)
        r.euler_char = euler_characteristic(r)

    _attach_boundary_sheets(
        regions, surface, sheet_pair, signs, mesh.tets, positions, n_mesh
    )
    return regions


def region_volume(region: Region) -> float:
    """Divergence-theorem volume of the watertight region boundary."""
    tris = region.boundary_tris
    if tris is None:
        raise ValueError("region has no boundary geometry")
    edge_count = {}
    for tri in tris:
        for k in range(3):
            a, b = int(tri[k]), int(tri[(k + 1) % 3])
            key = (a, b) if a < b else (b, a)
            edge_count[key] = edge_count.get(key, 0) + 1
    bad = [e for e, cnt in edge_count.items() if cnt != 2]
    if bad:
        raise RuntimeError(
            f"region {region.id} boundary is not watertight; open edges "
            f"{sorted(bad)[:8]}"
        )
    p = region.positions
    a, b, c = p[tris[:, 0]], p[tris[:, 1]], p[tris[:, 2]]
    vol = float(np.einsum("ij,ij->", a, np.cross(b, c)) / 6.0)
    if vol <= 0.0:
        raise RuntimeError(f"region {region.id} volume {vol} is not positive")
    return vol


def euler_characteristic(region: Region) -> int:
    """Half the boundary characteristic, per connected boundary part."""
    tris = region.boundary_tris
    if tris is None:
        raise ValueError("region has no boundary geometry")
    uf = _UnionFind(len(tris))
    edge_owner = {}
    for ti, tri in enumerate(tris):
        for k in range(3):
            a, b = int(tri[k]), int(tri[(k + 1) % 3])
            key = (a, b) if a < b else (b, a)
            if key in edge_owner:
                uf.union(edge_owner[key], ti)
            else:
                edge_owner[key] = ti
    verts = {}
    edges = {}
    faces = {}
    for ti, tri in enumerate(tris):
        root = uf.find(ti)
        faces[root] = faces.get(root, 0) + 1
        verts.setdefault(root, set()).update(int(v) for v in tri)
        es = edges.setdefault(root, set())
        for k in range(3):
            a, b = int(tri[k]), int(tri[(k + 1) % 3])
            es.add((a, b) if a < b else (b, a))
    total = sum(
        len(verts[r]) - len(edges[r]) + faces[r] for r in faces
    )
    if total % 2:
        raise RuntimeError(
            f"region {region.id} boundary characteristic {total} is odd"
        )
    return total // 2


_GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


def _golden_directions(n: int = 16) -> np.ndarray:
    i = np.arange(n, dtype=np.float64)
    z = 1.0 - 2.0 * (i + 0.5) / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    th = i * _GOLDEN_ANGLE
    return np.column_stack([r * np.cos(th), r * np.sin(th), z])


def _ray_parity(origin, tri_pos, scale):
    """Crossing parity of a deterministic ray against a triangle soup.

    Grazing hits (near an edge, near-parallel plane contact, or a start
    point on the surface) poison a direction; the next golden-ratio
    direction is tried, with a hard error when all are ambiguous.
    """
    a, b, c = tri_pos[:, 0], tri_pos[:, 1], tri_pos[:, 2]
    e1 = b - a
    e2 = c - a
    eps_b = 1e-9
    eps_t = 1e-12 * scale
    for d in _golden_directions():
        pvec = np.cross(d[None, :], e2)
        det = np.einsum("ij,ij->i", e1, pvec)
        tvec = origin[None, :] - a
        near_parallel = np.abs(det) <= 1e-12 * scale * scale
        plane_n = np.cross(e1, e2)
        plane_d = np.einsum("ij,ij->i", origin[None, :] - a, plane_n)
        risky = near_parallel & (
            np.abs(plane_d) <= 1e-9 * scale * np.linalg.norm(plane_n, axis=1)
        )
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / det
            u = np.einsum("ij,ij->i", tvec, pvec) * inv
            qvec = np.cross(tvec, e1)
            v = np.einsum("ij,j->i", qvec, d) * inv
            t = np.einsum("ij,ij->i", e2, qvec) * inv
            strict = (
                ~near_parallel
                & (u > eps_b)
                & (v > eps_b)
                & (u + v < 1.0 - eps_b)
                & (t > eps_t)
            )
            loose = (
                ~near_parallel
                & (u > -eps_b)
                & (v > -eps_b)
                & (u + v < 1.0 + eps_b)
                & (t > -eps_t)
            )
        if risky.any() or (loose & ~strict).any():
            continue
        return int(strict.sum()) % 2
    raise RuntimeError("all ray directions hit the sheet tangentially")


def _cell_interior_point(signs, tets, surface, tid, sgn, n_mesh, positions):
    """Centroid of one convex sub-cell, strictly inside it."""
    pts = [positions[int(v)] for v in tets[tid] if signs[int(v)] == sgn]
    tri_rows = np.nonzero(surface.tri_tets == tid)[0]
    crossings = sorted(
        {int(v) for ti in tri_rows for v in surface.triangles[ti]}
    )
    pts.extend(positions[n_mesh + ci] for ci in crossings)
    return np.mean(pts, axis=0)


def _attach_boundary_sheets(
    regions, surface, sheet_pair, signs, tets, positions, n_mesh
):
    mesh_scale = float(
        np.linalg.norm(positions.max(axis=0) - positions.min(axis=0))
    )
    for sid in sorted(sheet_pair):
        r_pos, r_neg = sheet_pair[sid]
        closed = bool(surface.sheet_closed[sid])
        if not closed:
            regions[r_pos].boundary_sheets.append(
                BoundarySheet(sid, False, Side.OUTER)
            )
            regions[r_neg].boundary_sheets.append(
                BoundarySheet(sid, False, Side.OUTER)
            )
            continue
        rows = np.nonzero(surface.sheet_ids == sid)[0]
        tri_pos = positions[surface.triangles[rows] + n_mesh]
        t0 = int(surface.tri_tets[rows[0]])
        parity = {}
        for rid, sgn in ((r_pos, 1), (r_neg, -1)):
            origin = _cell_interior_point(
                signs, tets, surface, t0, sgn, n_mesh, positions
            )
            parity[rid] = _ray_parity(origin, tri_pos, mesh_scale)
        if parity[r_pos] == parity[r_neg]:
            raise RuntimeError(
                f"sheet {sid} parity test failed to separate its sides"
            )
        for rid in (r_pos, r_neg):
            side = Side.INNER if parity[rid] % 2 else Side.OUTER
            regions[rid].boundary_sheets.append(BoundarySheet(sid, True, side))


def compute_relations(regions, surface):
    """Adjacency for every sheet and containment for the closed ones.

    The container of a closed sheet is the region on its Outer side;
    relations aggregate the sheet ids shared by the same region pair.
    """
    adjacent = {}
    contains = {}
    side_of = {
        (r.id, bs.sheet_id): bs for r in regions for bs in r.boundary_sheets
    }
    for sid in sorted(
        {bs.sheet_id for r in regions for bs in r.boundary_sheets}
    ):
        pair = sorted(r.id for r in regions if (r.id, sid) in side_of)
        if len(pair) != 2:
            raise RuntimeError(f"sheet {sid} does not separate two regions")
        a, b = pair
        if regions[a].linearity == regions[b].linearity:
            raise RuntimeError(
                f"sheet {sid} joins two {regions[a].linearity.value} regions"
            )
        adjacent.setdefault((a, b), []).append(sid)
        if side_of[(a, sid)].closed:
            outer = a if side_of[(a, sid)].side == Side.OUTER else b
            inner = b if outer == a else a
            contains.setdefault((outer, inner), []).append(sid)
    relations = [
        RegionRelation(RelationKind.ADJACENT, a, b, sids)
        for (a, b), sids in sorted(adjacent.items())
    ]
    relations.extend(
        RegionRelation(RelationKind.CONTAINS, a, b, sids)
        for (a, b), sids in sorted(contains.items())
    )
    return relations


def betti(region: Region, all_regions, relations) -> tuple:
    """(first, second) Betti numbers from the boundary census.

    Every closed boundary sheet with the region on the Outer side walls
    off a cavity, which is exactly one unit of second homology; the
    first Betti number then follows from the Euler characteristic with
    one connected component.
    """
    b2 = sum(
        1
        for bs in region.boundary_sheets
        if bs.closed and bs.side == Side.OUTER
    )
    b1 = 1 + b2 - region.euler_char
    if b1 < 0:
        raise RuntimeError(
            f"region {region.id} has inconsistent topology "
            f"(chi {region.euler_char}, b2 {b2})"
        )
    region.betti = (b1, b2)
    return region.betti


def assign_curve_region(curve: DegenerateCurve, regions) -> int:
    """Region owning the curve, checked at spread-out samples."""
    lookup = {}
    for r in regions:
        for tid, sgn in r.cells:
            lookup[(tid, sgn)] = r.id
    sgn = 1 if curve.linearity == Linearity.LINEAR else -1
    resolved = [t for t in curve.tet_ids if t is not None and t >= 0]
    if not resolved:
        raise ValueError("curve has no resolved sample tets")
    probes = {resolved[0], resolved[len(resolved) // 2], resolved[-1]}
    owners = set()
    for tid in sorted(probes):
        key = (int(tid), sgn)
        if key not in lookup:
            raise RuntimeError(
                f"curve sample tet {tid} has no {curve.linearity.value} cell"
            )
        owners.add(lookup[key])
    if len(owners) != 1:
        raise RuntimeError(
            f"curve samples fall in different regions {sorted(owners)}"
        )
    return owners.pop()
