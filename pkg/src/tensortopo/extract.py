"""Degenerate curves and neutral surfaces of piecewise-linear tensor fields.

Degenerate points (two equal eigenvalues) form curves in 3D, and their
traces on mesh faces are isolated points of the linear per-face tensor
family. The extractor finds those face points by pruned subdivision plus
Gauss-Newton, pairs them through tets, and stitches the segments into
curves. Neutral points (mode zero) form surfaces, extracted by marching
tetrahedra on the sign of mode with bisected edge crossings.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field as dc_field
from enum import Enum

import numpy as np

from ._accel import gn_polish
from .mesh import TensorMesh, PLField
from .tensor import eigenvalues, fro_norm, mode, to_matrix
from .winding import WindingError, point_index

__all__ = [
    "Linearity",
    "PointClass",
    "ExtractConfig",
    "FacePoint",
    "DegenerateCurve",
    "NeutralSurface",
    "face_degenerate_points",
    "trace_degenerate_curves",
    "classify_point",
    "classify_curve",
    "find_transition_points",
    "extract_neutral_surface",
    "subdivide_mesh",
]


class Linearity(str, Enum):
    LINEAR = "Linear"
    PLANAR = "Planar"


class PointClass(str, Enum):
    WEDGE = "Wedge"
    TRISECTOR = "Trisector"
    TRANSITION = "Transition"
    UNRESOLVED = "Unresolved"


@dataclass
class ExtractConfig:
    """Tolerances and budgets shared by the extraction passes.

    ``point_tol`` defaults to 1e-6 of the bbox diagonal when left None.
    ``subdiv`` refines every tet 1:8 that many times before the neutral
    surface pass (curve extraction always runs on the given mesh).
    """

    mode_tol: float = 1e-6
    point_tol: float | None = None
    depth: int = 5
    step_factor: float = 0.1
    subdiv: int = 0
    jobs: int = 1
    min_curve_length: float = 0.0

    def resolved_point_tol(self, mesh: TensorMesh) -> float:
        if self.point_tol is not None:
            return self.point_tol
        lo, hi = mesh.bbox()
        return 1e-6 * float(np.linalg.norm(hi - lo))


@dataclass
class FacePoint:
    """One degenerate point on a mesh face.

    ``resolved`` is False when the scan could not isolate the point
    (budget exhaustion or a non-isolated degenerate set on the face).
    """

    position: np.ndarray
    bary: np.ndarray
    face: tuple
    linearity: Linearity
    resolved: bool = True


@dataclass
class DegenerateCurve:
    """Chain of degenerate samples with per-sample metadata.

    ``classes`` entries are None until classification runs, except
    endpoints the tracer already knows are unresolved. Closed curves
    repeat the first sample at the end.
    """

    samples: np.ndarray
    linearity: Linearity
    closed: bool
    tet_ids: list
    classes: list = dc_field(default_factory=list)

    def __post_init__(self):
        if not self.classes:
            self.classes = [None] * len(self.samples)

    @property
    def n_samples(self) -> int:
        return len(self.samples)

    def length(self) -> float:
        d = np.diff(self.samples, axis=0)
        return float(np.linalg.norm(d, axis=1).sum())

    def arc_positions(self) -> np.ndarray:
        d = np.linalg.norm(np.diff(self.samples, axis=0), axis=1)
        return np.concatenate([[0.0], np.cumsum(d)])


@dataclass
class NeutralSurface:
    """Indexed triangles of the mode-zero set, grouped into sheets.

    ``crossing_edges`` gives the mesh edge (vertex id pair) each position
    bisects and ``tri_tets`` the tet that produced each triangle; region
    segmentation needs both to rebuild watertight cell boundaries.
    """

    positions: np.ndarray
    triangles: np.ndarray
    sheet_ids: np.ndarray
    sheet_closed: list
    crossing_edges: np.ndarray | None = None
    tri_tets: np.ndarray | None = None

    @property
    def n_sheets(self) -> int:
        return len(self.sheet_closed)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)


_GAP_COLS = {Linearity.LINEAR: (1, 2), Linearity.PLANAR: (0, 1)}
# eigh returns ascending order; columns of the colliding pair, descending
_EIGH_PAIR = {Linearity.LINEAR: (1, 0), Linearity.PLANAR: (2, 1)}
_MODE_TARGET = {Linearity.LINEAR: 1.0, Linearity.PLANAR: -1.0}


def _pair_gap(vals: np.ndarray, linearity: Linearity) -> np.ndarray:
    a, b = _GAP_COLS[linearity]
    return vals[..., a] - vals[..., b]


def _pair_residual(m: np.ndarray, va: np.ndarray, vb: np.ndarray) -> np.ndarray:
    return np.array(
        [0.5 * (va @ m @ va - vb @ m @ vb), va @ m @ vb]
    )


def _polish_batch(corner_t6, face_idx, seed_uv, linearity, tol):
    """Gauss-Newton polish of all seeds at once on the accel kernel.

    corner_t6 is (F, 3, 6); face_idx and seed_uv give each seed's face
    and start coordinates. Returns (bary (S, 3), code (S,)) with code 0
    for an accepted in-face zero, 1 for one that left the face or
    misses the mode target (dropped silently), 2 for no convergence.
    """
    corner_t6 = np.asarray(corner_t6, dtype=np.float64)
    face_idx = np.asarray(face_idx, dtype=np.int64)
    seed_uv = np.asarray(seed_uv, dtype=np.float64)
    du6 = corner_t6[:, 1] - corner_t6[:, 0]
    dv6 = corner_t6[:, 2] - corner_t6[:, 0]
    scale = np.maximum(fro_norm(corner_t6).max(axis=1), 1e-30)
    uv, status = gn_polish(
        corner_t6, du6, dv6, scale, face_idx, seed_uv,
        linearity == Linearity.LINEAR,
    )
    code = status.astype(np.int64)
    bary = np.column_stack([1.0 - uv.sum(axis=1), uv[:, 0], uv[:, 1]])
    # slack admits zeros a hair outside; a curve passing next to a mesh
    # edge must be reported by every face of the fan around that edge
    off = (bary.min(axis=1) < -1e-5) | (bary.max(axis=1) > 1.0 + 1e-5)
    code[(code == 0) & off] = 1
    bary = np.clip(bary, 0.0, 1.0)
    bary /= bary.sum(axis=1, keepdims=True)
    conv = np.nonzero(code == 0)[0]
    if len(conv):
        t6 = np.einsum("sj,sjc->sc", bary[conv], corner_t6[face_idx[conv]])
        mu = np.atleast_1d(mode(t6))
        bad = ~np.isfinite(mu) | (np.abs(mu - _MODE_TARGET[linearity]) > tol)
        code[conv[bad]] = 1
    return bary, code


def _subdivision_seeds(corner_t6, linearity, depth, corner_gaps=None, corner_diam=None):
    """Leaf seeds of the pruned subdivision, vectorized over faces.

    corner_t6 is (F, 3, 6). Pruning uses the Lipschitz certificate:
    eigenvalues are 1-Lipschitz in the Frobenius norm, so a corner gap
    larger than twice the tensor diameter of the subtriangle excludes a
    zero inside it. Interpolation is linear, so a midpoint tensor is the
    mean of its edge's corner tensors and a child's diameter is exactly
    half its parent's; only the three midpoints per split need fresh
    eigenvalues. Callers that already hold per-corner gaps and face
    diameters can pass them to skip the root evaluation. Returns
    (face_idx, bary) arrays of leaf centroids and the per-face count of
    surviving leaves.
    """
    n_faces = len(corner_t6)
    face_idx = np.arange(n_faces)
    bary = np.broadcast_to(np.eye(3), (n_faces, 3, 3)).copy()
    t = corner_t6
    if corner_gaps is None:
        vals = eigenvalues(t.reshape(-1, 6)).reshape(n_faces, 3, 3)
        corner_gaps = _pair_gap(vals, linearity)
    if corner_diam is None:
        corner_diam = np.maximum(
            np.maximum(
                fro_norm(t[:, 0] - t[:, 1]), fro_norm(t[:, 0] - t[:, 2])
            ),
            fro_norm(t[:, 1] - t[:, 2]),
        )
    g = corner_gaps
    diam = corner_diam
    keep = g.min(axis=1) <= 2.0 * diam
    face_idx, bary, t, g, diam = (
        face_idx[keep], bary[keep], t[keep], g[keep], diam[keep]
    )
    for _ in range(depth):
        if len(face_idx) == 0:
            break
        k = len(bary)
        m01 = 0.5 * (bary[:, 0] + bary[:, 1])
        m02 = 0.5 * (bary[:, 0] + bary[:, 2])
        m12 = 0.5 * (bary[:, 1] + bary[:, 2])
        children = np.empty((4 * k, 3, 3))
        children[0::4] = np.stack([bary[:, 0], m01, m02], axis=1)
        children[1::4] = np.stack([m01, bary[:, 1], m12], axis=1)
        children[2::4] = np.stack([m02, m12, bary[:, 2]], axis=1)
        children[3::4] = np.stack([m01, m12, m02], axis=1)
        tm = np.empty((k, 3, 6))
        tm[:, 0] = 0.5 * (t[:, 0] + t[:, 1])
        tm[:, 1] = 0.5 * (t[:, 0] + t[:, 2])
        tm[:, 2] = 0.5 * (t[:, 1] + t[:, 2])
        gm = _pair_gap(
            eigenvalues(tm.reshape(-1, 6)), linearity
        ).reshape(k, 3)
        ct = np.empty((4 * k, 3, 6))
        ct[0::4, 0] = t[:, 0]; ct[0::4, 1] = tm[:, 0]; ct[0::4, 2] = tm[:, 1]
        ct[1::4, 0] = tm[:, 0]; ct[1::4, 1] = t[:, 1]; ct[1::4, 2] = tm[:, 2]
        ct[2::4, 0] = tm[:, 1]; ct[2::4, 1] = tm[:, 2]; ct[2::4, 2] = t[:, 2]
        ct[3::4, 0] = tm[:, 0]; ct[3::4, 1] = tm[:, 2]; ct[3::4, 2] = tm[:, 1]
        cg = np.empty((4 * k, 3))
        cg[0::4, 0] = g[:, 0]; cg[0::4, 1] = gm[:, 0]; cg[0::4, 2] = gm[:, 1]
        cg[1::4, 0] = gm[:, 0]; cg[1::4, 1] = g[:, 1]; cg[1::4, 2] = gm[:, 2]
        cg[2::4, 0] = gm[:, 1]; cg[2::4, 1] = gm[:, 2]; cg[2::4, 2] = g[:, 2]
        cg[3::4, 0] = gm[:, 0]; cg[3::4, 1] = gm[:, 2]; cg[3::4, 2] = gm[:, 1]
        face_idx = np.repeat(face_idx, 4)
        bary = children
        t = ct
        g = cg
        diam = np.repeat(0.5 * diam, 4)
        keep = g.min(axis=1) <= 2.0 * diam
        face_idx, bary, t, g, diam = (
            face_idx[keep], bary[keep], t[keep], g[keep], diam[keep]
        )
    seeds = bary.mean(axis=1)
    leaf_counts = np.bincount(face_idx, minlength=n_faces)
    return face_idx, seeds, leaf_counts


_MAX_FACE_POINTS = 12


def _collect_face_points(corner_pos, bary, code, dedupe):
    """Dedupe polished zeros of one face, in seed order.

    Returns (points, unresolved_flag); the flag marks a face whose zero
    set could not be isolated (stuck iterations with nothing found, or
    more zeros than a linear family can isolate).
    """
    points = []
    kept = []
    stuck = False
    pos_all = bary @ corner_pos
    d2 = dedupe * dedupe
    for k in range(len(code)):
        if code[k] == 2:
            stuck = True
            continue
        if code[k] != 0:
            continue
        x, y, z = pos_all[k]
        new = True
        for qx, qy, qz in kept:
            if (x - qx) ** 2 + (y - qy) ** 2 + (z - qz) ** 2 <= d2:
                new = False
                break
        if new:
            kept.append((float(x), float(y), float(z)))
            points.append((pos_all[k], bary[k]))
        if len(points) > _MAX_FACE_POINTS:
            return [], True
    return points, stuck and not points


def _polish_seeds(corner_pos, corner_t6, seed_uv, linearity, tol, dedupe):
    """Polish every seed of one face and dedupe the zeros found."""
    seed_uv = np.asarray(seed_uv, dtype=np.float64).reshape(-1, 2)
    order = np.lexsort((seed_uv[:, 1], seed_uv[:, 0]))
    bary, code = _polish_batch(
        np.asarray(corner_t6, dtype=np.float64)[None],
        np.zeros(len(seed_uv), dtype=np.int64),
        seed_uv[order],
        linearity,
        tol,
    )
    return _collect_face_points(np.asarray(corner_pos), bary, code, dedupe)


def _scan_face(corner_pos, corner_t6, linearity, depth, tol, dedupe):
    """Single-face scan: subdivision seeds, then Gauss-Newton polish."""
    corner_t6 = np.asarray(corner_t6, dtype=np.float64)[None]
    corner_gaps = _pair_gap(eigenvalues(corner_t6[0]), linearity)
    gap_floor = 1e-9 * max(float(fro_norm(corner_t6).max()), 1e-30)
    if float(corner_gaps.max()) <= gap_floor:
        # the whole face is degenerate; no isolated zeros exist
        return [], True
    _, seeds, _ = _subdivision_seeds(corner_t6, linearity, depth)
    return _polish_seeds(
        np.asarray(corner_pos), corner_t6[0], seeds[:, 1:], linearity, tol, dedupe
    )


def face_degenerate_points(
    mesh: TensorMesh,
    face,
    linearity: Linearity,
    depth: int = 5,
    tol: float = 1e-6,
):
    """Isolated degenerate points of the linear tensor family on a face.

    ``face`` is a triple of vertex ids. Points that could not be
    isolated come back with ``resolved=False`` rather than vanishing.
    """
    face = tuple(int(i) for i in face)
    linearity = Linearity(linearity)
    corner_t6 = mesh.tensors[list(face)]
    if np.any(np.isnan(mode(corner_t6))):
        raise ValueError("face has a vertex with undefined mode")
    corner_pos = mesh.vertices[list(face)]
    dedupe = 1e-4 * mesh.cell_size()
    pts, bad = _scan_face(corner_pos, corner_t6, linearity, depth, tol, dedupe)
    out = [
        FacePoint(pos, bary, face, linearity, resolved=True)
        for pos, bary in pts
    ]
    if bad:
        centroid = corner_pos.mean(axis=0)
        out.append(
            FacePoint(
                centroid, np.full(3, 1.0 / 3.0), face, linearity, resolved=False
            )
        )
    return out


def _unique_faces(mesh: TensorMesh):
    """Sorted unique faces and their (tet, opposite-corner) incidences."""
    tets = mesh.tets
    faces = np.concatenate(
        [np.delete(tets, k, axis=1) for k in range(4)], axis=0
    )
    faces = np.sort(faces, axis=1)
    owner_tet = np.tile(np.arange(len(tets)), 4)
    order = np.lexsort((faces[:, 2], faces[:, 1], faces[:, 0]))
    faces = faces[order]
    owner_tet = owner_tet[order]
    uniq, start = np.unique(faces, axis=0, return_index=True)
    counts = np.diff(np.concatenate([start, [len(faces)]]))
    return uniq, start, counts, owner_tet


def _tet_gradients(mesh: TensorMesh, tet_id: int):
    """Spatial gradients of the linear tensor field inside one tet."""
    vid = mesh.tets[tet_id]
    p = mesh.vertices[vid]
    t = mesh.tensors[vid]
    e = (p[1:] - p[0]).T
    dt = t[1:] - t[0]
    grad = np.linalg.solve(e.T, dt)
    return t[0], p[0], grad


def _curve_tangent(t6, grad, linearity):
    """Degenerate set tangent: null direction of both pair constraints."""
    ia, ib = _EIGH_PAIR[linearity]
    _, vecs = np.linalg.eigh(to_matrix(t6))
    va, vb = vecs[:, ia], vecs[:, ib]
    rows = np.array([_pair_residual(to_matrix(g), va, vb) for g in grad])
    n = np.cross(rows[:, 0], rows[:, 1])
    norm = np.linalg.norm(n)
    if norm < 1e-14:
        return None
    return n / norm


def _bary_in_tet(point, p0, inv):
    w = inv @ (point - p0)
    return np.array([1.0 - w.sum(), w[0], w[1], w[2]])


def _tet_curve_tools(mesh, tet_id, linearity):
    """On-curve correction closures for one tet's linear tensor family."""
    t0, p0, grad = _tet_gradients(mesh, tet_id)
    vid = mesh.tets[tet_id]
    p = mesh.vertices[vid]
    inv = np.linalg.inv((p[1:] - p[0]).T)
    ia, ib = _EIGH_PAIR[linearity]
    scale = max(float(fro_norm(mesh.tensors[vid]).max()), 1e-30)

    def tensor_at(x):
        return t0 + (x - p0) @ grad

    def correct(x, tangent):
        for _ in range(20):
            m = to_matrix(tensor_at(x))
            _, vecs = np.linalg.eigh(m)
            va, vb = vecs[:, ia], vecs[:, ib]
            r = _pair_residual(m, va, vb)
            if np.linalg.norm(r) <= 1e-12 * scale:
                return x, True
            rows = np.array(
                [_pair_residual(to_matrix(g), va, vb) for g in grad]
            )
            # restrict the step to the plane normal to the tangent
            j = rows.T @ (np.eye(3) - np.outer(tangent, tangent))
            dx, *_ = np.linalg.lstsq(j, -r, rcond=None)
            x = x + dx
        return x, False

    def bary_min(x):
        return float(_bary_in_tet(x, p[0], inv).min())

    return correct, bary_min


def _plausible_pairs(mesh, tet_id, fps):
    """Pairs of one tet's face points joined by a curve arc inside it.

    A pair passes when its chord midpoint corrects back onto the
    degenerate curve without leaving the tet or the chord's normal
    plane. Returns (chord length, i, k) triples.
    """
    correct, bary_min = _tet_curve_tools(mesh, tet_id, fps[0].linearity)
    out = []
    for i in range(len(fps)):
        for k in range(i + 1, len(fps)):
            a, b = fps[i].position, fps[k].position
            norm = float(np.linalg.norm(b - a))
            if norm < 1e-14:
                out.append((norm, i, k))
                continue
            x, ok = correct(0.5 * (a + b), (b - a) / norm)
            if (
                ok
                and bary_min(x) >= -1e-6
                and float(np.linalg.norm(x - 0.5 * (a + b))) <= 0.5 * norm
            ):
                out.append((norm, i, k))
    return out


def _select_matching(n_points, cands):
    """Largest matching from candidate pairs, shortest total on ties.

    Exhaustive search with memoization on the set of unmatched points;
    candidate lists stay small because a face keeps at most a dozen
    points and most tets see two.
    """
    by_point = {}
    for ln, i, k in cands:
        by_point.setdefault(i, []).append((ln, i, k))
    memo = {}

    def rec(avail):
        if len(avail) < 2:
            return (0, 0.0, ())
        if avail in memo:
            return memo[avail]
        first = min(avail)
        rest = avail - {first}
        skip = rec(rest)
        best = (skip[0], skip[1], skip[2])
        for ln, i, k in by_point.get(first, ()):
            if k not in rest:
                continue
            sub = rec(rest - {k})
            cand = (sub[0] + 1, sub[1] + ln, ((i, k),) + sub[2])
            if cand[0] > best[0] or (
                cand[0] == best[0] and cand[1] < best[1]
            ):
                best = cand
        memo[avail] = best
        return best

    return rec(frozenset(range(n_points)))[2]


def _refine_segment(mesh, tet_id, linearity, a, b, step):
    """Interior curve samples between two paired face points."""
    correct, bary_min = _tet_curve_tools(mesh, tet_id, linearity)
    chord = b - a
    norm = float(np.linalg.norm(chord))
    n = int(np.ceil(norm / step))
    path = []
    if n >= 2 and norm > 1e-14:
        d = chord / norm
        for k in range(1, n):
            x, ok = correct(a + (k / n) * chord, d)
            if ok and bary_min(x) >= -1e-6:
                path.append(x)
    return path


_PERTURB_EPS = 1e-7


def _perturbed_tensors(mesh: TensorMesh) -> np.ndarray:
    """Deterministic symmetry-breaking perturbation of the vertex tensors.

    Sampled fields are often aligned with the grid (a symmetry plane of
    the field landing on a mesh plane), which puts degenerate sets inside
    faces instead of transversal to them. A relative perturbation restores
    general position; it moves the extracted set by far less than the
    geometric tolerances while staying far above round-off. Per-vertex
    seeding keeps the result independent of tet order.
    """
    rng = np.random.default_rng(1905)
    raw = rng.uniform(-1.0, 1.0, size=mesh.tensors.shape)
    scale = fro_norm(mesh.tensors)
    floor = 1e-3 * max(float(scale.max(initial=0.0)), 1e-30)
    return mesh.tensors + _PERTURB_EPS * np.maximum(scale, floor)[:, None] * raw


def _cluster_points(raw, radius):
    """Merge equal points found on different faces of the same cell.

    ``raw`` is a list of (position, face_index). Points within ``radius``
    of a cluster representative join that cluster; representatives are
    chosen in lexicographic position order so the result does not depend
    on face enumeration order. Returns (positions, face-id sets).
    """
    if not raw:
        return [], []
    pos = np.asarray([p for p, _ in raw])
    order = np.lexsort((pos[:, 2], pos[:, 1], pos[:, 0]))
    grid = {}
    reps, rep_faces = [], []
    inv = 1.0 / max(radius, 1e-300)
    for ri in order:
        p, fi = pos[ri], raw[ri][1]
        key = tuple(np.floor(p * inv).astype(np.int64))
        best = None
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for dz in (-1, 0, 1):
                    for ci in grid.get((key[0] + dx, key[1] + dy, key[2] + dz), ()):
                        d = float(np.linalg.norm(reps[ci] - p))
                        if d <= radius and (best is None or d < best[0]):
                            best = (d, ci)
        if best is None:
            ci = len(reps)
            reps.append(p)
            rep_faces.append({fi})
            grid.setdefault(key, []).append(ci)
        else:
            rep_faces[best[1]].add(fi)
    return reps, rep_faces


def trace_degenerate_curves(mesh: TensorMesh, config: ExtractConfig | None = None):
    """Extract all degenerate curves of both linearity types.

    Face points are found per unique face, merged across faces, paired
    within each tet, and stitched across shared faces into maximal
    chains. Chains whose ends meet are closed (the first sample repeats
    at the end); endpoints that lost their partner are classed
    Unresolved up front.
    """
    cfg = config or ExtractConfig()
    cell = mesh.cell_size()
    dedupe = 1e-4 * cell
    step = cfg.step_factor * cell

    ptensors = _perturbed_tensors(mesh)
    pmesh = TensorMesh(mesh.vertices, ptensors, mesh.tets)
    vertex_vals = eigenvalues(ptensors)
    vertex_dists = None
    uniq, start, counts, owner_tet = _unique_faces(mesh)
    curves = []

    for linearity in (Linearity.LINEAR, Linearity.PLANAR):
        gap_v = _pair_gap(vertex_vals, linearity)
        corner_gaps = np.stack([gap_v[uniq[:, k]] for k in range(3)], axis=1)
        gmin = corner_gaps.min(axis=1)
        if vertex_dists is None:
            t = ptensors
            d01 = fro_norm(t[uniq[:, 0]] - t[uniq[:, 1]])
            d02 = fro_norm(t[uniq[:, 0]] - t[uniq[:, 2]])
            d12 = fro_norm(t[uniq[:, 1]] - t[uniq[:, 2]])
            vertex_dists = np.maximum(np.maximum(d01, d02), d12)
        cand = np.nonzero(gmin <= 2.0 * vertex_dists)[0]

        unresolved_faces = set()
        raw_points = []
        if len(cand):
            corner_t6 = ptensors[uniq[cand]]
            corner_pos = mesh.vertices[uniq[cand]]
            corner_mode = mode(corner_t6.reshape(-1, 6)).reshape(-1, 3)
            scale = np.maximum(
                fro_norm(corner_t6).max(axis=1), 1e-30
            )
            flat = corner_gaps[cand].max(axis=1) <= 1e-9 * scale
            ok = ~(np.isnan(corner_mode).any(axis=1) | flat)
            unresolved_faces.update(int(cand[i]) for i in np.nonzero(~ok)[0])

            sub = np.nonzero(ok)[0]
            leaf_face, seeds, _ = _subdivision_seeds(
                corner_t6[sub],
                linearity,
                cfg.depth,
                corner_gaps=corner_gaps[cand][sub],
                corner_diam=vertex_dists[cand][sub],
            )
            if len(leaf_face):
                uv = seeds[:, 1:]
                # one kernel call for every seed; the in-face (u, v)
                # order makes the downstream dedupe deterministic
                order = np.lexsort((uv[:, 1], uv[:, 0], leaf_face))
                leaf_face = leaf_face[order]
                uv = uv[order]
                bary, code = _polish_batch(
                    corner_t6[sub], leaf_face, uv, linearity, cfg.mode_tol
                )
                lo = 0
                while lo < len(leaf_face):
                    hi = lo
                    while hi < len(leaf_face) and leaf_face[hi] == leaf_face[lo]:
                        hi += 1
                    si = int(leaf_face[lo])
                    fi = int(cand[sub[si]])
                    pts, bad = _collect_face_points(
                        corner_pos[sub[si]], bary[lo:hi], code[lo:hi], dedupe
                    )
                    if bad:
                        unresolved_faces.add(fi)
                    for pos, _ in pts:
                        raw_points.append((np.asarray(pos), fi))
                    lo = hi

        if not raw_points:
            continue

        # same physical point found on several faces collapses to one id
        fp_pos, fp_faces = _cluster_points(raw_points, dedupe)

        # group face points per tet (union over every face that saw them)
        tet_fps = {}
        for cid, fis in enumerate(fp_faces):
            tids = set()
            for fi in fis:
                for j in range(counts[fi]):
                    tids.add(int(owner_tet[start[fi] + j]))
            for tid in sorted(tids):
                tet_fps.setdefault(tid, []).append(cid)

        # pair points inside each tet; process unambiguous two-point
        # tets first so crowded tets see which points are already taken
        segments = []  # (fp_a, fp_b, interior samples, tet_id)
        dead_ends = set()
        degree = {}
        taken = set()
        for tid in sorted(tet_fps, key=lambda t: (len(tet_fps[t]), t)):
            ids = sorted(tet_fps[tid])
            if len(ids) == 1:
                dead_ends.add(ids[0])
                continue
            fps = [
                FacePoint(fp_pos[i], None, None, linearity) for i in ids
            ]
            cands = [
                (ln, i, k)
                for ln, i, k in _plausible_pairs(pmesh, tid, fps)
                if degree.get(ids[i], 0) < 2
                and degree.get(ids[k], 0) < 2
                and (ids[i], ids[k]) not in taken
            ]
            matched = set()
            for i, k in _select_matching(len(ids), cands):
                path = _refine_segment(
                    pmesh, tid, linearity, fp_pos[ids[i]], fp_pos[ids[k]], step
                )
                segments.append((ids[i], ids[k], path, tid))
                degree[ids[i]] = degree.get(ids[i], 0) + 1
                degree[ids[k]] = degree.get(ids[k], 0) + 1
                taken.add((ids[i], ids[k]))
                matched.update((i, k))
            for i in range(len(ids)):
                if i not in matched:
                    dead_ends.add(ids[i])

        # endpoints on boundary or unresolved faces end their chain there
        adj = {}
        for si, (a, b, _, _) in enumerate(segments):
            adj.setdefault(a, []).append(si)
            adj.setdefault(b, []).append(si)

        def face_open(fp_id):
            return any(
                counts[fi] == 1 or fi in unresolved_faces
                for fi in fp_faces[fp_id]
            )

        used = [False] * len(segments)

        def walk(start_fp, first_seg):
            chain = [start_fp]
            seg_list = []
            node, seg = start_fp, first_seg
            while True:
                used[seg] = True
                a, b, _, _ = segments[seg]
                nxt = b if node == a else a
                seg_list.append((seg, node))
                chain.append(nxt)
                node = nxt
                options = [s for s in adj.get(nxt, []) if not used[s]]
                if not options:
                    return chain, seg_list
                seg = options[0]

        chains = []
        open_starts = sorted(
            fp
            for fp in adj
            if len(adj[fp]) == 1
        )
        for fp in open_starts:
            remaining = [s for s in adj[fp] if not used[s]]
            if remaining:
                chains.append(walk(fp, remaining[0]))
        for si in range(len(segments)):
            if not used[si]:
                a = segments[si][0]
                chains.append(walk(a, si))

        for chain, seg_list in chains:
            samples, tids = [], []
            for seg, entry in seg_list:
                a, b, path, tid = segments[seg]
                pts = [fp_pos[entry]] + (
                    path if entry == a else path[::-1]
                )
                samples.extend(pts)
                tids.extend([tid] * len(pts))
            samples.append(fp_pos[chain[-1]])
            tids.append(segments[seg_list[-1][0]][3])
            samples = np.asarray(samples)
            closed = chain[0] == chain[-1]
            curve = DegenerateCurve(
                samples=samples,
                linearity=linearity,
                closed=closed,
                tet_ids=tids,
            )
            if not closed:
                if chain[0] in dead_ends or not face_open(chain[0]):
                    curve.classes[0] = PointClass.UNRESOLVED
                if chain[-1] in dead_ends or not face_open(chain[-1]):
                    curve.classes[-1] = PointClass.UNRESOLVED
            if cfg.min_curve_length and curve.length() < cfg.min_curve_length:
                continue
            curves.append(curve)
    return curves


def _sample_tangent(curve: DegenerateCurve, index: int) -> np.ndarray:
    pts = curve.samples
    n = len(pts)
    if curve.closed and n > 2:
        prev = pts[index - 1 if index > 0 else n - 2]
        nxt = pts[index + 1 if index < n - 1 else 1]
    else:
        prev = pts[max(index - 1, 0)]
        nxt = pts[min(index + 1, n - 1)]
    t = nxt - prev
    norm = np.linalg.norm(t)
    if norm == 0:
        raise ValueError("zero-length tangent at curve sample")
    return t / norm


_WINDING_CLASS = {
    (Linearity.LINEAR, "+i"): PointClass.WEDGE,
    (Linearity.LINEAR, "-i"): PointClass.TRISECTOR,
    (Linearity.PLANAR, "+k"): PointClass.WEDGE,
    (Linearity.PLANAR, "-k"): PointClass.TRISECTOR,
}


def _classify_at(field, pos, tangent, linearity, radius):
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            w = point_index(field, pos, tangent, radius)
    except (WindingError, ValueError):
        return PointClass.UNRESOLVED
    return _WINDING_CLASS.get((linearity, w.value), PointClass.UNRESOLVED)


def classify_point(
    mesh: TensorMesh,
    curve: DegenerateCurve,
    sample_index: int,
    radius: float | None = None,
    field: PLField | None = None,
) -> PointClass:
    """Wedge/trisector label from the winding of a transversal circle."""
    if curve.classes[sample_index] == PointClass.UNRESOLVED:
        return PointClass.UNRESOLVED
    field = field or PLField(mesh)
    radius = radius if radius is not None else mesh.cell_size()
    tangent = _sample_tangent(curve, sample_index)
    return _classify_at(
        field, curve.samples[sample_index], tangent, curve.linearity, radius
    )


def classify_curve(
    mesh: TensorMesh,
    curve: DegenerateCurve,
    radius: float | None = None,
    field: PLField | None = None,
) -> DegenerateCurve:
    """Fill every unclassified sample label in place."""
    field = field or PLField(mesh)
    radius = radius if radius is not None else mesh.cell_size()
    for i in range(curve.n_samples):
        if curve.classes[i] is None:
            curve.classes[i] = classify_point(
                mesh, curve, i, radius=radius, field=field
            )
    return curve


def find_transition_points(
    mesh: TensorMesh,
    curve: DegenerateCurve,
    radius: float | None = None,
    field: PLField | None = None,
    point_tol: float | None = None,
):
    """Arc-length positions where the label flips between wedge and trisector.

    Each adjacent (Wedge, Trisector) sample pair is refined by bisection
    on the classifier; the nearest sample is relabeled Transition.
    """
    if any(c is None for c in curve.classes):
        raise ValueError("classify the curve before locating transitions")
    field = field or PLField(mesh)
    radius = radius if radius is not None else mesh.cell_size()
    if point_tol is None:
        point_tol = ExtractConfig().resolved_point_tol(mesh)
    arcs = curve.arc_positions()
    flips = {PointClass.WEDGE, PointClass.TRISECTOR}
    positions = []
    for i in range(curve.n_samples - 1):
        ca, cb = curve.classes[i], curve.classes[i + 1]
        if {ca, cb} != flips:
            continue
        pa, pb = curve.samples[i], curve.samples[i + 1]
        seg = pb - pa
        seg_len = float(np.linalg.norm(seg))
        tangent = seg / seg_len
        lo, hi = 0.0, 1.0
        while (hi - lo) * seg_len > point_tol:
            mid = 0.5 * (lo + hi)
            cm = _classify_at(
                field, pa + mid * seg, tangent, curve.linearity, radius
            )
            if cm == ca:
                lo = mid
            elif cm == cb:
                hi = mid
            else:
                break
        t_mid = 0.5 * (lo + hi)
        positions.append(float(arcs[i] + t_mid * seg_len))
        nearest = i if t_mid < 0.5 else i + 1
        curve.classes[nearest] = PointClass.TRANSITION
    return sorted(positions)


def subdivide_mesh(mesh: TensorMesh, times: int = 1) -> TensorMesh:
    """1:8 uniform refinement; midpoint tensors are edge averages."""
    out = mesh
    for _ in range(times):
        v, t6, tets = out.vertices, out.tensors, out.tets
        edge_ids = {}
        new_v, new_t = [], []

        def midpoint(a, b):
            key = (a, b) if a < b else (b, a)
            mid = edge_ids.get(key)
            if mid is None:
                mid = len(v) + len(new_v)
                edge_ids[key] = mid
                new_v.append(0.5 * (v[key[0]] + v[key[1]]))
                new_t.append(0.5 * (t6[key[0]] + t6[key[1]]))
            return mid

        new_tets = []
        for tet in tets:
            a, b, c, d = (int(x) for x in tet)
            m = {
                (0, 1): midpoint(a, b), (0, 2): midpoint(a, c),
                (0, 3): midpoint(a, d), (1, 2): midpoint(b, c),
                (1, 3): midpoint(b, d), (2, 3): midpoint(c, d),
            }
            new_tets.extend(
                [
                    (a, m[(0, 1)], m[(0, 2)], m[(0, 3)]),
                    (b, m[(0, 1)], m[(1, 2)], m[(1, 3)]),
                    (c, m[(0, 2)], m[(1, 2)], m[(2, 3)]),
                    (d, m[(0, 3)], m[(1, 3)], m[(2, 3)]),
                    (m[(0, 1)], m[(2, 3)], m[(0, 2)], m[(0, 3)]),
                    (m[(0, 1)], m[(2, 3)], m[(0, 3)], m[(1, 3)]),
                    (m[(0, 1)], m[(2, 3)], m[(1, 3)], m[(1, 2)]),
                    (m[(0, 1)], m[(2, 3)], m[(1, 2)], m[(0, 2)]),
                ]
            )
        vertices = np.vstack([v, np.asarray(new_v)]) if new_v else v.copy()
        tensors = np.vstack([t6, np.asarray(new_t)]) if new_t else t6.copy()
        tets = np.asarray(new_tets, dtype=np.int64)
        # restore positive orientation where the fixed diagonal flipped it
        p = vertices[tets]
        vol = np.einsum(
            "ij,ij->i",
            np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]),
            p[:, 3] - p[:, 0],
        )
        swap = vol < 0
        tets[swap, 2], tets[swap, 3] = (
            tets[swap, 3].copy(),
            tets[swap, 2].copy(),
        )
        out = TensorMesh(vertices, tensors, tets)
    return out


_TET_EDGES = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def extract_neutral_surface(
    mesh: TensorMesh, config: ExtractConfig | None = None
) -> NeutralSurface:
    """Marching tetrahedra on the sign of mode.

    Vertices with |mode| below mode_tol are perturbed to
    sign(mode)*mode_tol with ties broken toward +, so every vertex has a
    definite sign and the output is independent of tet order. Each
    global edge with a sign change gets one bisected crossing, shared by
    all incident tets, which makes the sheets watertight.
    """
    cfg = config or ExtractConfig()
    if cfg.subdiv:
        mesh = subdivide_mesh(mesh, cfg.subdiv)
    mu = mode(mesh.tensors)
    mu = np.where(np.isnan(mu), cfg.mode_tol, mu)
    sign = np.where(mu >= 0.0, 1, -1)

    tets = mesh.tets
    edges = np.concatenate([tets[:, list(e)] for e in _TET_EDGES], axis=0)
    edges = np.sort(edges, axis=1)
    edges = np.unique(edges, axis=0)
    crossing = sign[edges[:, 0]] != sign[edges[:, 1]]
    edges = edges[crossing]

    if len(edges) == 0:
        return NeutralSurface(
            positions=np.zeros((0, 3)),
            triangles=np.zeros((0, 3), dtype=np.int64),
            sheet_ids=np.zeros(0, dtype=np.int64),
            sheet_closed=[],
            crossing_edges=np.zeros((0, 2), dtype=np.int64),
            tri_tets=np.zeros(0, dtype=np.int64),
        )

    ta = mesh.tensors[edges[:, 0]]
    tb = mesh.tensors[edges[:, 1]]
    sa = sign[edges[:, 0]].astype(np.float64)
    lo = np.zeros(len(edges))
    hi = np.ones(len(edges))
    t = np.full(len(edges), 0.5)
    done = np.zeros(len(edges), dtype=bool)
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        t = np.where(done, t, mid)
        mm = mode((1.0 - mid)[:, None] * ta + mid[:, None] * tb)
        mm = np.where(np.isnan(mm), cfg.mode_tol, mm)
        newly = (np.abs(mm) <= cfg.mode_tol) & ~done
        t = np.where(newly, mid, t)
        done |= newly
        same = (np.where(mm >= 0.0, 1.0, -1.0) == sa) & ~done
        lo = np.where(same, mid, lo)
        hi = np.where(~same & ~done, mid, hi)
        if done.all():
            break
    positions = (1.0 - t)[:, None] * mesh.vertices[edges[:, 0]] + t[
        :, None
    ] * mesh.vertices[edges[:, 1]]

    edge_index = {
        (int(a), int(b)): i for i, (a, b) in enumerate(edges)
    }

    def crossing_id(u, vtx):
        return edge_index[(u, vtx) if u < vtx else (vtx, u)]

    triangles = []
    tri_tets = []
    for tid, tet in enumerate(tets):
        ids = [int(x) for x in tet]
        s = [sign[i] for i in ids]
        neg = [k for k in range(4) if s[k] < 0]
        if len(neg) in (0, 4):
            continue
        tri_tets.extend([tid] * (1 if len(neg) in (1, 3) else 2))
        if len(neg) in (1, 3):
            lone = neg[0] if len(neg) == 1 else [
                k for k in range(4) if s[k] > 0
            ][0]
            others = [k for k in range(4) if k != lone]
            tri = [crossing_id(ids[lone], ids[k]) for k in others]
            # orient the triangle normal toward the positive side
            n = np.cross(
                positions[tri[1]] - positions[tri[0]],
                positions[tri[2]] - positions[tri[0]],
            )
            toward_lone = mesh.vertices[ids[lone]] - positions[tri].mean(axis=0)
            outward = np.dot(n, toward_lone) * s[lone]
            if outward < 0:
                tri[1], tri[2] = tri[2], tri[1]
            triangles.append(tri)
        else:
            pos_c = [k for k in range(4) if s[k] > 0]
            neg_c = neg
            quad = [
                crossing_id(ids[pos_c[0]], ids[neg_c[0]]),
                crossing_id(ids[pos_c[0]], ids[neg_c[1]]),
                crossing_id(ids[pos_c[1]], ids[neg_c[1]]),
                crossing_id(ids[pos_c[1]], ids[neg_c[0]]),
            ]
            if min(quad[0], quad[2]) < min(quad[1], quad[3]):
                tris = [
                    [quad[0], quad[1], quad[2]],
                    [quad[0], quad[2], quad[3]],
                ]
            else:
                tris = [
                    [quad[1], quad[2], quad[3]],
                    [quad[1], quad[3], quad[0]],
                ]
            probe = (
                mesh.vertices[[ids[k] for k in pos_c]].mean(axis=0)
                - positions[quad].mean(axis=0)
            )
            for tri in tris:
                n = np.cross(
                    positions[tri[1]] - positions[tri[0]],
                    positions[tri[2]] - positions[tri[0]],
                )
                if np.dot(n, probe) < 0:
                    tri[1], tri[2] = tri[2], tri[1]
                triangles.append(tri)

    triangles = np.asarray(triangles, dtype=np.int64)

    # union-find over shared triangle edges
    parent = list(range(len(triangles)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edge_owner = {}
    for ti, tri in enumerate(triangles):
        for k in range(3):
            a, b = int(tri[k]), int(tri[(k + 1) % 3])
            key = (a, b) if a < b else (b, a)
            if key in edge_owner:
                ra, rb = find(edge_owner[key]), find(ti)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
            else:
                edge_owner[key] = ti

    roots = [find(i) for i in range(len(triangles))]
    order = {}
    sheet_ids = np.empty(len(triangles), dtype=np.int64)
    for i, r in enumerate(roots):
        if r not in order:
            order[r] = len(order)
        sheet_ids[i] = order[r]

    edge_count = {}
    for ti, tri in enumerate(triangles):
        sid = int(sheet_ids[ti])
        for k in range(3):
            a, b = int(tri[k]), int(tri[(k + 1) % 3])
            key = (sid, (a, b) if a < b else (b, a))
            edge_count[key] = edge_count.get(key, 0) + 1
    sheet_closed = [True] * len(order)
    for (sid, _), cnt in edge_count.items():
        if cnt != 2:
            sheet_closed[sid] = False

    return NeutralSurface(
        positions=positions,
        triangles=triangles,
        sheet_ids=sheet_ids,
        sheet_closed=sheet_closed,
        crossing_edges=edges,
        tri_tets=np.asarray(tri_tets, dtype=np.int64),
    )
