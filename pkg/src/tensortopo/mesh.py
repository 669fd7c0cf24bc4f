"""Tetrahedral meshes carrying per-vertex tensors.

File format (text, one record per line):

    TFT 1
    vertices <n>
    <x> <y> <z> <xx> <yy> <zz> <xy> <yz> <xz>   (n lines)
    tets <m>
    <i0> <i1> <i2> <i3>                          (m lines, zero-based)

Reals are written with 17 significant digits so a write/read round trip
reproduces every float64 bit-exactly.  Tets with negative signed volume
are reoriented on load; zero-volume tets are rejected with their line
number since they admit no orientation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _accel

__all__ = [
    "TFTError",
    "TensorMesh",
    "read_tft",
    "write_tft",
    "generate_box",
    "generate_torus",
    "generate_mesh",
    "sample_field_onto_mesh",
    "interpolate",
    "PLField",
]


class TFTError(ValueError):
    """Malformed mesh file; message carries the offending line number."""


def _signed_volumes(vertices, tets):
    a = vertices[tets[:, 1]] - vertices[tets[:, 0]]
    b = vertices[tets[:, 2]] - vertices[tets[:, 0]]
    c = vertices[tets[:, 3]] - vertices[tets[:, 0]]
    return np.einsum("ij,ij->i", np.cross(a, b), c) / 6.0


_FACE_CORNERS = ((1, 2, 3), (0, 3, 2), (0, 1, 3), (0, 2, 1))


@dataclass
class TensorMesh:
    """Vertices, per-vertex tensors, and positively oriented tets."""

    vertices: np.ndarray
    tensors: np.ndarray
    tets: np.ndarray
    _face_map: dict | None = field(default=None, repr=False, compare=False)
    _cell_size: float | None = field(default=None, repr=False, compare=False)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_tets(self) -> int:
        return len(self.tets)

    def signed_volumes(self) -> np.ndarray:
        return _signed_volumes(self.vertices, self.tets)

    def bbox(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def cell_size(self) -> float:
        """Longest edge over all tets; the mesh's resolution scale."""
        if self._cell_size is None:
            edges = self.edge_lengths()
            self._cell_size = float(edges.max()) if len(edges) else 0.0
        return self._cell_size

    def edge_lengths(self) -> np.ndarray:
        v, t = self.vertices, self.tets
        pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
        return np.concatenate(
            [np.linalg.norm(v[t[:, i]] - v[t[:, j]], axis=1) for i, j in pairs]
        )

    def face_map(self) -> dict:
        """Sorted face triple -> list of (tet_id, local_face) incidences."""
        if self._face_map is None:
            fm: dict = {}
            for ti, tet in enumerate(self.tets):
                for fi, (a, b, c) in enumerate(_FACE_CORNERS):
                    key = tuple(sorted((int(tet[a]), int(tet[b]), int(tet[c]))))
                    fm.setdefault(key, []).append((ti, fi))
            self._face_map = fm
        return self._face_map

    def boundary_faces(self) -> list:
        return [k for k, v in self.face_map().items() if len(v) == 1]

    def validate(self) -> None:
        n = self.n_vertices
        if len(self.tensors) != n:
            raise ValueError("tensors length does not match vertices")
        if self.n_tets and (self.tets.min() < 0 or self.tets.max() >= n):
            raise ValueError("tet index out of range")
        vols = self.signed_volumes()
        if np.any(vols <= 0.0):
            raise ValueError("tet with nonpositive volume")
        for key, inc in self.face_map().items():
            if len(inc) > 2:
                raise ValueError(f"face {key} shared by {len(inc)} tets")


def _fix_orientation(vertices, tets, context_lines=None):
    """Reorient negative tets in place; reject degenerate (flat) ones."""
    if not len(tets):
        return tets
    vols = _signed_volumes(vertices, tets)
    longest = np.zeros(len(tets))
    for i, j in ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)):
        d = np.linalg.norm(vertices[tets[:, i]] - vertices[tets[:, j]], axis=1)
        longest = np.maximum(longest, d)
    flat = np.nonzero(np.abs(vols) <= 1e-14 * longest**3)[0]
    if len(flat):
        i = int(flat[0])
        where = f"line {context_lines[i]}: " if context_lines is not None else ""
        raise TFTError(f"{where}tet {i} has zero volume")
    flip = vols < 0.0
    tets[flip, 2], tets[flip, 3] = tets[flip, 3].copy(), tets[flip, 2].copy()
    return tets


def read_tft(path) -> TensorMesh:
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()

    def fail(lineno, msg):
        raise TFTError(f"line {lineno}: {msg}")

    if not lines or lines[0].split() != ["TFT", "1"]:
        fail(1, "expected header 'TFT 1'")

    def read_count(idx, word):
        if idx >= len(lines):
            fail(len(lines) + 1, f"missing '{word} <count>' line")
        parts = lines[idx].split()
        if len(parts) != 2 or parts[0] != word:
            fail(idx + 1, f"expected '{word} <count>'")
        try:
            count = int(parts[1])
        except ValueError:
            fail(idx + 1, f"invalid {word} count {parts[1]!r}")
        if count < 0:
            fail(idx + 1, f"negative {word} count")
        return count

    nv = read_count(1, "vertices")
    if len(lines) < 2 + nv:
        fail(len(lines) + 1, "unexpected end of file in vertex block")
    verts = np.empty((nv, 3))
    tens = np.empty((nv, 6))
    for i in range(nv):
        lineno = 3 + i
        parts = lines[2 + i].split()
        if len(parts) != 9:
            fail(lineno, f"expected 9 numbers, got {len(parts)}")
        try:
            row = [float(p) for p in parts]
        except ValueError:
            fail(lineno, "invalid real literal")
        if not all(np.isfinite(row)):
            fail(lineno, "non-finite value")
        verts[i] = row[:3]
        tens[i] = row[3:]

    nt_idx = 2 + nv
    nt = read_count(nt_idx, "tets")
    if len(lines) < nt_idx + 1 + nt:
        fail(len(lines) + 1, "unexpected end of file in tet block")
    extra = nt_idx + 1 + nt
    if extra < len(lines) and any(s.strip() for s in lines[extra:]):
        fail(extra + 1, "trailing content after tet block")

    tets = np.empty((nt, 4), dtype=np.int64)
    tet_lines = []
    for i in range(nt):
        lineno = nt_idx + 2 + i
        parts = lines[nt_idx + 1 + i].split()
        if len(parts) != 4:
            fail(lineno, f"expected 4 indices, got {len(parts)}")
        try:
            idx = [int(p) for p in parts]
        except ValueError:
            fail(lineno, "invalid index literal")
        for j in idx:
            if j < 0 or j >= nv:
                fail(lineno, f"vertex index {j} out of range [0, {nv})")
        if len(set(idx)) != 4:
            fail(lineno, "repeated vertex index in tet")
        tets[i] = idx
        tet_lines.append(lineno)

    tets = _fix_orientation(verts, tets, tet_lines)
    return TensorMesh(verts, tens, tets)


def write_tft(mesh: TensorMesh, path) -> None:
    rows = ["TFT 1", f"vertices {mesh.n_vertices}"]
    for v, t in zip(mesh.vertices, mesh.tensors):
        rows.append(" ".join(f"{x:.17g}" for x in (*v, *t)))
    rows.append(f"tets {mesh.n_tets}")
    for tet in mesh.tets:
        rows.append(" ".join(str(int(i)) for i in tet))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(rows) + "\n")


# Kuhn split of the unit cube: 6 tets around the (0,0,0)-(1,1,1) diagonal.
# Local corner ids use bit order (i, j, k) -> i + 2j + 4k.  Every face
# diagonal this induces depends only on the local axis directions, so
# translated copies (including periodic wraps) always conform.
_KUHN = (
    (0, 1, 3, 7),
    (0, 3, 2, 7),
    (0, 2, 6, 7),
    (0, 6, 4, 7),
    (0, 4, 5, 7),
    (0, 5, 1, 7),
)


def _split_cells(corner_ids):
    """corner_ids: (..., 8) global ids per hex cell -> (n*6, 4) tets."""
    cells = corner_ids.reshape(-1, 8)
    out = np.empty((len(cells) * 6, 4), dtype=np.int64)
    for s, tet in enumerate(_KUHN):
        out[s::6] = cells[:, tet]
    return out


def generate_box(bmin, bmax, resolution: int) -> TensorMesh:
    bmin = np.asarray(bmin, dtype=np.float64)
    bmax = np.asarray(bmax, dtype=np.float64)
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    if np.any(bmax <= bmin):
        raise ValueError("box must have positive extent")
    n = int(resolution)
    axes = [np.linspace(bmin[d], bmax[d], n + 1) for d in range(3)]
    gx, gy, gz = np.meshgrid(*axes, indexing="ij")
    verts = np.column_stack([gx.ravel(), gy.ravel(), gz.ravel()])

    vid = np.arange((n + 1) ** 3).reshape(n + 1, n + 1, n + 1)
    i, j, k = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
    corners = np.stack(
        [vid[i + (b & 1), j + ((b >> 1) & 1), k + (b >> 2)] for b in range(8)],
        axis=-1,
    )
    tets = _split_cells(corners)
    tets = _fix_orientation(verts, tets)
    return TensorMesh(verts, np.zeros((len(verts), 6)), tets)


def generate_torus(big_radius: float, small_radius: float, resolution: int) -> TensorMesh:
    """Solid torus about the z-axis, meshed as a structured shell.

    Grid: 2*resolution longitude slices x 2*resolution meridian sectors x
    max(1, resolution // 6) radial layers around the core circle.  The
    innermost layer's hexes collapse onto the core, so their zero-volume
    split tets are dropped.
    """
    R, r = float(big_radius), float(small_radius)
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    if R <= 0 or r <= 0 or r >= R:
        raise ValueError("need 0 < small_radius < big_radius")
    nl = 2 * int(resolution)
    nm = 2 * int(resolution)
    nr = max(1, int(resolution) // 6)

    # vertex ids: radial layer 0 is the single core vertex per longitude
    phi = 2.0 * np.pi * np.arange(nl) / nl
    theta = 2.0 * np.pi * np.arange(nm) / nm
    core = np.column_stack([R * np.cos(phi), R * np.sin(phi), np.zeros(nl)])

    shell_ids = np.empty((nl, nm, nr + 1), dtype=np.int64)
    shell_ids[:, :, 0] = np.arange(nl)[:, None]
    nxt = nl
    ring = np.arange(nl * nm * nr).reshape(nl, nm, nr)
    shell_ids[:, :, 1:] = nxt + ring

    rad = r * np.arange(1, nr + 1) / nr
    cp, sp = np.cos(phi), np.sin(phi)
    ct, st = np.cos(theta), np.sin(theta)
    rho = R + rad[None, None, :] * ct[None, :, None]
    xs = rho * cp[:, None, None]
    ys = rho * sp[:, None, None]
    zs = np.broadcast_to(rad[None, None, :] * st[None, :, None], xs.shape)
    shell = np.stack([xs, ys, zs], axis=-1).reshape(-1, 3)
    verts = np.vstack([core, shell])

    il = np.arange(nl)
    im = np.arange(nm)
    ir = np.arange(nr)
    li, mi, ri = np.meshgrid(il, im, ir, indexing="ij")
    lj = (li + 1) % nl
    mj = (mi + 1) % nm
    corners = np.stack(
        [
            shell_ids[li, mi, ri],
            shell_ids[lj, mi, ri],
            shell_ids[li, mj, ri],
            shell_ids[lj, mj, ri],
            shell_ids[li, mi, ri + 1],
            shell_ids[lj, mi, ri + 1],
            shell_ids[li, mj, ri + 1],
            shell_ids[lj, mj, ri + 1],
        ],
        axis=-1,
    )
    tets = _split_cells(corners)
    srt = np.sort(tets, axis=1)
    distinct = np.all(np.diff(srt, axis=1) != 0, axis=1)
    tets = tets[distinct]
    tets = _fix_orientation(verts, tets)
    return TensorMesh(verts, np.zeros((len(verts), 6)), tets)


def generate_mesh(domain: str, resolution: int, **kw) -> TensorMesh:
    if domain == "box":
        return generate_box(kw.get("min", (-1, -1, -1)), kw.get("max", (1, 1, 1)), resolution)
    if domain == "torus":
        return generate_torus(kw.get("R", 3.0), kw.get("r", 1.0), resolution)
    raise ValueError(f"unknown domain {domain!r}")


def sample_field_onto_mesh(geometry: TensorMesh, field_obj) -> TensorMesh:
    tensors = field_obj.sample(geometry.vertices)
    return TensorMesh(geometry.vertices, np.asarray(tensors, dtype=np.float64), geometry.tets)


def interpolate(mesh: TensorMesh, tet_id: int, weights) -> np.ndarray:
    if not 0 <= tet_id < mesh.n_tets:
        raise ValueError(f"invalid tet id {tet_id}")
    w = np.asarray(weights, dtype=np.float64)
    return w @ mesh.tensors[mesh.tets[tet_id]]


class PLField:
    """Piecewise-linear tensor evaluator with grid-accelerated lookup."""

    def __init__(self, mesh: TensorMesh, bins_per_axis: int | None = None):
        self.mesh = mesh
        v, t = mesh.vertices, mesh.tets
        self.v0 = v[t[:, 0]]
        edges = np.stack([v[t[:, k]] - self.v0 for k in (1, 2, 3)], axis=-1)
        self.inv = np.linalg.inv(edges)

        lo, hi = mesh.bbox()
        span = np.maximum(hi - lo, 1e-30)
        if bins_per_axis is None:
            bins_per_axis = max(1, int(np.ceil(len(t) ** (1.0 / 3.0))))
        self.dims = np.full(3, bins_per_axis, dtype=np.int64)
        self.origin = lo
        self.scale = self.dims / span

        tet_min = np.minimum.reduce([v[t[:, k]] for k in range(4)])
        tet_max = np.maximum.reduce([v[t[:, k]] for k in range(4)])
        cmin = np.clip(((tet_min - lo) * self.scale).astype(np.int64), 0, self.dims - 1)
        cmax = np.clip(((tet_max - lo) * self.scale).astype(np.int64), 0, self.dims - 1)
        span = cmax - cmin + 1
        per_tet = span.prod(axis=1)
        tet_of = np.repeat(np.arange(len(t)), per_tet)
        start = np.concatenate([[0], np.cumsum(per_tet)[:-1]])
        off = np.arange(int(per_tet.sum())) - start[tet_of]
        syz = span[tet_of, 1] * span[tet_of, 2]
        dx = off // syz
        rem = off % syz
        dy = rem // span[tet_of, 2]
        dz = rem % span[tet_of, 2]
        cells = (
            (cmin[tet_of, 0] + dx) * self.dims[1] + cmin[tet_of, 1] + dy
        ) * self.dims[2] + cmin[tet_of, 2] + dz
        order = np.argsort(cells, kind="stable")
        self.bin_items = tet_of[order]
        counts = np.bincount(cells, minlength=int(self.dims.prod()))
        self.bin_ptr = np.concatenate([[0], np.cumsum(counts)])

    def locate(self, points, tol: float = 1e-10):
        """Return (tet_ids, weights (n,4)); tet_id is -1 outside the mesh.

        Bin candidates are scanned in ascending tet id, so the matched tet
        for a point on a shared face is reproducible.
        """
        pts = np.ascontiguousarray(np.atleast_2d(np.asarray(points, dtype=np.float64)))
        return _accel.locate_points(
            pts,
            self.origin,
            self.scale,
            self.dims,
            self.bin_ptr,
            self.bin_items,
            self.v0,
            self.inv,
            float(tol),
        )

    def sample(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        tids, w = self.locate(pts)
        if np.any(tids < 0):
            bad = pts[tids < 0][0]
            raise ValueError(f"point {bad.tolist()} outside mesh")
        return np.einsum("nk,nkc->nc", w, self.mesh.tensors[self.mesh.tets[tids]])

    def sample_one(self, point) -> np.ndarray:
        return self.sample(np.asarray(point, dtype=np.float64)[None, :])[0]

    def __call__(self, points):
        points = np.asarray(points, dtype=np.float64)
        if points.ndim == 1:
            return self.sample_one(points)
        return self.sample(points)
