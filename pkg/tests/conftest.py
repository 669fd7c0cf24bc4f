import numpy as np


def to_mat(t6):
    xx, yy, zz, xy, yz, xz = t6
    return np.array([[xx, xy, xz], [xy, yy, yz], [xz, yz, zz]])


def mode_oracle(t6):
    """Eigenvalue-route mode: independent of the closed-form implementation."""
    lam = np.linalg.eigvalsh(to_mat(t6))
    dev = lam - lam.mean()
    norm = np.linalg.norm(dev)
    fro = np.linalg.norm(lam)
    if norm <= 1e-12 * max(1.0, fro):
        return np.nan
    return float(np.clip(3.0 * np.sqrt(6.0) * dev.prod() / norm**3, -1.0, 1.0))


def random_sym6(rng, n, scale=1.0):
    return rng.uniform(-scale, scale, size=(n, 6))


def _project_basis(direction):
    d = direction / np.linalg.norm(direction)
    ref = np.array([1.0, 0.0, 0.0]) if abs(d[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    u = np.cross(d, ref)
    u /= np.linalg.norm(u)
    v = np.cross(d, u)
    return u, v, d


def _crossing_signs(pa0, pa1, pb0, pb1, u, v, d):
    """Signed crossings between segment batches projected along d."""
    a2 = np.stack([pa0 @ u, pa0 @ v], axis=-1)
    a2e = np.stack([pa1 @ u, pa1 @ v], axis=-1)
    b2 = np.stack([pb0 @ u, pb0 @ v], axis=-1)
    b2e = np.stack([pb1 @ u, pb1 @ v], axis=-1)
    d1 = a2e - a2
    d2 = b2e - b2
    rel = b2[None, :, :] - a2[:, None, :]
    denom = d1[:, None, 0] * d2[None, :, 1] - d1[:, None, 1] * d2[None, :, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (rel[..., 0] * d2[None, :, 1] - rel[..., 1] * d2[None, :, 0]) / denom
        s = (rel[..., 0] * d1[:, None, 1] - rel[..., 1] * d1[:, None, 0]) / denom
    hit = (np.abs(denom) > 1e-15) & (t > 0) & (t < 1) & (s > 0) & (s < 1)
    za = (pa0 @ d)[:, None] + t * ((pa1 - pa0) @ d)[:, None]
    zb = (pb0 @ d)[None, :] + s * ((pb1 - pb0) @ d)[None, :]
    sign = np.sign(za - zb) * np.sign(denom)
    return np.where(hit, sign, 0.0)


def projected_linking_oracle(c1_pts, c2_pts, n_dirs=100, seed=0):
    """Average half-sum of signed inter-curve crossings over directions."""
    rng = np.random.default_rng(seed)
    a0, a1 = c1_pts, np.roll(c1_pts, -1, axis=0)
    b0, b1 = c2_pts, np.roll(c2_pts, -1, axis=0)
    vals = []
    for _ in range(n_dirs):
        d = rng.normal(size=3)
        u, v, dn = _project_basis(d)
        vals.append(_crossing_signs(a0, a1, b0, b1, u, v, dn).sum() / 2.0)
    return float(np.mean(vals))


def projected_writhe_oracle(pts, n_dirs=500, seed=0):
    """Average signed self-crossing count over projection directions."""
    rng = np.random.default_rng(seed)
    p0, p1 = pts, np.roll(pts, -1, axis=0)
    n = len(pts)
    keep = np.tril(np.ones((n, n), dtype=bool), k=-2)
    keep[n - 1, 0] = False
    vals = []
    for _ in range(n_dirs):
        d = rng.normal(size=3)
        u, v, dn = _project_basis(d)
        signs = _crossing_signs(p0, p1, p0, p1, u, v, dn)
        vals.append(signs[keep].sum())
    return float(np.mean(vals))


def trefoil_points(n=400):
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    return np.column_stack(
        [
            np.sin(t) + 2.0 * np.sin(2.0 * t),
            np.cos(t) - 2.0 * np.cos(2.0 * t),
            -np.sin(3.0 * t),
        ]
    )


def chi_tetrahedralization_oracle(mesh, surface, region):
    """Euler characteristic of a region by explicit tetrahedralization.

    Rebuilds the region's cells as a simplicial complex: uncut tets stay
    whole, cut tets are clipped against the crossing points, each cell is
    coned from its smallest vertex id over its triangulated boundary, and
    chi = V - E + F - T is counted over the unique simplices. Quad pieces
    take the diagonal through their smallest global id, which keeps the
    triangulation consistent across cells, so the count is exact.
    """
    from tensortopo.tensor import mode as _mode

    n_mesh = len(mesh.vertices)
    mu = _mode(mesh.tensors)
    mu = np.where(np.isnan(mu), 1.0, mu)
    signs = np.where(mu >= 0.0, 1, -1)
    cross_id = {}
    for i, (a, b) in enumerate(np.asarray(surface.crossing_edges, dtype=int)):
        cross_id[(min(a, b), max(a, b))] = n_mesh + i

    def crossing(a, b):
        return cross_id[(min(a, b), max(a, b))]

    def face_pieces(face, sgn):
        fs = [signs[v] for v in face]
        mine = [v for v, s in zip(face, fs) if s == sgn]
        if len(mine) == 3:
            return [tuple(face)]
        if len(mine) == 0:
            return []
        if len(mine) == 1:
            lone = mine[0]
            o1, o2 = [v for v in face if v != lone]
            return [(lone, crossing(lone, o1), crossing(lone, o2))]
        k1, k2 = mine
        lone = next(v for v in face if v not in (k1, k2))
        quad = [k1, crossing(k1, lone), crossing(k2, lone), k2]
        j = int(np.argmin(quad))
        q = quad[j:] + quad[:j]
        return [(q[0], q[1], q[2]), (q[0], q[2], q[3])]

    tri_by_tet = {}
    tris = np.asarray(surface.triangles, dtype=int)
    for t, tid in zip(tris, np.asarray(surface.tri_tets, dtype=int)):
        tri_by_tet.setdefault(int(tid), []).append([n_mesh + v for v in t])

    all_tets = set()
    for tid, sgn in region.cells:
        ids = [int(v) for v in mesh.tets[tid]]
        if all(signs[v] == sgn for v in ids):
            all_tets.add(tuple(sorted(ids)))
            continue
        boundary = list(tri_by_tet[tid])
        for k in range(4):
            face = [ids[j] for j in range(4) if j != k]
            boundary.extend(face_pieces(face, sgn))
        apex = min(min(t) for t in boundary)
        for t in boundary:
            if apex not in t:
                all_tets.add(tuple(sorted((apex,) + tuple(t))))

    verts, edges, faces = set(), set(), set()
    from itertools import combinations

    for t in all_tets:
        verts.update(t)
        edges.update(combinations(t, 2))
        faces.update(combinations(t, 3))
    return len(verts) - len(edges) + len(faces) - len(all_tets)
