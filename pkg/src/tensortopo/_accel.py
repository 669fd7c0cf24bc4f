"""Hot numeric kernels, each with a numba and a pure-numpy implementation.

The compiled path is selected at import time unless the environment
variable ``TENSORTOPO_NUMBA`` is set to ``0`` (or numba is missing), in
which case the vectorized numpy twins are bound instead.  Both variants
stay importable under explicit names (``*_nb`` / ``*_np``) so they can be
benchmarked against each other.

Symmetric tensors are passed around as ``(n, 6)`` float64 arrays with
component order ``(xx, yy, zz, xy, yz, xz)``.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "NUMBA_ENABLED",
    "eigvals_sym6",
    "mode_sym6",
    "min_gap_sym6",
    "gn_polish",
    "pair_solid_angle_sum",
    "self_solid_angle_sum",
    "locate_points",
]

_SQRT6 = np.sqrt(6.0)
_TWO_THIRD_PI = 2.0 * np.pi / 3.0


def _numba_requested() -> bool:
    return os.environ.get("TENSORTOPO_NUMBA", "1").strip().lower() not in (
        "0",
        "false",
        "off",
        "no",
    )


# ---------------------------------------------------------------------------
# pure-numpy implementations


def eigvals_sym6_np(t6: np.ndarray) -> np.ndarray:
    """Eigenvalues of a batch of symmetric tensors, sorted descending.

    Closed-form trigonometric solve; exact enough for classification and
    pruning.  Full eigenframes go through ``numpy.linalg.eigh`` instead.
    """
    t6 = np.asarray(t6, dtype=np.float64)
    xx, yy, zz = t6[..., 0], t6[..., 1], t6[..., 2]
    xy, yz, xz = t6[..., 3], t6[..., 4], t6[..., 5]
    q = (xx + yy + zz) / 3.0
    dxx, dyy, dzz = xx - q, yy - q, zz - q
    p2 = dxx * dxx + dyy * dyy + dzz * dzz + 2.0 * (xy * xy + yz * yz + xz * xz)
    p = np.sqrt(p2 / 6.0)
    safe = p > 0.0
    ps = np.where(safe, p, 1.0)
    bxx, byy, bzz = dxx / ps, dyy / ps, dzz / ps
    bxy, byz, bxz = xy / ps, yz / ps, xz / ps
    half_det = 0.5 * (
        bxx * (byy * bzz - byz * byz)
        - bxy * (bxy * bzz - byz * bxz)
        + bxz * (bxy * byz - byy * bxz)
    )
    phi = np.arccos(np.clip(half_det, -1.0, 1.0)) / 3.0
    e1 = q + 2.0 * p * np.cos(phi)
    e3 = q + 2.0 * p * np.cos(phi + _TWO_THIRD_PI)
    e2 = 3.0 * q - e1 - e3
    out = np.stack([e1, e2, e3], axis=-1)
    if not np.all(safe):
        out[~safe] = np.repeat(q[~safe][..., None], 3, axis=-1)
    return out


def mode_sym6_np(t6: np.ndarray) -> np.ndarray:
    """Tensor mode in [-1, 1]; NaN marks triple-degenerate (zero deviator)."""
    t6 = np.asarray(t6, dtype=np.float64)
    xx, yy, zz = t6[..., 0], t6[..., 1], t6[..., 2]
    xy, yz, xz = t6[..., 3], t6[..., 4], t6[..., 5]
    m = (xx + yy + zz) / 3.0
    dxx, dyy, dzz = xx - m, yy - m, zz - m
    off2 = xy * xy + yz * yz + xz * xz
    norm2 = dxx * dxx + dyy * dyy + dzz * dzz + 2.0 * off2
    norm = np.sqrt(norm2)
    det = (
        dxx * (dyy * dzz - yz * yz)
        - xy * (xy * dzz - yz * xz)
        + xz * (xy * yz - dyy * xz)
    )
    fro = np.sqrt(xx * xx + yy * yy + zz * zz + 2.0 * off2)
    eps = 1e-12 * np.maximum(1.0, fro)
    with np.errstate(divide="ignore", invalid="ignore"):
        mu = 3.0 * _SQRT6 * det / (norm * norm2)
    mu = np.clip(mu, -1.0, 1.0)
    return np.where(norm > eps, mu, np.nan)


def min_gap_sym6_np(t6: np.ndarray) -> np.ndarray:
    """Smallest gap between adjacent sorted eigenvalues."""
    ev = eigvals_sym6_np(t6)
    return np.minimum(ev[..., 0] - ev[..., 1], ev[..., 1] - ev[..., 2])


def _to33_np(t6):
    m = np.empty(t6.shape[:-1] + (3, 3))
    m[..., 0, 0] = t6[..., 0]
    m[..., 1, 1] = t6[..., 1]
    m[..., 2, 2] = t6[..., 2]
    m[..., 0, 1] = m[..., 1, 0] = t6[..., 3]
    m[..., 1, 2] = m[..., 2, 1] = t6[..., 4]
    m[..., 0, 2] = m[..., 2, 0] = t6[..., 5]
    return m


def _pair_basis_np(t6, iso_largest):
    """Orthonormal basis (va, vb) of the colliding eigenvalue plane.

    The plane is the orthogonal complement of the isolated eigenvector,
    recovered as the largest cross product of rows of M - lambda_iso I.
    Any rotation of the basis inside the plane leaves the residual norm
    and the correction step unchanged, so no eigenvector ordering is
    needed. Rows with no usable cross product (triple degeneracy) are
    flagged invalid.
    """
    ev = eigvals_sym6_np(t6)
    eiso = ev[..., 0] if iso_largest else ev[..., 2]
    xx, yy, zz = t6[..., 0], t6[..., 1], t6[..., 2]
    xy, yz, xz = t6[..., 3], t6[..., 4], t6[..., 5]
    rows = np.stack(
        [
            np.stack([xx - eiso, xy, xz], axis=-1),
            np.stack([xy, yy - eiso, yz], axis=-1),
            np.stack([xz, yz, zz - eiso], axis=-1),
        ],
        axis=-2,
    )
    crosses = np.stack(
        [
            np.cross(rows[..., 0, :], rows[..., 1, :]),
            np.cross(rows[..., 0, :], rows[..., 2, :]),
            np.cross(rows[..., 1, :], rows[..., 2, :]),
        ],
        axis=-2,
    )
    n2 = np.einsum("...ki,...ki->...k", crosses, crosses)
    pick = n2.argmax(axis=-1)
    idx = np.arange(len(t6))
    w = crosses[idx, pick]
    best = n2[idx, pick]
    sc2 = np.einsum("...i,...i->...", t6, t6) + 1e-300
    valid = best > (1e-12 * sc2) ** 2
    w = w / np.sqrt(np.where(valid, best, 1.0))[..., None]
    helper = np.zeros_like(w)
    helper[idx, np.abs(w).argmin(axis=-1)] = 1.0
    va = np.cross(w, helper)
    va /= np.linalg.norm(va, axis=-1, keepdims=True) + 1e-300
    vb = np.cross(w, va)
    return va, vb, valid


def gn_polish_np(corner_t6, du6, dv6, scale, face_idx, uv0, iso_largest):
    """Gauss-Newton polish of pair-degeneracy seeds, batched over seeds.

    corner_t6 is (F, 3, 6) per face, du6/dv6 (F, 6) the tensor change
    along the two barycentric directions, scale (F,) the residual
    scale, face_idx (S,) the face of each seed and uv0 (S, 2) the start
    coordinates. iso_largest picks which eigenvalue stays isolated
    (True when the two smallest collide). Returns (uv, status) with
    status 0 converged, 1 left the search box, 2 not converged.
    """
    uv = np.array(uv0, dtype=np.float64)
    n = len(uv)
    status = np.full(n, 2, dtype=np.int8)
    active = np.arange(n)
    gu33 = _to33_np(np.asarray(du6, dtype=np.float64))
    gv33 = _to33_np(np.asarray(dv6, dtype=np.float64))
    for _ in range(40):
        if not len(active):
            break
        fi = face_idx[active]
        u, v = uv[active, 0], uv[active, 1]
        c = corner_t6[fi]
        t6 = (
            (1.0 - u - v)[:, None] * c[:, 0]
            + u[:, None] * c[:, 1]
            + v[:, None] * c[:, 2]
        )
        va, vb, valid = _pair_basis_np(t6, iso_largest)
        m = _to33_np(t6)
        mva = np.einsum("aij,aj->ai", m, va)
        mvb = np.einsum("aij,aj->ai", m, vb)
        f1 = 0.5 * (
            np.einsum("ai,ai->a", va, mva) - np.einsum("ai,ai->a", vb, mvb)
        )
        f2 = np.einsum("ai,ai->a", va, mvb)
        rn = np.sqrt(f1 * f1 + f2 * f2)
        conv = valid & (rn <= 1e-13 * scale[fi])
        status[active[conv]] = 0
        status[active[~valid]] = 2
        keep = valid & ~conv
        if not keep.all():
            active = active[keep]
            if not len(active):
                break
            fi, u, v = fi[keep], u[keep], v[keep]
            va, vb, f1, f2 = va[keep], vb[keep], f1[keep], f2[keep]
        gua = np.einsum("aij,aj->ai", gu33[fi], va)
        gub = np.einsum("aij,aj->ai", gu33[fi], vb)
        gva = np.einsum("aij,aj->ai", gv33[fi], va)
        gvb = np.einsum("aij,aj->ai", gv33[fi], vb)
        j00 = 0.5 * (
            np.einsum("ai,ai->a", va, gua) - np.einsum("ai,ai->a", vb, gub)
        )
        j10 = np.einsum("ai,ai->a", va, gub)
        j01 = 0.5 * (
            np.einsum("ai,ai->a", va, gva) - np.einsum("ai,ai->a", vb, gvb)
        )
        j11 = np.einsum("ai,ai->a", va, gvb)
        det = j00 * j11 - j01 * j10
        big = np.maximum(
            np.maximum(np.abs(j00), np.abs(j01)),
            np.maximum(np.abs(j10), np.abs(j11)),
        )
        cramer = np.abs(det) > 1e-12 * big * big
        det_safe = np.where(cramer, det, 1.0)
        s0c = (-f1 * j11 + f2 * j01) / det_safe
        s1c = (-f2 * j00 + f1 * j10) / det_safe
        lam = 1e-20 * big * big + 1e-300
        a00 = j00 * j00 + j10 * j10 + lam
        a01 = j00 * j01 + j10 * j11
        a11 = j01 * j01 + j11 * j11 + lam
        b0 = -(j00 * f1 + j10 * f2)
        b1 = -(j01 * f1 + j11 * f2)
        dd = a00 * a11 - a01 * a01
        s0d = (b0 * a11 - b1 * a01) / dd
        s1d = (b1 * a00 - b0 * a01) / dd
        s0 = np.where(cramer, s0c, s0d)
        s1 = np.where(cramer, s1c, s1d)
        sn = np.sqrt(s0 * s0 + s1 * s1)
        shrink = np.where(sn > 0.5, 0.5 / np.where(sn > 0.0, sn, 1.0), 1.0)
        u = u + s0 * shrink
        v = v + s1 * shrink
        uv[active, 0] = u
        uv[active, 1] = v
        inside = (u >= -0.5) & (u <= 1.5) & (v >= -0.5) & (v <= 1.5)
        status[active[~inside]] = 1
        active = active[inside]
    return uv, status


def _tri_solid_angle_np(a, b, c):
    """Signed solid angle of spherical triangles (van Oosterom-Strackee)."""
    num = np.einsum("...i,...i->...", a, np.cross(b, c))
    den = (
        1.0
        + np.einsum("...i,...i->...", a, b)
        + np.einsum("...i,...i->...", b, c)
        + np.einsum("...i,...i->...", c, a)
    )
    return 2.0 * np.arctan2(num, den)


def _unit_np(v):
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    return v / np.where(n > 0.0, n, 1.0)


def quad_solid_angles_np(a0, a1, b0, b1) -> np.ndarray:
    """Signed solid angle swept by the direction map of two segment batches.

    All four inputs broadcast together on the leading axes; the result is
    the Gauss-map quadrilateral area split into two spherical triangles.
    """
    v00 = _unit_np(b0 - a0)
    v01 = _unit_np(b1 - a0)
    v10 = _unit_np(b0 - a1)
    v11 = _unit_np(b1 - a1)
    return _tri_solid_angle_np(v00, v10, v11) + _tri_solid_angle_np(v00, v11, v01)


def pair_solid_angle_sum_np(a0, a1, b0, b1) -> float:
    """Sum of solid angles over all segment pairs of two distinct curves."""
    total = 0.0
    # block over the first curve to bound the broadcast workspace
    step = max(1, int(4e6 // max(1, len(b0))))
    for lo in range(0, len(a0), step):
        hi = min(lo + step, len(a0))
        q = quad_solid_angles_np(
            a0[lo:hi, None, :], a1[lo:hi, None, :], b0[None, :, :], b1[None, :, :]
        )
        total += float(q.sum())
    return total


def self_solid_angle_sum_np(p0, p1, closed: bool) -> float:
    """Sum of solid angles over non-adjacent ordered pairs j < i of one curve."""
    n = len(p0)
    if n < 3:
        return 0.0
    q = quad_solid_angles_np(
        p0[:, None, :], p1[:, None, :], p0[None, :, :], p1[None, :, :]
    )
    keep = np.tril(np.ones((n, n), dtype=bool), k=-2)
    if closed:
        keep[n - 1, 0] = False
    return float(q[keep].sum())


def locate_points_np(points, origin, scale, dims, bin_ptr, bin_items, v0, inv, tol):
    """Grid-bin point location; first containing tet in bin order wins."""
    n = len(points)
    out_tet = np.full(n, -1, dtype=np.int64)
    out_w = np.zeros((n, 4))
    cell = ((points - origin[None, :]) * scale[None, :]).astype(np.int64)
    cell = np.clip(cell, 0, dims[None, :] - 1)
    lin = (cell[:, 0] * dims[1] + cell[:, 1]) * dims[2] + cell[:, 2]
    for i in range(n):
        beg, end = bin_ptr[lin[i]], bin_ptr[lin[i] + 1]
        cands = bin_items[beg:end]
        if not len(cands):
            continue
        rel = points[i] - v0[cands]
        w123 = np.einsum("tij,tj->ti", inv[cands], rel)
        w0 = 1.0 - w123.sum(axis=1)
        ok = (w123.min(axis=1) >= -tol) & (w0 >= -tol)
        hits = np.nonzero(ok)[0]
        if len(hits):
            j = hits[0]
            out_tet[i] = cands[j]
            out_w[i, 0] = w0[j]
            out_w[i, 1:] = w123[j]
    return out_tet, out_w


# ---------------------------------------------------------------------------
# numba implementations

NUMBA_ENABLED = False

if _numba_requested():
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        njit = None
    if njit is not None:
        NUMBA_ENABLED = True

if NUMBA_ENABLED:

    @njit(cache=True, nogil=True, inline="always")
    def _eigvals3_nb(xx, yy, zz, xy, yz, xz):  # pragma: no cover
        q = (xx + yy + zz) / 3.0
        dxx, dyy, dzz = xx - q, yy - q, zz - q
        p2 = dxx * dxx + dyy * dyy + dzz * dzz + 2.0 * (
            xy * xy + yz * yz + xz * xz
        )
        p = np.sqrt(p2 / 6.0)
        if p <= 0.0:
            return q, q, q
        bxx, byy, bzz = dxx / p, dyy / p, dzz / p
        bxy, byz, bxz = xy / p, yz / p, xz / p
        half_det = 0.5 * (
            bxx * (byy * bzz - byz * byz)
            - bxy * (bxy * bzz - byz * bxz)
            + bxz * (bxy * byz - byy * bxz)
        )
        if half_det > 1.0:
            half_det = 1.0
        elif half_det < -1.0:
            half_det = -1.0
        phi = np.arccos(half_det) / 3.0
        e1 = q + 2.0 * p * np.cos(phi)
        e3 = q + 2.0 * p * np.cos(phi + _TWO_THIRD_PI)
        return e1, 3.0 * q - e1 - e3, e3

    @njit(cache=True, nogil=True)
    def eigvals_sym6_nb(t6):  # pragma: no cover - exercised via dispatch
        n = t6.shape[0]
        out = np.empty((n, 3), dtype=np.float64)
        for i in range(n):
            e1, e2, e3 = _eigvals3_nb(
                t6[i, 0], t6[i, 1], t6[i, 2], t6[i, 3], t6[i, 4], t6[i, 5]
            )
            out[i, 0] = e1
            out[i, 1] = e2
            out[i, 2] = e3
        return out

    @njit(cache=True, nogil=True)
    def mode_sym6_nb(t6):  # pragma: no cover
        n = t6.shape[0]
        out = np.empty(n, dtype=np.float64)
        for i in range(n):
            xx, yy, zz = t6[i, 0], t6[i, 1], t6[i, 2]
            xy, yz, xz = t6[i, 3], t6[i, 4], t6[i, 5]
            m = (xx + yy + zz) / 3.0
            dxx, dyy, dzz = xx - m, yy - m, zz - m
            off2 = xy * xy + yz * yz + xz * xz
            norm2 = dxx * dxx + dyy * dyy + dzz * dzz + 2.0 * off2
            norm = np.sqrt(norm2)
            fro = np.sqrt(xx * xx + yy * yy + zz * zz + 2.0 * off2)
            eps = 1e-12 * max(1.0, fro)
            if norm <= eps:
                out[i] = np.nan
                continue
            det = (
                dxx * (dyy * dzz - yz * yz)
                - xy * (xy * dzz - yz * xz)
                + xz * (xy * yz - dyy * xz)
            )
            mu = 3.0 * _SQRT6 * det / (norm * norm2)
            if mu > 1.0:
                mu = 1.0
            elif mu < -1.0:
                mu = -1.0
            out[i] = mu
        return out

    @njit(cache=True, nogil=True)
    def min_gap_sym6_nb(t6):  # pragma: no cover
        ev = eigvals_sym6_nb(t6)
        n = ev.shape[0]
        out = np.empty(n, dtype=np.float64)
        for i in range(n):
            g1 = ev[i, 0] - ev[i, 1]
            g2 = ev[i, 1] - ev[i, 2]
            out[i] = g1 if g1 < g2 else g2
        return out

    @njit(cache=True, nogil=True)
    def gn_polish_nb(
        corner_t6, du6, dv6, scale, face_idx, uv0, iso_largest
    ):  # pragma: no cover - exercised via dispatch
        n = uv0.shape[0]
        uv = uv0.copy()
        status = np.full(n, 2, dtype=np.int8)
        for s in range(n):
            f = face_idx[s]
            u = uv0[s, 0]
            v = uv0[s, 1]
            sc = scale[f]
            gu0, gu1, gu2 = du6[f, 0], du6[f, 1], du6[f, 2]
            gu3, gu4, gu5 = du6[f, 3], du6[f, 4], du6[f, 5]
            gv0, gv1, gv2 = dv6[f, 0], dv6[f, 1], dv6[f, 2]
            gv3, gv4, gv5 = dv6[f, 3], dv6[f, 4], dv6[f, 5]
            for _ in range(40):
                w0 = 1.0 - u - v
                xx = (
                    w0 * corner_t6[f, 0, 0]
                    + u * corner_t6[f, 1, 0]
                    + v * corner_t6[f, 2, 0]
                )
                yy = (
                    w0 * corner_t6[f, 0, 1]
                    + u * corner_t6[f, 1, 1]
                    + v * corner_t6[f, 2, 1]
                )
                zz = (
                    w0 * corner_t6[f, 0, 2]
                    + u * corner_t6[f, 1, 2]
                    + v * corner_t6[f, 2, 2]
                )
                xy = (
                    w0 * corner_t6[f, 0, 3]
                    + u * corner_t6[f, 1, 3]
                    + v * corner_t6[f, 2, 3]
                )
                yz = (
                    w0 * corner_t6[f, 0, 4]
                    + u * corner_t6[f, 1, 4]
                    + v * corner_t6[f, 2, 4]
                )
                xz = (
                    w0 * corner_t6[f, 0, 5]
                    + u * corner_t6[f, 1, 5]
                    + v * corner_t6[f, 2, 5]
                )
                e1, e2, e3 = _eigvals3_nb(xx, yy, zz, xy, yz, xz)
                eiso = e1 if iso_largest else e3
                # rows of M - eiso I and their pairwise cross products
                r0x, r0y, r0z = xx - eiso, xy, xz
                r1x, r1y, r1z = xy, yy - eiso, yz
                r2x, r2y, r2z = xz, yz, zz - eiso
                cx0 = r0y * r1z - r0z * r1y
                cy0 = r0z * r1x - r0x * r1z
                cz0 = r0x * r1y - r0y * r1x
                cx1 = r0y * r2z - r0z * r2y
                cy1 = r0z * r2x - r0x * r2z
                cz1 = r0x * r2y - r0y * r2x
                cx2 = r1y * r2z - r1z * r2y
                cy2 = r1z * r2x - r1x * r2z
                cz2 = r1x * r2y - r1y * r2x
                n0 = cx0 * cx0 + cy0 * cy0 + cz0 * cz0
                n1 = cx1 * cx1 + cy1 * cy1 + cz1 * cz1
                n2 = cx2 * cx2 + cy2 * cy2 + cz2 * cz2
                wx, wy, wz, best = cx0, cy0, cz0, n0
                if n1 > best:
                    wx, wy, wz, best = cx1, cy1, cz1, n1
                if n2 > best:
                    wx, wy, wz, best = cx2, cy2, cz2, n2
                sc2 = (
                    xx * xx
                    + yy * yy
                    + zz * zz
                    + xy * xy
                    + yz * yz
                    + xz * xz
                    + 1e-300
                )
                if best <= (1e-12 * sc2) ** 2:
                    break
                bn = np.sqrt(best)
                wx, wy, wz = wx / bn, wy / bn, wz / bn
                # helper axis with the smallest component of w
                ax, ay, az = abs(wx), abs(wy), abs(wz)
                if ax <= ay and ax <= az:
                    vax, vay, vaz = 0.0, -wz, wy
                elif ay <= ax and ay <= az:
                    vax, vay, vaz = wz, 0.0, -wx
                else:
                    vax, vay, vaz = -wy, wx, 0.0
                vn = np.sqrt(vax * vax + vay * vay + vaz * vaz) + 1e-300
                vax, vay, vaz = vax / vn, vay / vn, vaz / vn
                vbx = wy * vaz - wz * vay
                vby = wz * vax - wx * vaz
                vbz = wx * vay - wy * vax
                # residual through the symmetric sandwich
                max_ = xx * vax + xy * vay + xz * vaz
                may = xy * vax + yy * vay + yz * vaz
                maz = xz * vax + yz * vay + zz * vaz
                mbx = xx * vbx + xy * vby + xz * vbz
                mby = xy * vbx + yy * vby + yz * vbz
                mbz = xz * vbx + yz * vby + zz * vbz
                f1 = 0.5 * (
                    (vax * max_ + vay * may + vaz * maz)
                    - (vbx * mbx + vby * mby + vbz * mbz)
                )
                f2 = vax * mbx + vay * mby + vaz * mbz
                rn = np.sqrt(f1 * f1 + f2 * f2)
                if rn <= 1e-13 * sc:
                    status[s] = 0
                    break
                uax = gu0 * vax + gu3 * vay + gu5 * vaz
                uay = gu3 * vax + gu1 * vay + gu4 * vaz
                uaz = gu5 * vax + gu4 * vay + gu2 * vaz
                ubx = gu0 * vbx + gu3 * vby + gu5 * vbz
                uby = gu3 * vbx + gu1 * vby + gu4 * vbz
                ubz = gu5 * vbx + gu4 * vby + gu2 * vbz
                wax = gv0 * vax + gv3 * vay + gv5 * vaz
                way = gv3 * vax + gv1 * vay + gv4 * vaz
                waz = gv5 * vax + gv4 * vay + gv2 * vaz
                wbx = gv0 * vbx + gv3 * vby + gv5 * vbz
                wby = gv3 * vbx + gv1 * vby + gv4 * vbz
                wbz = gv5 * vbx + gv4 * vby + gv2 * vbz
                j00 = 0.5 * (
                    (vax * uax + vay * uay + vaz * uaz)
                    - (vbx * ubx + vby * uby + vbz * ubz)
                )
                j10 = vax * ubx + vay * uby + vaz * ubz
                j01 = 0.5 * (
                    (vax * wax + vay * way + vaz * waz)
                    - (vbx * wbx + vby * wby + vbz * wbz)
                )
                j11 = vax * wbx + vay * wby + vaz * wbz
                det = j00 * j11 - j01 * j10
                big = max(max(abs(j00), abs(j01)), max(abs(j10), abs(j11)))
                if abs(det) > 1e-12 * big * big:
                    s0 = (-f1 * j11 + f2 * j01) / det
                    s1 = (-f2 * j00 + f1 * j10) / det
                else:
                    lam = 1e-20 * big * big + 1e-300
                    a00 = j00 * j00 + j10 * j10 + lam
                    a01 = j00 * j01 + j10 * j11
                    a11 = j01 * j01 + j11 * j11 + lam
                    b0 = -(j00 * f1 + j10 * f2)
                    b1 = -(j01 * f1 + j11 * f2)
                    dd = a00 * a11 - a01 * a01
                    s0 = (b0 * a11 - b1 * a01) / dd
                    s1 = (b1 * a00 - b0 * a01) / dd
                sn = np.sqrt(s0 * s0 + s1 * s1)
                if sn > 0.5:
                    s0 *= 0.5 / sn
                    s1 *= 0.5 / sn
                u += s0
                v += s1
                if not (-0.5 <= u <= 1.5 and -0.5 <= v <= 1.5):
                    status[s] = 1
                    break
            uv[s, 0] = u
            uv[s, 1] = v
        return uv, status

    @njit(cache=True, nogil=True, inline="always")
    def _quad_solid_angle_nb(ax0, ay0, az0, ax1, ay1, az1,
                             bx0, by0, bz0, bx1, by1, bz1):  # pragma: no cover
        # four unit direction vectors of the Gauss map corners
        ux0, uy0, uz0 = bx0 - ax0, by0 - ay0, bz0 - az0
        ux1, uy1, uz1 = bx0 - ax1, by0 - ay1, bz0 - az1
        ux2, uy2, uz2 = bx1 - ax1, by1 - ay1, bz1 - az1
        ux3, uy3, uz3 = bx1 - ax0, by1 - ay0, bz1 - az0
        n0 = np.sqrt(ux0 * ux0 + uy0 * uy0 + uz0 * uz0)
        n1 = np.sqrt(ux1 * ux1 + uy1 * uy1 + uz1 * uz1)
        n2 = np.sqrt(ux2 * ux2 + uy2 * uy2 + uz2 * uz2)
        n3 = np.sqrt(ux3 * ux3 + uy3 * uy3 + uz3 * uz3)
        if n0 == 0.0 or n1 == 0.0 or n2 == 0.0 or n3 == 0.0:
            return 0.0
        ux0, uy0, uz0 = ux0 / n0, uy0 / n0, uz0 / n0
        ux1, uy1, uz1 = ux1 / n1, uy1 / n1, uz1 / n1
        ux2, uy2, uz2 = ux2 / n2, uy2 / n2, uz2 / n2
        ux3, uy3, uz3 = ux3 / n3, uy3 / n3, uz3 / n3
        # triangle (v00, v10, v11)
        cx = uy1 * uz2 - uz1 * uy2
        cy = uz1 * ux2 - ux1 * uz2
        cz = ux1 * uy2 - uy1 * ux2
        num = ux0 * cx + uy0 * cy + uz0 * cz
        den = (
            1.0
            + (ux0 * ux1 + uy0 * uy1 + uz0 * uz1)
            + (ux1 * ux2 + uy1 * uy2 + uz1 * uz2)
            + (ux2 * ux0 + uy2 * uy0 + uz2 * uz0)
        )
        s = 2.0 * np.arctan2(num, den)
        # triangle (v00, v11, v01)
        cx = uy2 * uz3 - uz2 * uy3
        cy = uz2 * ux3 - ux2 * uz3
        cz = ux2 * uy3 - uy2 * ux3
        num = ux0 * cx + uy0 * cy + uz0 * cz
        den = (
            1.0
            + (ux0 * ux2 + uy0 * uy2 + uz0 * uz2)
            + (ux2 * ux3 + uy2 * uy3 + uz2 * uz3)
            + (ux3 * ux0 + uy3 * uy0 + uz3 * uz0)
        )
        return s + 2.0 * np.arctan2(num, den)

    @njit(cache=True, nogil=True)
    def pair_solid_angle_sum_nb(a0, a1, b0, b1):  # pragma: no cover
        total = 0.0
        for i in range(a0.shape[0]):
            for j in range(b0.shape[0]):
                total += _quad_solid_angle_nb(
                    a0[i, 0], a0[i, 1], a0[i, 2],
                    a1[i, 0], a1[i, 1], a1[i, 2],
                    b0[j, 0], b0[j, 1], b0[j, 2],
                    b1[j, 0], b1[j, 1], b1[j, 2],
                )
        return total

    @njit(cache=True, nogil=True)
    def self_solid_angle_sum_nb(p0, p1, closed):  # pragma: no cover
        n = p0.shape[0]
        total = 0.0
        for i in range(n):
            for j in range(i - 1):
                if closed and i == n - 1 and j == 0:
                    continue
                total += _quad_solid_angle_nb(
                    p0[i, 0], p0[i, 1], p0[i, 2],
                    p1[i, 0], p1[i, 1], p1[i, 2],
                    p0[j, 0], p0[j, 1], p0[j, 2],
                    p1[j, 0], p1[j, 1], p1[j, 2],
                )
        return total

    @njit(cache=True, nogil=True)
    def locate_points_nb(points, origin, scale, dims, bin_ptr, bin_items,
                         v0, inv, tol):  # pragma: no cover
        n = points.shape[0]
        out_tet = np.full(n, -1, dtype=np.int64)
        out_w = np.zeros((n, 4))
        for i in range(n):
            lin = 0
            for d in range(3):
                c = int((points[i, d] - origin[d]) * scale[d])
                if c < 0:
                    c = 0
                elif c >= dims[d]:
                    c = dims[d] - 1
                lin = lin * dims[d] + c if d else c
            for s in range(bin_ptr[lin], bin_ptr[lin + 1]):
                t = bin_items[s]
                rx = points[i, 0] - v0[t, 0]
                ry = points[i, 1] - v0[t, 1]
                rz = points[i, 2] - v0[t, 2]
                w1 = inv[t, 0, 0] * rx + inv[t, 0, 1] * ry + inv[t, 0, 2] * rz
                w2 = inv[t, 1, 0] * rx + inv[t, 1, 1] * ry + inv[t, 1, 2] * rz
                w3 = inv[t, 2, 0] * rx + inv[t, 2, 1] * ry + inv[t, 2, 2] * rz
                w0 = 1.0 - w1 - w2 - w3
                if w0 >= -tol and w1 >= -tol and w2 >= -tol and w3 >= -tol:
                    out_tet[i] = t
                    out_w[i, 0] = w0
                    out_w[i, 1] = w1
                    out_w[i, 2] = w2
                    out_w[i, 3] = w3
                    break
        return out_tet, out_w


def _as_batch(t6):
    t6 = np.ascontiguousarray(t6, dtype=np.float64)
    if t6.ndim == 1:
        return t6[None, :], True
    return t6, False


def _wrap_batch(fn_nb, fn_np):
    def call(t6):
        batch, single = _as_batch(t6)
        out = fn_nb(batch) if NUMBA_ENABLED else fn_np(batch)
        return out[0] if single else out

    return call


if NUMBA_ENABLED:
    eigvals_sym6 = _wrap_batch(eigvals_sym6_nb, eigvals_sym6_np)
    mode_sym6 = _wrap_batch(mode_sym6_nb, mode_sym6_np)
    min_gap_sym6 = _wrap_batch(min_gap_sym6_nb, min_gap_sym6_np)

    def gn_polish(corner_t6, du6, dv6, scale, face_idx, uv0, iso_largest):
        return gn_polish_nb(
            np.ascontiguousarray(corner_t6, dtype=np.float64),
            np.ascontiguousarray(du6, dtype=np.float64),
            np.ascontiguousarray(dv6, dtype=np.float64),
            np.ascontiguousarray(scale, dtype=np.float64),
            np.ascontiguousarray(face_idx, dtype=np.int64),
            np.ascontiguousarray(uv0, dtype=np.float64),
            bool(iso_largest),
        )

    def pair_solid_angle_sum(a0, a1, b0, b1) -> float:
        return float(
            pair_solid_angle_sum_nb(
                np.ascontiguousarray(a0, dtype=np.float64),
                np.ascontiguousarray(a1, dtype=np.float64),
                np.ascontiguousarray(b0, dtype=np.float64),
                np.ascontiguousarray(b1, dtype=np.float64),
            )
        )

    def self_solid_angle_sum(p0, p1, closed: bool) -> float:
        return float(
            self_solid_angle_sum_nb(
                np.ascontiguousarray(p0, dtype=np.float64),
                np.ascontiguousarray(p1, dtype=np.float64),
                bool(closed),
            )
        )

    locate_points = locate_points_nb

else:
    eigvals_sym6 = _wrap_batch(None, eigvals_sym6_np)
    mode_sym6 = _wrap_batch(None, mode_sym6_np)
    min_gap_sym6 = _wrap_batch(None, min_gap_sym6_np)
    gn_polish = gn_polish_np
    pair_solid_angle_sum = pair_solid_angle_sum_np
    self_solid_angle_sum = self_solid_angle_sum_np
    locate_points = locate_points_np
