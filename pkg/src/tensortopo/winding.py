"""Eigenframe transport around loops and quaternion winding numbers.

A non-degenerate symmetric tensor carries four right-handed eigenframes,
related by 180 degree flips about the eigenvector axes. Carrying a frame
continuously around a closed loop therefore returns it to one of eight
unit quaternions. That element classifies what the loop encircles: the
identity for nothing, a major-axis flip for linear degeneracies, a
minor-axis flip for planar ones.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .curves import Polyline3
from .tensor import eigen_decompose, fro_norm, mode

__all__ = [
    "WindingError",
    "FrameQuaternion",
    "WindingNumber",
    "frame_quaternion",
    "transport_winding",
    "point_index",
    "loop_winding",
]


class WindingError(RuntimeError):
    """Frame transport could not be completed."""


def _qmul(a, b):
    w1, x1, y1, z1 = a
    w2, x2, y2, z2 = b
    return np.array(
        [
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        ]
    )


def _qconj(q):
    return np.array([q[0], -q[1], -q[2], -q[3]])


def _quat_from_matrix(r):
    # Shepperd's branch selection keeps the extraction well conditioned
    t = np.trace(r)
    if t > 0:
        s = np.sqrt(t + 1.0) * 2.0
        q = np.array(
            [0.25 * s, (r[2, 1] - r[1, 2]) / s, (r[0, 2] - r[2, 0]) / s,
             (r[1, 0] - r[0, 1]) / s]
        )
    elif r[0, 0] >= r[1, 1] and r[0, 0] >= r[2, 2]:
        s = np.sqrt(1.0 + r[0, 0] - r[1, 1] - r[2, 2]) * 2.0
        q = np.array(
            [(r[2, 1] - r[1, 2]) / s, 0.25 * s, (r[0, 1] + r[1, 0]) / s,
             (r[0, 2] + r[2, 0]) / s]
        )
    elif r[1, 1] >= r[2, 2]:
        s = np.sqrt(1.0 + r[1, 1] - r[0, 0] - r[2, 2]) * 2.0
        q = np.array(
            [(r[0, 2] - r[2, 0]) / s, (r[0, 1] + r[1, 0]) / s, 0.25 * s,
             (r[1, 2] + r[2, 1]) / s]
        )
    else:
        s = np.sqrt(1.0 + r[2, 2] - r[0, 0] - r[1, 1]) * 2.0
        q = np.array(
            [(r[1, 0] - r[0, 1]) / s, (r[0, 2] + r[2, 0]) / s,
             (r[1, 2] + r[2, 1]) / s, 0.25 * s]
        )
    return q / np.linalg.norm(q)


def _rotate(q, v):
    w, x, y, z = q
    u = np.array([x, y, z])
    return v + 2.0 * np.cross(u, np.cross(u, v) + w * v)


# right multipliers generating the four frames of one eigensystem
_FLIPS = (
    np.array([1.0, 0.0, 0.0, 0.0]),
    np.array([0.0, 1.0, 0.0, 0.0]),
    np.array([0.0, 0.0, 1.0, 0.0]),
    np.array([0.0, 0.0, 0.0, 1.0]),
)

_SNAP_LABELS = (
    ("+1", np.array([1.0, 0, 0, 0])),
    ("-1", np.array([-1.0, 0, 0, 0])),
    ("+i", np.array([0.0, 1, 0, 0])),
    ("-i", np.array([0.0, -1, 0, 0])),
    ("+j", np.array([0.0, 0, 1, 0])),
    ("-j", np.array([0.0, 0, -1, 0])),
    ("+k", np.array([0.0, 0, 0, 1])),
    ("-k", np.array([0.0, 0, 0, -1])),
)

_LABEL_QUAT = {lab: q for lab, q in _SNAP_LABELS}


@dataclass(frozen=True)
class FrameQuaternion:
    """Unit quaternion taking the world frame to an eigenframe.

    The tensor does not order frame signs, so q, q*i, q*j and q*k all
    stand for the same eigensystem.
    """

    q: np.ndarray

    def __post_init__(self):
        if abs(np.linalg.norm(self.q) - 1.0) > 1e-12:
            raise ValueError("quaternion must be unit length")


@dataclass
class WindingNumber:
    """Snapped transport result, one of +-1, +-i, +-j, +-k."""

    value: str
    snap_error: float

    @property
    def quaternion(self):
        return _LABEL_QUAT[self.value].copy()

    def __mul__(self, other):
        q = _qmul(_LABEL_QUAT[self.value], _LABEL_QUAT[other.value])
        idx = int(np.argmax(np.abs(q)))
        lab = ("1", "i", "j", "k")[idx]
        sign = "+" if q[idx] > 0 else "-"
        return WindingNumber(sign + lab, max(self.snap_error, other.snap_error))


def frame_quaternion(eig, gap_tol: float = 1e-9) -> FrameQuaternion:
    """Quaternion for one eigensystem, rejecting near-degenerate input."""
    values = np.asarray(eig.values, dtype=np.float64)
    gap = min(values[0] - values[1], values[1] - values[2])
    norm = float(np.linalg.norm(values))
    if gap <= gap_tol * max(norm, 1e-300):
        raise WindingError("tensor is too close to degenerate for a frame")
    return FrameQuaternion(_quat_from_matrix(np.asarray(eig.vectors)))


def _frame_at(field, point):
    t6 = np.asarray(field(np.asarray(point, dtype=np.float64)[None, :]))[0]
    return frame_quaternion(eigen_decompose(t6)).q


def _frames_at(field, points, gap_tol: float = 1e-9):
    """Frame quaternions at many points from a single field evaluation.

    Batched twin of ``_frame_at``: one field call, one batched eigh,
    with the per-point integrity checks applied in point order so the
    first offending point raises the same error the scalar path would.
    """
    t6s = np.asarray(field(np.asarray(points, dtype=np.float64)))
    m = np.empty((len(t6s), 3, 3))
    m[:, 0, 0] = t6s[:, 0]
    m[:, 1, 1] = t6s[:, 1]
    m[:, 2, 2] = t6s[:, 2]
    m[:, 0, 1] = m[:, 1, 0] = t6s[:, 3]
    m[:, 1, 2] = m[:, 2, 1] = t6s[:, 4]
    m[:, 0, 2] = m[:, 2, 0] = t6s[:, 5]
    w, v = np.linalg.eigh(m)
    values = w[:, ::-1]
    vectors = np.ascontiguousarray(v[:, :, ::-1])
    vectors[np.linalg.det(vectors) < 0.0, :, 2] *= -1.0
    recon = np.einsum("rik,rk,rjk->rij", vectors, values, vectors)
    fro = np.sqrt(
        (t6s[:, :3] ** 2).sum(axis=1) + 2.0 * (t6s[:, 3:] ** 2).sum(axis=1)
    )
    recon_bad = (
        np.abs(recon - m).max(axis=(1, 2)) > 1e-9 * np.maximum(1.0, fro)
    )
    gaps = np.minimum(
        values[:, 0] - values[:, 1], values[:, 1] - values[:, 2]
    )
    vnorm = np.linalg.norm(values, axis=1)
    gap_bad = gaps <= gap_tol * np.maximum(vnorm, 1e-300)
    bad = recon_bad | gap_bad
    if bad.any():
        i = int(np.argmax(bad))
        if recon_bad[i]:
            raise ValueError("eigen reconstruction residual exceeds tolerance")
        raise WindingError("tensor is too close to degenerate for a frame")
    return [_quat_from_matrix(vectors[i]) for i in range(len(vectors))]


def _match(prev, cand):
    """Closest of the eight representatives of cand's frame class.

    The four right flips of cand are written out component-wise; this
    sits inside the transport loop and runs on plain floats.
    """
    p0, p1, p2, p3 = float(prev[0]), float(prev[1]), float(prev[2]), float(prev[3])
    w, x, y, z = float(cand[0]), float(cand[1]), float(cand[2]), float(cand[3])
    dots = (
        p0 * w + p1 * x + p2 * y + p3 * z,
        -p0 * x + p1 * w + p2 * z - p3 * y,
        -p0 * y - p1 * z + p2 * w + p3 * x,
        -p0 * z + p1 * y - p2 * x + p3 * w,
    )
    best_k, best_dot = 0, -2.0
    for k in range(4):
        d = abs(dots[k])
        if d > best_dot:
            best_k, best_dot = k, d
    s = -1.0 if dots[best_k] < 0 else 1.0
    if best_k == 0:
        q = np.array([s * w, s * x, s * y, s * z])
    elif best_k == 1:
        q = np.array([-s * x, s * w, s * z, -s * y])
    elif best_k == 2:
        q = np.array([-s * y, -s * z, s * w, s * x])
    else:
        q = np.array([-s * z, s * y, -s * x, s * w])
    return q, best_dot


_MIN_STEP_DOT = np.cos(np.deg2rad(15.0))  # 30 degree frame rotation


def _newell_normal(points):
    nxt = np.roll(points, -1, axis=0)
    n = np.sum(np.cross(points, nxt), axis=0)
    norm = np.linalg.norm(n)
    return n / norm if norm > 0 else np.array([0.0, 0.0, 1.0])


def transport_winding(
    field,
    loop: Polyline3,
    snap_tol: float = 0.2,
    max_depth: int = 20,
    initial_frame: int = 0,
    canonicalize: bool = True,
    reference=None,
    gap_tol: float = 1e-9,
) -> WindingNumber:
    """Carry an eigenframe once around a closed loop and snap the result.

    Consecutive samples are bisected until each frame step rotates by
    less than 30 degrees, which keeps the choice among the four frames
    unambiguous and the quaternion lift continuous. With canonicalize
    the sign of an axis result is fixed against the loop's orientation
    normal (or ``reference``), making the value independent of the
    starting frame and of the direction of travel.
    """
    if not loop.closed:
        raise ValueError("transport requires a closed loop")
    pts = loop.points

    # whether one step stays under the rotation cap depends only on the
    # frames at its two endpoints, so segments can be bisected level by
    # level with one batched field evaluation per level
    seq_pts = [pts[i] for i in range(len(pts))]
    seq_q = _frames_at(field, pts, gap_tol=gap_tol)
    depth = [0] * len(seq_pts)
    while True:
        split = [
            i
            for i in range(len(seq_pts))
            if _match(seq_q[i], seq_q[(i + 1) % len(seq_q)])[1] < _MIN_STEP_DOT
        ]
        if not split:
            break
        if any(depth[i] >= max_depth for i in split):
            raise WindingError("loop too close to degeneracy")
        mids = [
            0.5 * (seq_pts[i] + seq_pts[(i + 1) % len(seq_pts)]) for i in split
        ]
        mid_q = _frames_at(field, np.asarray(mids), gap_tol=gap_tol)
        out_pts, out_q, out_d = [], [], []
        k = 0
        for i in range(len(seq_pts)):
            out_pts.append(seq_pts[i])
            out_q.append(seq_q[i])
            if k < len(split) and split[k] == i:
                out_pts.append(mids[k])
                out_q.append(mid_q[k])
                out_d.extend([depth[i] + 1, depth[i] + 1])
                k += 1
            else:
                out_d.append(depth[i])
        seq_pts, seq_q, depth = out_pts, out_q, out_d

    q0 = _qmul(seq_q[0], _FLIPS[initial_frame % 4])
    current = q0
    for i in range(1, len(seq_q) + 1):
        current = _match(current, seq_q[i % len(seq_q)])[0]

    c = _qmul(_qconj(q0), current)
    best_label, best_err = None, np.inf
    for label, ref_q in _SNAP_LABELS:
        err = float(np.arccos(np.clip(np.dot(c, ref_q), -1.0, 1.0)))
        if err < best_err:
            best_label, best_err = label, err
    if best_err >= snap_tol:
        raise WindingError(
            f"ambiguous snap: {best_err:.3f} rad from nearest winding value"
        )

    if canonicalize and best_label[1] != "1":
        # the world rotation axis (snapped sign included) is a physical
        # invariant; aligning the label with the reference removes the
        # arbitrary eigenvector sign from the result
        axis_idx = {"i": 0, "j": 1, "k": 2}[best_label[1]]
        axis = np.zeros(3)
        axis[axis_idx] = 1.0 if best_label[0] == "+" else -1.0
        axis_world = _rotate(q0, axis)
        ref = reference if reference is not None else _newell_normal(pts)
        d = float(np.dot(axis_world, ref))
        if d != 0.0:
            best_label = ("+" if d > 0 else "-") + best_label[1]

    if best_label[1] == "j":
        warnings.warn(
            "medium-eigenvector winding detected; this does not arise from "
            "clean degenerate curves and usually signals noisy input",
            stacklevel=2,
        )
    return WindingNumber(best_label, best_err)


def _perp_basis(tangent):
    t = tangent / np.linalg.norm(tangent)
    helper = np.zeros(3)
    helper[int(np.argmin(np.abs(t)))] = 1.0
    e1 = np.cross(t, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(t, e1)
    return t, e1, e2


def point_index(
    field,
    point,
    tangent,
    radius: float,
    n_samples: int = 16,
    max_retries: int = 6,
    snap_tol: float = 0.2,
    gap_tol: float = 1e-9,
) -> WindingNumber:
    """Winding of a small circle transversal to a degenerate curve.

    The circle is oriented so its normal points along the tangent, which
    pins the sign of the reported axis. The radius halves on transport
    failure. A non-degenerate center is reported with a warning since it
    violates the contract and can only return the identity.
    """
    point = np.asarray(point, dtype=np.float64)
    t, e1, e2 = _perp_basis(np.asarray(tangent, dtype=np.float64))

    t6 = np.asarray(field(point[None, :]))[0]
    mu = mode(t6)
    if np.isfinite(mu) and abs(mu) < 1.0 - 1e-3:
        warnings.warn(
            "point_index called on a point that is not degenerate; "
            "the result reflects the surrounding regular field",
            stacklevel=2,
        )

    theta = np.linspace(0.0, 2.0 * np.pi, n_samples, endpoint=False)
    last_err = None
    r = float(radius)
    for _ in range(max_retries + 1):
        ring = point + r * (np.outer(np.cos(theta), e1) + np.outer(np.sin(theta), e2))
        try:
            return transport_winding(
                field, Polyline3(ring, closed=True),
                snap_tol=snap_tol, reference=t, gap_tol=gap_tol,
            )
        except (WindingError, ValueError) as exc:
            last_err = exc
            r *= 0.5
    raise WindingError(f"transport failed down to radius {r * 2}: {last_err}")


def _transported_normals(points):
    """Closed rotation-minimizing normal field along a polyline loop."""
    nxt = np.roll(points, -1, axis=0)
    tangents = nxt - points
    tangents = tangents / np.linalg.norm(tangents, axis=1)[:, None]
    _, e1, _ = _perp_basis(tangents[0])
    normals = [e1]
    for i in range(1, len(points)):
        n = normals[-1] - np.dot(normals[-1], tangents[i]) * tangents[i]
        norm = np.linalg.norm(n)
        if norm < 1e-12:
            raise WindingError("degenerate tangent turn while offsetting loop")
        normals.append(n / norm)
    normals = np.asarray(normals)
    # distribute the holonomy so the offset loop closes
    final = normals[-1] - np.dot(normals[-1], tangents[0]) * tangents[0]
    final /= np.linalg.norm(final)
    b0 = np.cross(tangents[0], normals[0])
    angle = np.arctan2(np.dot(final, b0), np.dot(final, normals[0]))
    n = len(points)
    for i in range(n):
        a = -angle * i / n
        bi = np.cross(tangents[i], normals[i])
        normals[i] = np.cos(a) * normals[i] + np.sin(a) * bi
    return normals


def loop_winding(
    field,
    loop: Polyline3,
    offset: float = None,
    point_tol: float = 1e-4,
    snap_tol: float = 0.2,
) -> WindingNumber:
    """Winding of a parallel companion loop offset from a degenerate loop.

    The companion stays inside a thin tube around the loop, so its value
    reports what links the loop rather than the loop itself. Offsets are
    retried smaller and larger when the transport fails.
    """
    if not loop.closed:
        raise ValueError("loop winding requires a closed loop")
    pts = loop.points
    diag = float(np.linalg.norm(np.ptp(pts, axis=0)))
    if offset is None:
        offset = 3.0 * point_tol * max(diag, 1.0)
    normals = _transported_normals(pts)
    last_err = None
    for factor in (1.0, 0.5, 2.0, 0.25, 4.0):
        companion = pts + (offset * factor) * normals
        try:
            return transport_winding(
                field, Polyline3(companion, closed=True), snap_tol=snap_tol
            )
        except (WindingError, ValueError) as exc:
            last_err = exc
    raise WindingError(f"no valid companion offset found: {last_err}")
