"""Polyline curves and their pairwise/self entanglement measures.

The building block is the signed solid angle swept by the direction map of
two segments: the spherical quadrilateral spanned by the four normalized
endpoint differences, evaluated as two spherical triangles.  Summing it
over all segment pairs of two curves gives 4*pi times the Gauss linking
integral; summing over non-adjacent pairs of one closed curve gives 2*pi
times the writhe.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ._accel import pair_solid_angle_sum, quad_solid_angles_np, self_solid_angle_sum

__all__ = [
    "Polyline3",
    "solid_angle_q",
    "linking_integral",
    "writhe",
    "linking_verdict",
    "is_linked",
    "curves_to_json",
    "curves_from_json",
]

_TOUCH_TOL = 1e-12


@dataclass
class Polyline3:
    """Ordered 3D point chain; ``closed`` joins the last point to the first."""

    points: np.ndarray
    closed: bool = False

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError("points must be an (n, 3) array")
        if len(pts) < 3:
            raise ValueError("polyline needs at least 3 points")
        steps = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        if self.closed:
            steps = np.append(steps, np.linalg.norm(pts[0] - pts[-1]))
        if np.any(steps <= _TOUCH_TOL):
            raise ValueError("consecutive points must be distinct")
        self.points = pts

    @property
    def n_segments(self) -> int:
        return len(self.points) if self.closed else len(self.points) - 1

    def segments(self):
        """Return (starts, ends) arrays of all segments."""
        p = self.points
        if self.closed:
            return p, np.roll(p, -1, axis=0)
        return p[:-1], p[1:]

    def length(self) -> float:
        a, b = self.segments()
        return float(np.linalg.norm(b - a, axis=1).sum())

    def reversed(self) -> "Polyline3":
        return Polyline3(self.points[::-1].copy(), self.closed)

    def mirrored(self) -> "Polyline3":
        flipped = self.points.copy()
        flipped[:, 0] = -flipped[:, 0]
        return Polyline3(flipped, self.closed)


def _segment_pair_distance(a0, a1, b0, b1):
    """Min distance between segment batches (broadcast on leading axes)."""
    d1 = a1 - a0
    d2 = b1 - b0
    r = a0 - b0
    a = np.einsum("...i,...i->...", d1, d1)
    e = np.einsum("...i,...i->...", d2, d2)
    b = np.einsum("...i,...i->...", d1, d2)
    c = np.einsum("...i,...i->...", d1, r)
    f = np.einsum("...i,...i->...", d2, r)
    denom = a * e - b * b
    s = np.where(denom > 0.0, np.clip((b * f - c * e) / np.where(denom > 0, denom, 1.0), 0.0, 1.0), 0.0)
    t = (b * s + f) / np.where(e > 0.0, e, 1.0)
    t_clamped = np.clip(t, 0.0, 1.0)
    s = np.clip((b * t_clamped - c) / np.where(a > 0.0, a, 1.0), 0.0, 1.0)
    closest_a = a0 + s[..., None] * d1
    closest_b = b0 + t_clamped[..., None] * d2
    return np.linalg.norm(closest_a - closest_b, axis=-1)


def _min_curve_distance(c1: Polyline3, c2: Polyline3) -> float:
    a0, a1 = c1.segments()
    b0, b1 = c2.segments()
    best = np.inf
    step = max(1, int(2e6 // max(1, len(b0))))
    for lo in range(0, len(a0), step):
        hi = min(lo + step, len(a0))
        d = _segment_pair_distance(
            a0[lo:hi, None, :], a1[lo:hi, None, :], b0[None, :, :], b1[None, :, :]
        )
        best = min(best, float(d.min()))
    return best


def solid_angle_q(a0, a1, b0, b1) -> float:
    """Signed quadrilateral solid angle of one segment pair."""
    a0, a1, b0, b1 = (np.asarray(v, dtype=np.float64) for v in (a0, a1, b0, b1))
    d = _segment_pair_distance(a0, a1, b0, b1)
    if d <= _TOUCH_TOL:
        raise ValueError("segments touch; solid angle undefined")
    return float(quad_solid_angles_np(a0, a1, b0, b1))


def linking_integral(c1: Polyline3, c2: Polyline3) -> float:
    """Gauss linking integral; near an integer for closed disjoint curves."""
    if _min_curve_distance(c1, c2) <= _TOUCH_TOL:
        raise ValueError("curves intersect; linking integral undefined")
    a0, a1 = c1.segments()
    b0, b1 = c2.segments()
    return pair_solid_angle_sum(a0, a1, b0, b1) / (4.0 * np.pi)


def writhe(curve: Polyline3) -> float:
    """Self-entanglement of a closed loop: mean signed crossing number."""
    if not curve.closed:
        raise ValueError("writhe requires a closed curve")
    p0, p1 = curve.segments()
    return self_solid_angle_sum(p0, p1, True) / (2.0 * np.pi)


def linking_verdict(lk: float, both_closed: bool) -> bool:
    """Entanglement rule on a precomputed linking value.

    A closed pair must sit near a nonzero integer; open ends forfeit
    quantization, so any magnitude clearly above the noise floor counts.
    """
    if both_closed:
        return abs(round(lk)) >= 1 and abs(lk - round(lk)) < 0.1
    return abs(lk) > 0.9


def is_linked(c1: Polyline3, c2: Polyline3) -> bool:
    """Entanglement test; both closed demands a near-integer of size >= 1."""
    lk = linking_integral(c1, c2)
    return linking_verdict(lk, c1.closed and c2.closed)


def curves_to_json(curves) -> str:
    data = [
        {"points": np.asarray(c.points).tolist(), "closed": bool(c.closed)}
        for c in curves
    ]
    return json.dumps(data, indent=2)


def curves_from_json(text: str):
    data = json.loads(text)
    return [
        Polyline3(np.asarray(item["points"], dtype=np.float64), bool(item["closed"]))
        for item in data
    ]
