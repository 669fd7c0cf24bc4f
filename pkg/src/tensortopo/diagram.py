"""Link diagrams and Jones polynomials for closed polyline curves.

Closed space curves are flattened along their least significant principal
direction. Crossings of the flattened strands are recorded with over and
under roles taken from depth, the diagram is reduced with the two
crossing-removing Reidemeister moves, and the Jones polynomial is
evaluated through the Kauffman bracket state sum with the usual writhe
normalization.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .curves import Polyline3

__all__ = [
    "Crossing",
    "LinkDiagram",
    "LaurentPoly",
    "Knottedness",
    "DiagramError",
    "IntractableDiagram",
    "project_to_diagram",
    "simplify_diagram",
    "jones_polynomial",
    "is_knotted",
]


class DiagramError(ValueError):
    """No regular projection could be produced."""


class IntractableDiagram(Exception):
    """Simplified diagram exceeds the crossing budget."""

    def __init__(self, n_crossings, budget):
        super().__init__(
            f"diagram keeps {n_crossings} crossings after simplification, "
            f"budget is {budget}"
        )
        self.n_crossings = n_crossings
        self.budget = budget


class Knottedness(str, Enum):
    KNOTTED = "Knotted"
    UNKNOTTED = "Unknotted"
    UNRESOLVED = "Unresolved"


@dataclass(frozen=True)
class Crossing:
    """One transversal crossing of the flattened strands.

    Strand positions are fractional: segment index plus the parameter
    along that segment, so sorting them recovers the passage order.
    """

    over: tuple  # (strand index, position along strand)
    under: tuple
    sign: int
    pos: tuple  # 2D location in the projection plane


@dataclass
class LinkDiagram:
    """Flattened strands plus their crossing list.

    After simplification the crossing list reflects the reduced diagram
    while the strand polylines keep the original projected geometry.
    """

    strands: list
    crossings: list

    @property
    def n_crossings(self):
        return len(self.crossings)

    @property
    def writhe(self):
        return sum(c.sign for c in self.crossings)


class LaurentPoly:
    """Integer Laurent polynomial with exponents in half units of t.

    A key k stands for t^(k/2), so integer powers use even keys. The
    canonical text form lists terms by ascending exponent.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = {int(k): int(v) for k, v in (coeffs or {}).items() if v}

    @classmethod
    def one(cls):
        return cls({0: 1})

    def is_one(self):
        return self.coeffs == {0: 1}

    def __eq__(self, other):
        return isinstance(other, LaurentPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __add__(self, other):
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return LaurentPoly(out)

    def __neg__(self):
        return LaurentPoly({k: -v for k, v in self.coeffs.items()})

    def __mul__(self, other):
        out = {}
        for ka, va in self.coeffs.items():
            for kb, vb in other.coeffs.items():
                k = ka + kb
                out[k] = out.get(k, 0) + va * vb
        return LaurentPoly(out)

    def text(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k in sorted(self.coeffs):
            c = self.coeffs[k]
            mag = abs(c)
            if k == 0:
                body = str(mag)
            else:
                if k % 2 == 0:
                    e = k // 2
                    body = "t" if e == 1 else f"t^{e}"
                else:
                    body = f"t^{k}/2"
                if mag != 1:
                    body = f"{mag}{body}"
            if not parts:
                parts.append(body if c > 0 else "-" + body)
            else:
                parts.append(("+ " if c > 0 else "- ") + body)
        return " ".join(parts)

    def __str__(self):
        return self.text()

    def __repr__(self):
        return f"LaurentPoly('{self.text()}')"


# ---------------------------------------------------------------------------
# projection


def _rotation_about(axis, angle):
    axis = axis / np.linalg.norm(axis)
    k = np.array(
        [
            [0.0, -axis[2], axis[1]],
            [axis[2], 0.0, -axis[0]],
            [-axis[1], axis[0], 0.0],
        ]
    )
    return np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)


def _segment_distance_2d(a0, a1, b0, b1):
    da = a1 - a0
    db = b1 - b0
    best = np.inf
    for p, q0, d in ((a0, b0, db), (a1, b0, db), (b0, a0, da), (b1, a0, da)):
        tt = np.clip(np.dot(p - q0, d) / max(np.dot(d, d), 1e-300), 0.0, 1.0)
        best = min(best, float(np.linalg.norm(p - (q0 + tt * d))))
    return best


def _find_crossings(strands, depths, tol):
    """All transversal strand crossings, or None when irregular.

    Irregular means a near-parallel overlap, a crossing too close to a
    segment endpoint, a depth tie, or two crossings nearly coincident.
    """
    p0, p1, z0, z1, sid, pid = [], [], [], [], [], []
    sizes = []
    for s, (pts, dep) in enumerate(zip(strands, depths)):
        n = len(pts)
        sizes.append(n)
        p0.append(pts)
        p1.append(np.roll(pts, -1, axis=0))
        z0.append(dep)
        z1.append(np.roll(dep, -1))
        sid.append(np.full(n, s))
        pid.append(np.arange(n))
    p0 = np.concatenate(p0)
    p1 = np.concatenate(p1)
    z0 = np.concatenate(z0)
    z1 = np.concatenate(z1)
    sid = np.concatenate(sid)
    pid = np.concatenate(pid)
    sizes = np.asarray(sizes)

    seg = p1 - p0
    lens = np.hypot(seg[:, 0], seg[:, 1])
    if np.any(lens <= tol):
        return None

    m = len(p0)
    hits = []
    chunk = 512
    for a0 in range(0, m, chunk):
        ah = min(a0 + chunk, m)
        for b0 in range(a0, m, chunk):
            bh = min(b0 + chunk, m)
            ia, ib = np.meshgrid(
                np.arange(a0, ah), np.arange(b0, bh), indexing="ij"
            )
            ia = ia.ravel()
            ib = ib.ravel()
            keep = ib > ia
            same = sid[ia] == sid[ib]
            gap = np.abs(pid[ia] - pid[ib])
            wrap = sizes[sid[ia]] - 1
            keep &= ~(same & ((gap == 1) | (gap == wrap)))
            if not keep.any():
                continue
            ia = ia[keep]
            ib = ib[keep]
            r = seg[ia]
            w = seg[ib]
            qp = p0[ib] - p0[ia]
            den = r[:, 0] * w[:, 1] - r[:, 1] * w[:, 0]
            par = np.abs(den) <= 1e-12 * lens[ia] * lens[ib]
            for k in np.flatnonzero(par):
                d2 = _segment_distance_2d(p0[ia[k]], p1[ia[k]], p0[ib[k]], p1[ib[k]])
                if d2 < tol:
                    return None
            safe = np.where(par, 1.0, den)
            t = (qp[:, 0] * w[:, 1] - qp[:, 1] * w[:, 0]) / safe
            u = (qp[:, 0] * r[:, 1] - qp[:, 1] * r[:, 0]) / safe
            et = tol / lens[ia]
            eu = tol / lens[ib]
            near = ~par & (t > -et) & (t < 1 + et) & (u > -eu) & (u < 1 + eu)
            if not near.any():
                continue
            on_end = near & ((t < et) | (t > 1 - et) | (u < eu) | (u > 1 - eu))
            if on_end.any():
                return None
            for k in np.flatnonzero(near):
                i, j = ia[k], ib[k]
                zi = z0[i] + t[k] * (z1[i] - z0[i])
                zj = z0[j] + u[k] * (z1[j] - z0[j])
                if abs(zi - zj) <= tol:
                    return None
                x, y = p0[i] + t[k] * seg[i]
                hits.append(
                    (int(sid[i]), int(pid[i]), float(t[k]),
                     int(sid[j]), int(pid[j]), float(u[k]),
                     float(x), float(y), float(zi), float(zj))
                )

    if hits:
        centers = np.array([(h[6], h[7]) for h in hits])
        dx = centers[:, None, :] - centers[None, :, :]
        dist = np.hypot(dx[..., 0], dx[..., 1])
        np.fill_diagonal(dist, np.inf)
        if dist.min() <= tol:
            return None
    return hits


def project_to_diagram(curves, seed=0, max_attempts=64):
    """Flatten closed curves onto their principal plane.

    The plane is fixed by the two dominant principal directions of all
    points together. When the flattening is irregular the curves are
    nudged by a seeded rotation of at most 2 degrees and retried.
    """
    curves = list(curves)
    if not curves:
        raise DiagramError("need at least one curve")
    for c in curves:
        if not isinstance(c, Polyline3) or not c.closed:
            raise DiagramError("diagram projection needs closed curves")

    pts_all = np.vstack([c.points for c in curves])
    center = pts_all.mean(axis=0)
    cov = (pts_all - center).T @ (pts_all - center)
    _, vecs = np.linalg.eigh(cov)
    u = vecs[:, 2]
    v = vecs[:, 1]
    dvec = np.cross(u, v)

    scale = float(np.max(np.ptp(pts_all, axis=0)))
    tol = 1e-9 * max(1.0, scale)

    rng = np.random.default_rng(seed)
    rot = np.eye(3)
    for _ in range(max_attempts):
        strands = []
        depths = []
        for c in curves:
            q = (c.points - center) @ rot.T
            strands.append(np.column_stack([q @ u, q @ v]))
            depths.append(q @ dvec)
        hits = _find_crossings(strands, depths, tol)
        if hits is not None:
            crossings = []
            for si, pi, ti, sj, pj, tj, x, y, zi, zj in hits:
                d_i = strands[si][(pi + 1) % len(strands[si])] - strands[si][pi]
                d_j = strands[sj][(pj + 1) % len(strands[sj])] - strands[sj][pj]
                if zi > zj:
                    d_o, d_u = d_i, d_j
                    over, under = (si, pi + ti), (sj, pj + tj)
                else:
                    d_o, d_u = d_j, d_i
                    over, under = (sj, pj + tj), (si, pi + ti)
                sign = 1 if d_o[0] * d_u[1] - d_o[1] * d_u[0] > 0 else -1
                crossings.append(Crossing(over, under, sign, (x, y)))
            crossings.sort(key=lambda c: (c.over, c.under))
            return LinkDiagram(strands, crossings)
        axis = rng.normal(size=3)
        angle = rng.uniform(np.deg2rad(0.5), np.deg2rad(2.0))
        rot = _rotation_about(axis, angle) @ rot
    raise DiagramError(f"no regular projection after {max_attempts} attempts")


# ---------------------------------------------------------------------------
# combinatorial reduction and the bracket
#
# Crossing k owns slots 4k..4k+3 with roles over-in, over-out, under-in,
# under-out. The partner map pairs slot endpoints of strand stretches that
# carry no other crossing. A positive crossing is one whose under strand
# direction is counterclockwise from the over strand direction; for it the
# A smoothing joins (over-in, under-out) and (under-in, over-out), for a
# negative crossing the roles of A and B swap.


def _pd_structure(diagram):
    signs = {i: c.sign for i, c in enumerate(diagram.crossings)}
    passages = [[] for _ in diagram.strands]
    for i, c in enumerate(diagram.crossings):
        passages[c.over[0]].append((c.over[1], i, True))
        passages[c.under[0]].append((c.under[1], i, False))
    partner = {}
    free = 0
    for plist in passages:
        if not plist:
            free += 1
            continue
        plist.sort()
        n = len(plist)
        for a in range(n):
            _, i, over_i = plist[a]
            _, j, over_j = plist[(a + 1) % n]
            exit_slot = 4 * i + (1 if over_i else 3)
            enter_slot = 4 * j + (0 if over_j else 2)
            partner[exit_slot] = enter_slot
            partner[enter_slot] = exit_slot
    return signs, partner, free


def _through_delete(partner, k):
    """Remove crossing k letting both strands pass straight through."""
    loops = 0
    for s_in, s_out in ((4 * k, 4 * k + 1), (4 * k + 2, 4 * k + 3)):
        a = partner.pop(s_in)
        b = partner.pop(s_out)
        if a == s_out:
            loops += 1
        else:
            partner[a] = b
            partner[b] = a
    return loops


def _find_kink(signs, partner):
    for k in signs:
        if partner.get(4 * k + 1) == 4 * k + 2 or partner.get(4 * k + 3) == 4 * k:
            return k
    return None


def _find_bigon(signs, partner):
    # both strand stretches between k and l are direct and one strand is
    # on top at both ends; equal signs would make a non-removable clasp
    for k in signs:
        p = partner.get(4 * k + 1)
        if p is None or p % 4 != 0:
            continue
        l = p // 4
        if l == k or signs[k] * signs[l] != -1:
            continue
        if partner.get(4 * k + 3) == 4 * l + 2 or partner.get(4 * l + 3) == 4 * k + 2:
            return k, l
    return None


def _reduce_pd(signs, partner):
    """Run Reidemeister I and II removals to fixpoint, in place.

    Returns (kink signs removed, removed crossing ids, loops closed).
    """
    kinks = []
    removed = []
    loops = 0
    while True:
        k = _find_kink(signs, partner)
        if k is not None:
            kinks.append(signs.pop(k))
            removed.append(k)
            loops += _through_delete(partner, k)
            continue
        pair = _find_bigon(signs, partner)
        if pair is None:
            return kinks, removed, loops
        k, l = pair
        del signs[k], signs[l]
        removed.extend(pair)
        loops += _through_delete(partner, k)
        loops += _through_delete(partner, l)


def _padd(a, b):
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + v
        if out[k] == 0:
            del out[k]
    return out


def _pmul(a, b):
    out = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = ka + kb
            out[k] = out.get(k, 0) + va * vb
    return {k: v for k, v in out.items() if v}


_LOOP = {2: -1, -2: -1}  # -A^2 - A^-2, the value of one closed loop


def _dpow(n):
    out = {0: 1}
    for _ in range(n):
        out = _pmul(out, _LOOP)
    return out


def _smooth(partner, s1, s2):
    a = partner.pop(s1)
    b = partner.pop(s2)
    if a == s2:
        return 1
    partner[a] = b
    partner[b] = a
    return 0


def _pairings(k, sign):
    oi, oo, ui, uo = 4 * k, 4 * k + 1, 4 * k + 2, 4 * k + 3
    oriented = ((oi, uo), (ui, oo))
    split = ((oi, ui), (oo, uo))
    return (oriented, split) if sign > 0 else (split, oriented)


def _bracket_rec(signs, partner, memo):
    """Bracket state sum where each loop closure contributes one d factor."""
    key = (
        tuple(sorted(signs.items())),
        tuple((a, b) for a, b in sorted(partner.items()) if a < b),
    )
    cached = memo.get(key)
    if cached is not None:
        return cached
    signs = dict(signs)
    partner = dict(partner)
    kinks, _, loops = _reduce_pd(signs, partner)
    factor = _dpow(loops)
    for s in kinks:
        factor = _pmul(factor, {3 * s: -1})
    if not signs:
        result = factor
    else:
        k = min(signs)
        sign = signs.pop(k)
        a_pairs, b_pairs = _pairings(k, sign)
        total = {}
        for exp, pairs in ((1, a_pairs), (-1, b_pairs)):
            child = dict(partner)
            closed = _smooth(child, *pairs[0]) + _smooth(child, *pairs[1])
            sub = _bracket_rec(signs, child, memo)
            total = _padd(total, _pmul({exp: 1}, _pmul(_dpow(closed), sub)))
        result = _pmul(factor, total)
    memo[key] = result
    return result


def _div_exact(num, den):
    if not num:
        return {}
    nlo = min(num)
    dlo = min(den)
    n = {e - nlo: c for e, c in num.items()}
    d = {e - dlo: c for e, c in den.items()}
    ddeg = max(d)
    lead = d[ddeg]
    q = {}
    rem = dict(n)
    for e in range(max(n) - ddeg, -1, -1):
        c = rem.get(e + ddeg, 0)
        if c == 0:
            continue
        if c % lead:
            raise ArithmeticError("inexact polynomial division")
        qc = c // lead
        q[e] = qc
        for de, dc in d.items():
            r = rem.get(e + de, 0) - qc * dc
            if r:
                rem[e + de] = r
            else:
                rem.pop(e + de, None)
    if rem:
        raise ArithmeticError("inexact polynomial division")
    return {e + nlo - dlo: c for e, c in q.items()}


def _kauffman_bracket(diagram):
    """Bracket polynomial in A, normalized so one unknot gives 1."""
    signs, partner, free = _pd_structure(diagram)
    if not signs and free == 0:
        raise DiagramError("empty diagram")
    g = _bracket_rec(signs, partner, {})
    if free:
        return _pmul(g, _dpow(free - 1))
    return _div_exact(g, _LOOP)


def simplify_diagram(diagram):
    """Remove Reidemeister I kinks and II bigons until none remain."""
    signs, partner, _ = _pd_structure(diagram)
    _, removed, _ = _reduce_pd(signs, partner)
    gone = set(removed)
    keep = [c for i, c in enumerate(diagram.crossings) if i not in gone]
    return LinkDiagram([s.copy() for s in diagram.strands], keep)


def jones_polynomial(diagram, max_crossings=16):
    """Jones polynomial in t with the substitution t = A^-4.

    The diagram is simplified first; if more crossings remain than the
    budget allows the computation is refused rather than attempted.
    """
    reduced = simplify_diagram(diagram)
    if reduced.n_crossings > max_crossings:
        raise IntractableDiagram(reduced.n_crossings, max_crossings)
    bracket = _kauffman_bracket(reduced)
    w = reduced.writhe
    normal = _pmul({-3 * w: -1 if w % 2 else 1}, bracket)
    coeffs = {}
    for e, c in normal.items():
        if e % 2:
            raise ArithmeticError("odd bracket exponent after normalization")
        coeffs[-e // 2] = c
    return LaurentPoly(coeffs)


def is_knotted(curve, seed=0, max_crossings=16):
    """Classify one closed curve as Knotted, Unknotted or Unresolved."""
    if not curve.closed:
        raise ValueError("knot detection requires a closed curve")
    try:
        diagram = project_to_diagram([curve], seed=seed)
        poly = jones_polynomial(diagram, max_crossings=max_crossings)
    except (DiagramError, IntractableDiagram):
        return Knottedness.UNRESOLVED
    return Knottedness.UNKNOTTED if poly.is_one() else Knottedness.KNOTTED
