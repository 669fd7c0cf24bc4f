"""Analytic tensor fields with known degenerate-set topology.

Each field maps point batches ``(n, 3)`` to tensor batches ``(n, 6)``.
The loop fields place an exact circular degenerate curve by writing a 2D
deviator profile ``(a, b)`` in a smoothly varying frame ``(w1, w2, u)``:

    T = a (w1 w1^T - w2 w2^T) + b (w1 w2^T + w2 w1^T) + swirl * u u^T

with ``(a, b)`` vanishing exactly on the target circle.  The eigenvalues
are ``(+s, -s, swirl)`` with ``s = sqrt(a^2 + b^2)``, so the field is
degenerate exactly where the profile vanishes.  The profile magnitude is
capped below ``|swirl|`` so no spurious degeneracies appear anywhere, and
the frame is built from the nowhere-vanishing swirl direction
``u = (-y, x, bias) / |.|`` instead of cylindrical basis vectors, which
are discontinuous on the axis and would leave interpolation artifacts in
sampled meshes.
"""

from __future__ import annotations

import numpy as np

from .tensor import from_matrix, rotate_tensor

__all__ = [
    "AnalyticField",
    "ConstantDegenerateField",
    "LinearRandomField",
    "AxisymLoopField",
    "HopfPairField",
    "PlaneSheetField",
    "SphereShellField",
    "LineWedgeField",
    "TransformedField",
    "make_field",
    "FIELD_IDS",
]


class AnalyticField:
    """Base: a named, parameterized map from points to symmetric tensors."""

    name = "field"

    def __init__(self):
        self.params: dict = {}

    def sample(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def sample_one(self, point) -> np.ndarray:
        return self.sample(np.asarray(point, dtype=np.float64)[None, :])[0]

    def __call__(self, points):
        points = np.asarray(points, dtype=np.float64)
        if points.ndim == 1:
            return self.sample_one(points)
        return self.sample(points)


class ConstantDegenerateField(AnalyticField):
    """diag(2, -1, -1) everywhere: every point is linear degenerate."""

    name = "constant-degenerate"

    def sample(self, points):
        points = np.asarray(points, dtype=np.float64)
        out = np.zeros((len(points), 6))
        out[:, 0] = 2.0
        out[:, 1] = -1.0
        out[:, 2] = -1.0
        return out


class LinearRandomField(AnalyticField):
    """T(p) = T0 + x Tx + y Ty + z Tz with seeded uniform[-1,1] coefficients."""

    name = "linear-random"

    def __init__(self, seed: int = 0):
        self.params = {"seed": int(seed)}
        rng = np.random.default_rng(int(seed))
        self.coeffs = rng.uniform(-1.0, 1.0, size=(4, 6))

    def sample(self, points):
        points = np.asarray(points, dtype=np.float64)
        c = self.coeffs
        return (
            c[0][None, :]
            + points[:, 0:1] * c[1][None, :]
            + points[:, 1:2] * c[2][None, :]
            + points[:, 2:3] * c[3][None, :]
        )


def _tube_tensor(points, a_raw, b_raw, u, swirl, cap, width):
    """Assemble the capped tube tensor given raw profile and swirl axis."""
    rho2 = a_raw * a_raw + b_raw * b_raw
    g = cap / np.sqrt(width * width + rho2)
    a = g * a_raw
    b = g * b_raw
    # frame completion: w1 = unit(e_x - (u.e_x) u), w2 = u x w1
    ux = u[:, 0]
    w1 = np.empty_like(u)
    w1[:, 0] = 1.0 - ux * u[:, 0]
    w1[:, 1] = -ux * u[:, 1]
    w1[:, 2] = -ux * u[:, 2]
    w1 /= np.linalg.norm(w1, axis=1, keepdims=True)
    w2 = np.cross(u, w1)
    m = (
        a[:, None, None] * (w1[:, :, None] * w1[:, None, :] - w2[:, :, None] * w2[:, None, :])
        + b[:, None, None] * (w1[:, :, None] * w2[:, None, :] + w2[:, :, None] * w1[:, None, :])
        + swirl * u[:, :, None] * u[:, None, :]
    )
    return from_matrix(m)


class AxisymLoopField(AnalyticField):
    """Degenerate circle x^2 + y^2 = r0^2, z = 0 with a wedge profile.

    ``swirl > 0`` makes the curve linear degenerate, ``swirl < 0`` planar.
    With ``cap < |swirl| / 3`` the mode never changes sign (no neutral
    sheet); with ``cap > |swirl| / 3`` a closed neutral torus of profile
    radius ``width / sqrt((3 cap / swirl)^2 - 1)`` encloses the loop.
    ``mirror=True`` flips the profile handedness (trisector variant).
    """

    name = "axisym-loop"

    def __init__(
        self,
        r0: float = 1.0,
        swirl: float = 2.0,
        cap: float = 0.6,
        width: float = 1.0,
        axis_bias: float = 0.5,
        mirror: bool = False,
    ):
        if r0 <= 0.0:
            raise ValueError("loop radius must be positive")
        if cap >= abs(swirl):
            raise ValueError("profile cap must stay below |swirl|")
        self.params = {
            "r0": float(r0),
            "swirl": float(swirl),
            "cap": float(cap),
            "width": float(width),
            "axis_bias": float(axis_bias),
            "mirror": bool(mirror),
        }
        self.r0 = float(r0)
        self.swirl = float(swirl)
        self.cap = float(cap)
        self.width = float(width)
        self.axis_bias = float(axis_bias)
        self.mirror = bool(mirror)

    def sample(self, points):
        points = np.asarray(points, dtype=np.float64)
        x, y, z = points[:, 0], points[:, 1], points[:, 2]
        nu = np.sqrt(x * x + y * y + self.axis_bias**2)
        u = np.stack([-y, x, np.full_like(x, self.axis_bias)], axis=1) / nu[:, None]
        a_raw = x * x + y * y - self.r0 * self.r0
        # sign fixed so the default profile is a wedge (delta > 0) all
        # along the circle; mirroring it gives the trisector variant
        b_raw = z if self.mirror else -z
        return _tube_tensor(points, a_raw, b_raw, u, self.swirl, self.cap, self.width)

    def true_curve(self, n: int = 256) -> np.ndarray:
        t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
        return np.stack(
            [self.r0 * np.cos(t), self.r0 * np.sin(t), np.zeros_like(t)], axis=1
        )


class HopfPairField(AnalyticField):
    """Two interlocked degenerate circles with no other degeneracies.

    Loop A is the circle x²+y² = r0² in the z = 0 plane; loop B is the
    circle (x−separation)² + z² = r0² in the y = 0 plane.  For
    0 < separation < 2·r0 they form a Hopf link.

    The field keeps a fixed eigenvector along z with dominant strength
    ``sigma``; the remaining symmetry-breaking pair (a, b) is the complex
    product of one quadratic vanishing on each circle, so the degenerate
    set is exactly the two loops and the pair winds once around each.
    Additive blends of two one-loop fields were rejected: where the blend
    weights are comparable the cross terms close the small eigenvalue
    gaps and spawn extra degenerate curves.  Requires cap < sigma/3 so
    the z eigenvalue stays strictly dominant and the mode stays positive.
    """

    name = "hopf-pair"

    def __init__(
        self,
        r0: float = 1.0,
        separation: float = 1.0,
        sigma: float = 1.5,
        cap: float = 0.4,
        width: float = 1.0,
    ):
        if not 0.0 < float(separation) < 2.0 * float(r0):
            raise ValueError("separation must lie in (0, 2*r0) for a linked pair")
        if not 0.0 < float(cap) < float(sigma) / 3.0:
            raise ValueError("need 0 < cap < sigma/3")
        self.params = {
            "r0": float(r0),
            "separation": float(separation),
            "sigma": float(sigma),
            "cap": float(cap),
            "width": float(width),
        }
        self.r0 = float(r0)
        self.separation = float(separation)
        self.sigma = float(sigma)
        self.cap = float(cap)
        self.width = float(width)

    def _pair(self, points):
        x, y, z = points[:, 0], points[:, 1], points[:, 2]
        r0 = self.r0
        ga = x * x + y * y - r0 * r0
        gb = 2.0 * r0 * z
        xs = x - self.separation
        ha = xs * xs + z * z - r0 * r0
        hb = 2.0 * r0 * y
        # conjugate the first factor so both loops come out wedge-type
        fa = ga * ha + gb * hb
        fb = ga * hb - gb * ha
        scale = self.cap / np.sqrt(self.width**4 + fa * fa + fb * fb)
        return fa * scale, fb * scale

    def sample(self, points):
        points = np.asarray(points, dtype=np.float64)
        a, b = self._pair(points)
        out = np.zeros((len(points), 6))
        third = self.sigma / 3.0
        out[:, 0] = a - third
        out[:, 1] = -a - third
        out[:, 2] = 2.0 * third
        out[:, 3] = b
        return out

    def true_curves(self, n: int = 256):
        t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
        a = np.column_stack(
            [self.r0 * np.cos(t), self.r0 * np.sin(t), np.zeros(n)]
        )
        b = np.column_stack(
            [self.separation + self.r0 * np.cos(t), np.zeros(n), self.r0 * np.sin(t)]
        )
        return a, b


class PlaneSheetField(AnalyticField):
    """Mode changes sign exactly on the plane z = z0 (no degeneracies).

    Linear below the plane, planar above it, inside domains that stay
    clear of the mirror crossing at z = -z0.
    """

    name = "plane-sheet"

    def __init__(self, z0: float = 0.5, shear: float = 0.25):
        self.params = {"z0": float(z0), "shear": float(shear)}
        self.z0 = float(z0)
        self.shear = float(shear)
        self.gamma = 3.0 * np.hypot(z0, shear)

    def sample(self, points):
        points = np.asarray(points, dtype=np.float64)
        z = points[:, 2]
        out = np.zeros((len(points), 6))
        out[:, 0] = z
        out[:, 1] = -z
        out[:, 2] = self.gamma
        out[:, 3] = self.shear
        return out


class SphereShellField(AnalyticField):
    """Concentric spherical neutral sheets at the given radii (1 or 2).

    Built from the capped-profile trick with ``gamma`` pushed above the
    cap, so the field has no degenerate points at all.
    """

    name = "sphere-shell"

    def __init__(self, radii, shear: float = 0.2, cap: float = 1.0, width: float = 0.8):
        radii = tuple(float(r) for r in radii)
        if len(radii) not in (1, 2):
            raise ValueError("expected one or two sphere radii")
        self.params = {"radii": radii, "shear": shear, "cap": cap, "width": width}
        self.radii = radii
        self.shear = float(shear)
        self.cap = float(cap)
        self.width = float(width)
        if len(radii) == 1:
            self.m = 0.0
            amp = radii[0] ** 2
        else:
            self.m = (radii[0] ** 2 + radii[1] ** 2) / 2.0
            amp = abs(radii[1] ** 2 - radii[0] ** 2) / 2.0
        sig = np.hypot(amp, self.shear)
        if self.width >= np.sqrt(8.0) * sig:
            raise ValueError("width too large: gamma would fall below the cap")
        self.gamma = 3.0 * self.cap * sig / np.hypot(self.width, sig)

    def sample(self, points):
        points = np.asarray(points, dtype=np.float64)
        rho2 = np.einsum("ij,ij->i", points, points)
        a_raw = rho2 - self.m
        s_raw2 = a_raw * a_raw + self.shear**2
        g = self.cap / np.sqrt(self.width**2 + s_raw2)
        out = np.zeros((len(points), 6))
        out[:, 0] = g * a_raw
        out[:, 1] = -g * a_raw
        out[:, 2] = self.gamma
        out[:, 3] = g * self.shear
        return out


class LineWedgeField(AnalyticField):
    """Straight degenerate line along the z-axis with profile (x, h y).

    ``handed=+1`` is a wedge, ``-1`` a trisector; the sign of ``gamma``
    selects linear or planar type.  Meant for winding-number fixtures, so
    the profile is left uncapped (keep loops at radius < |gamma|).
    """

    name = "line-wedge"

    def __init__(self, gamma: float = 2.0, handed: int = 1):
        self.params = {"gamma": float(gamma), "handed": int(handed)}
        self.gamma = float(gamma)
        self.handed = int(handed)

    def sample(self, points):
        points = np.asarray(points, dtype=np.float64)
        x, y = points[:, 0], points[:, 1]
        out = np.zeros((len(points), 6))
        out[:, 0] = x
        out[:, 1] = -x
        out[:, 2] = self.gamma
        out[:, 3] = self.handed * y
        return out


class TransformedField(AnalyticField):
    """Rigid motion of a base field: T'(p) = R T(R^T (p - shift)) R^T."""

    name = "transformed"

    def __init__(self, base: AnalyticField, rot=None, shift=None):
        self.base = base
        self.rot = np.eye(3) if rot is None else np.asarray(rot, dtype=np.float64)
        self.shift = np.zeros(3) if shift is None else np.asarray(shift, dtype=np.float64)
        self.params = {"base": base.name}

    def sample(self, points):
        points = np.asarray(points, dtype=np.float64)
        local = (points - self.shift[None, :]) @ self.rot
        return rotate_tensor(self.base.sample(local), self.rot)


FIELD_IDS = ("linear-random", "axisym-loop", "hopf-pair", "constant-degenerate")


def make_field(field_id: str, **params) -> AnalyticField:
    """Construct a field from its CLI identifier."""
    if field_id == "linear-random":
        return LinearRandomField(seed=int(params.get("seed", 0)))
    if field_id == "axisym-loop":
        keys = ("r0", "swirl", "cap", "width", "axis_bias", "mirror")
        return AxisymLoopField(**{k: params[k] for k in keys if k in params})
    if field_id == "hopf-pair":
        keys = ("r0", "separation", "swirl", "cap", "width", "axis_bias")
        return HopfPairField(**{k: params[k] for k in keys if k in params})
    if field_id == "constant-degenerate":
        return ConstantDegenerateField()
    raise ValueError(f"unknown field id: {field_id!r}")
