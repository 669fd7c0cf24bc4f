"""Symmetric 3x3 tensor algebra: deviators, mode, classification, eigenframes.

Tensors are stored as length-6 component vectors ``(xx, yy, zz, xy, yz, xz)``;
batches stack them into ``(n, 6)`` arrays.  All angles of attack (mode,
discriminant, classification) work on the deviator, i.e. the anisotropic
part that is left after removing ``tr(T)/3 * I``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._accel import eigvals_sym6, min_gap_sym6, mode_sym6

__all__ = [
    "TensorClass",
    "EigenSystem",
    "to_matrix",
    "from_matrix",
    "trace",
    "deviator",
    "fro_norm",
    "tensor_det",
    "mode",
    "classify",
    "discriminant",
    "eigen_decompose",
    "rotate_tensor",
    "eigenvalues",
    "min_eigen_gap",
]

DEFAULT_MODE_EPS = 1e-6


class TensorClass(Enum):
    LINEAR = "Linear"
    PLANAR = "Planar"
    NEUTRAL = "Neutral"
    LINEAR_DEGENERATE = "LinearDegenerate"
    PLANAR_DEGENERATE = "PlanarDegenerate"
    TRIPLE_DEGENERATE = "TripleDegenerate"


def to_matrix(t6: np.ndarray) -> np.ndarray:
    """Expand component vectors ``(..., 6)`` into full matrices ``(..., 3, 3)``."""
    t6 = np.asarray(t6, dtype=np.float64)
    xx, yy, zz = t6[..., 0], t6[..., 1], t6[..., 2]
    xy, yz, xz = t6[..., 3], t6[..., 4], t6[..., 5]
    m = np.empty(t6.shape[:-1] + (3, 3), dtype=np.float64)
    m[..., 0, 0], m[..., 1, 1], m[..., 2, 2] = xx, yy, zz
    m[..., 0, 1] = m[..., 1, 0] = xy
    m[..., 1, 2] = m[..., 2, 1] = yz
    m[..., 0, 2] = m[..., 2, 0] = xz
    return m


def from_matrix(m: np.ndarray) -> np.ndarray:
    """Collapse symmetric matrices ``(..., 3, 3)`` to component vectors.

    The input is symmetrized first, so small asymmetries from round-off in
    rotations do not leak into the component form.
    """
    m = np.asarray(m, dtype=np.float64)
    s = 0.5 * (m + np.swapaxes(m, -1, -2))
    return np.stack(
        [
            s[..., 0, 0],
            s[..., 1, 1],
            s[..., 2, 2],
            s[..., 0, 1],
            s[..., 1, 2],
            s[..., 0, 2],
        ],
        axis=-1,
    )


def trace(t6: np.ndarray) -> np.ndarray:
    t6 = np.asarray(t6, dtype=np.float64)
    return t6[..., 0] + t6[..., 1] + t6[..., 2]


def deviator(t6: np.ndarray) -> np.ndarray:
    """Traceless part ``T - tr(T)/3 * I``.

    The zz component is rebuilt as ``-(xx + yy)`` after the subtraction,
    which pins the floating-point trace to exactly zero and makes the map
    idempotent bit for bit.
    """
    t6 = np.asarray(t6, dtype=np.float64)
    out = t6.copy()
    m = trace(t6) / 3.0
    out[..., 0] -= m
    out[..., 1] -= m
    out[..., 2] = -(out[..., 0] + out[..., 1])
    return out


def fro_norm(t6: np.ndarray) -> np.ndarray:
    t6 = np.asarray(t6, dtype=np.float64)
    return np.sqrt(
        t6[..., 0] ** 2
        + t6[..., 1] ** 2
        + t6[..., 2] ** 2
        + 2.0 * (t6[..., 3] ** 2 + t6[..., 4] ** 2 + t6[..., 5] ** 2)
    )


def tensor_det(t6: np.ndarray) -> np.ndarray:
    t6 = np.asarray(t6, dtype=np.float64)
    xx, yy, zz = t6[..., 0], t6[..., 1], t6[..., 2]
    xy, yz, xz = t6[..., 3], t6[..., 4], t6[..., 5]
    return (
        xx * (yy * zz - yz * yz)
        - xy * (xy * zz - yz * xz)
        + xz * (xy * yz - yy * xz)
    )


def mode(t6: np.ndarray):
    """Anisotropy mode ``3*sqrt(6)*det(A)/|A|_F^3`` of the deviator ``A``.

    Returns values in ``[-1, 1]``; ``+1`` and ``-1`` are the linear and
    planar degenerate limits.  A vanishing deviator has no defined mode and
    yields ``NaN`` (triple degenerate point).
    """
    return mode_sym6(np.asarray(t6, dtype=np.float64))


def eigenvalues(t6: np.ndarray) -> np.ndarray:
    """Closed-form eigenvalues sorted descending, shape ``(..., 3)``."""
    return eigvals_sym6(np.asarray(t6, dtype=np.float64))


def min_eigen_gap(t6: np.ndarray):
    return min_gap_sym6(np.asarray(t6, dtype=np.float64))


def classify(t6: np.ndarray, eps: float = DEFAULT_MODE_EPS):
    """Classify tensors by mode with tolerance ``eps`` around 0 and +-1.

    Scalar input gives a single TensorClass, batches give an object array.
    """
    mu = np.atleast_1d(mode(t6))
    out = np.empty(mu.shape, dtype=object)
    nan = np.isnan(mu)
    out[nan] = TensorClass.TRIPLE_DEGENERATE
    out[~nan & (mu >= 1.0 - eps)] = TensorClass.LINEAR_DEGENERATE
    out[~nan & (mu <= -1.0 + eps)] = TensorClass.PLANAR_DEGENERATE
    mid = ~nan & (mu < 1.0 - eps) & (mu > -1.0 + eps)
    out[mid & (np.abs(mu) <= eps)] = TensorClass.NEUTRAL
    out[mid & (mu > eps)] = TensorClass.LINEAR
    out[mid & (mu < -eps)] = TensorClass.PLANAR
    if np.asarray(t6).ndim == 1:
        return out[0]
    return out


def discriminant(t6: np.ndarray):
    """Squared product of deviator eigenvalue differences.

    Non-negative, and zero exactly at degenerate tensors.
    """
    ev = eigenvalues(deviator(t6))
    d = (ev[..., 0] - ev[..., 1]) * (ev[..., 1] - ev[..., 2]) * (ev[..., 0] - ev[..., 2])
    return d * d


@dataclass
class EigenSystem:
    """Descending eigenvalues with a right-handed orthonormal eigenframe.

    ``vectors[:, k]`` is the unit eigenvector of ``values[k]``; the frame
    has determinant +1 so it can be carried around as a rotation.
    """

    values: np.ndarray
    vectors: np.ndarray


def eigen_decompose(t6: np.ndarray, residual_tol: float = 1e-9) -> EigenSystem:
    """Full eigensystem of one tensor with a verified reconstruction.

    Raises
    ------
    ValueError
        If the spectral reconstruction misses by more than
        ``residual_tol * max(1, |T|_F)``.
    """
    t6 = np.asarray(t6, dtype=np.float64)
    m = to_matrix(t6)
    w, v = np.linalg.eigh(m)
    order = [2, 1, 0]  # eigh sorts ascending
    values = w[order]
    vectors = v[:, order]
    if np.linalg.det(vectors) < 0.0:
        vectors = vectors.copy()
        vectors[:, 2] = -vectors[:, 2]
    recon = vectors @ np.diag(values) @ vectors.T
    scale = max(1.0, float(fro_norm(t6)))
    if not np.all(np.abs(recon - m) <= residual_tol * scale):
        raise ValueError("eigen reconstruction residual exceeds tolerance")
    return EigenSystem(values=values, vectors=vectors)


def rotate_tensor(t6: np.ndarray, rot: np.ndarray) -> np.ndarray:
    """Conjugate tensors by a rotation: ``T' = R T R^T`` componentwise."""
    m = to_matrix(t6)
    rot = np.asarray(rot, dtype=np.float64)
    return from_matrix(rot @ m @ rot.T)
