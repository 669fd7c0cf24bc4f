"""Tests for eigenframe transport and quaternion winding numbers."""

import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tensortopo.curves import Polyline3
from tensortopo.fields import (
    AxisymLoopField,
    ConstantDegenerateField,
    TransformedField,
)
from tensortopo.tensor import eigen_decompose
from tensortopo.winding import (
    FrameQuaternion,
    WindingError,
    WindingNumber,
    frame_quaternion,
    loop_winding,
    point_index,
    transport_winding,
)


def quat_mat(q):
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def random_rotation(rng):
    q = rng.normal(size=4)
    return quat_mat(q / np.linalg.norm(q))


def sym6(t):
    return np.array([t[0, 0], t[1, 1], t[2, 2], t[0, 1], t[1, 2], t[0, 2]])


def ring_xy(n=64, radius=1.0, center=(0.0, 0.0, 0.0)):
    theta = np.linspace(0, 2 * np.pi, n, endpoint=False)
    c = np.asarray(center)
    return c + radius * np.column_stack(
        [np.cos(theta), np.sin(theta), np.zeros(n)]
    )


def tube_ring(n=48, radius=0.3):
    """Transversal circle around the degenerate point (1, 0, 0).

    Oriented so its normal points along +y, the curve tangent there.
    """
    theta = np.linspace(0, 2 * np.pi, n, endpoint=False)
    return np.column_stack(
        [1.0 + radius * np.cos(theta), np.zeros(n), -radius * np.sin(theta)]
    )


def rect_loop(corners, per_edge=40, repeat=1):
    """Axis plane polygon through 2D corners (x, z), walked edge by edge."""
    pts = []
    for _ in range(repeat):
        for i in range(len(corners)):
            a = np.asarray(corners[i], dtype=float)
            b = np.asarray(corners[(i + 1) % len(corners)], dtype=float)
            for t in np.linspace(0, 1, per_edge, endpoint=False):
                pts.append(a + t * (b - a))
    xz = np.asarray(pts)
    return np.column_stack([xz[:, 0], np.zeros(len(xz)), xz[:, 1]])


class ConstField:
    def __call__(self, pts):
        t6 = np.array([3.0, 1.0, 0.0, 0.2, 0.1, 0.05])
        return np.tile(t6, (len(np.atleast_2d(pts)), 1))


class NegatedField:
    def __init__(self, base):
        self.base = base

    def __call__(self, pts):
        return -np.asarray(self.base(pts))


class MidFlipField:
    """Frame rotates by pi about the middle eigenvector over one turn."""

    def __call__(self, pts):
        pts = np.atleast_2d(pts)
        out = np.empty((len(pts), 6))
        for i, p in enumerate(pts):
            th = np.arctan2(p[1], p[0])
            c, s = np.cos(th / 2), np.sin(th / 2)
            r = np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])
            out[i] = sym6(r @ np.diag([3.0, 1.0, 0.0]) @ r.T)
        return out


class TestFrameQuaternion:
    def test_reconstructs_eigenframe(self):
        rng = np.random.default_rng(3)
        flips = [
            np.diag(s)
            for s in ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1))
        ]
        for _ in range(50):
            r0 = random_rotation(rng)
            t = r0 @ np.diag([3.0, 1.0, 0.0]) @ r0.T
            fq = frame_quaternion(eigen_decompose(sym6(t)))
            rec = quat_mat(fq.q)
            err = min(np.abs(rec @ f - r0).max() for f in flips)
            assert err < 1e-9

    def test_rejects_near_degenerate(self):
        for diag in ((1.0, 1.0, 0.0), (3.0, 1.0 + 4e-10, 1.0), (0.0, 0.0, 0.0)):
            t6 = np.array([diag[0], diag[1], diag[2], 0.0, 0.0, 0.0])
            with pytest.raises((WindingError, ValueError)):
                frame_quaternion(eigen_decompose(t6))

    def test_rejects_non_unit_quaternion(self):
        with pytest.raises(ValueError, match="unit"):
            FrameQuaternion(np.array([1.0, 1.0, 0.0, 0.0]))


class TestWindingNumberAlgebra:
    @pytest.mark.parametrize(
        "a, b, prod",
        [
            ("+i", "+j", "+k"),
            ("+j", "+i", "-k"),
            ("+i", "+i", "-1"),
            ("+j", "+j", "-1"),
            ("+k", "+k", "-1"),
            ("+i", "+k", "-j"),
            ("+k", "+i", "+j"),
            ("+1", "-i", "-i"),
            ("-1", "-i", "+i"),
            ("-1", "-1", "+1"),
            ("-j", "+k", "-i"),
        ],
    )
    def test_multiplication_table(self, a, b, prod):
        wa = WindingNumber(a, 0.0)
        wb = WindingNumber(b, 0.0)
        assert (wa * wb).value == prod

    def test_snap_error_takes_maximum(self):
        w = WindingNumber("+i", 0.01) * WindingNumber("+j", 0.07)
        assert w.snap_error == 0.07

    def test_quaternion_accessor(self):
        assert np.array_equal(
            WindingNumber("-k", 0.0).quaternion, [0.0, 0.0, 0.0, -1.0]
        )


class TestTransportWinding:
    def test_constant_field_gives_identity(self):
        w = transport_winding(ConstField(), Polyline3(ring_xy(), closed=True))
        assert w.value == "+1"
        assert w.snap_error < 1e-9

    def test_open_loop_rejected(self):
        line = np.column_stack([np.linspace(0, 1, 8), np.zeros(8), np.zeros(8)])
        with pytest.raises(ValueError, match="closed"):
            transport_winding(ConstField(), Polyline3(line, closed=False))

    def test_wedge_transversal_ring(self):
        f = AxisymLoopField(r0=1.0)
        w = transport_winding(f, Polyline3(tube_ring(), closed=True))
        assert w.value == "+i"
        assert w.snap_error < 1e-6

    def test_zero_snap_tolerance_is_always_ambiguous(self):
        far = ring_xy(radius=0.2, center=(0, 0, 2.0))
        with pytest.raises(WindingError, match="ambiguous snap"):
            transport_winding(
                AxisymLoopField(r0=1.0), Polyline3(far, closed=True), snap_tol=0.0
            )

    def test_loop_through_degeneracy_raises(self):
        # one edge crosses the degenerate circle just off its midpoint, so
        # bisection can refine forever without resolving the frame jump
        loop = np.array(
            [
                [1.0, 1e-3, -0.1],
                [1.0, 1e-3, 0.1],
                [1.3, 0.0, 0.1],
                [1.3, 0.0, -0.1],
            ]
        )
        with pytest.raises(WindingError, match="degenera"):
            transport_winding(
                AxisymLoopField(r0=1.0), Polyline3(loop, closed=True), max_depth=6
            )

    def test_middle_axis_result_warns(self):
        with pytest.warns(UserWarning, match="medium-eigenvector"):
            w = transport_winding(MidFlipField(), Polyline3(ring_xy(), closed=True))
        assert w.value == "+j"

    @settings(max_examples=25, deadline=None)
    @given(
        roll=st.integers(min_value=0, max_value=47),
        frame=st.integers(min_value=0, max_value=3),
        reverse=st.booleans(),
    )
    def test_start_frame_and_direction_invariance(self, roll, frame, reverse):
        pts = np.roll(tube_ring(), roll, axis=0)
        if reverse:
            pts = pts[::-1].copy()
        w = transport_winding(
            AxisymLoopField(r0=1.0),
            Polyline3(pts, closed=True),
            initial_frame=frame,
        )
        assert w.value == "+i"

    @pytest.mark.parametrize("seed", [0, 11, 42])
    def test_rigid_rotation_equivariance(self, seed):
        rng = np.random.default_rng(seed)
        rot = random_rotation(rng)
        f = TransformedField(AxisymLoopField(r0=1.0), rot=rot)
        w = transport_winding(f, Polyline3(tube_ring() @ rot.T, closed=True))
        assert w.value == "+i"


class TestPointIndex:
    def test_wedge_is_plus_i_around_circle(self):
        f = AxisymLoopField(r0=1.0)
        for phi in np.linspace(0, 2 * np.pi, 10, endpoint=False):
            p = (np.cos(phi), np.sin(phi), 0.0)
            tangent = (-np.sin(phi), np.cos(phi), 0.0)
            assert point_index(f, p, tangent, radius=0.3).value == "+i"

    def test_mirror_is_minus_i(self):
        f = AxisymLoopField(r0=1.0, mirror=True)
        w = point_index(f, (1.0, 0, 0), (0, 1.0, 0), radius=0.3)
        assert w.value == "-i"

    def test_tangent_reversal_does_not_flip(self):
        # the classification is a property of the unoriented curve
        f = AxisymLoopField(r0=1.0)
        w = point_index(f, (1.0, 0, 0), (0, -1.0, 0), radius=0.3)
        assert w.value == "+i"

    def test_negated_field_reports_minor_axis(self):
        wedge = NegatedField(AxisymLoopField(r0=1.0))
        mirror = NegatedField(AxisymLoopField(r0=1.0, mirror=True))
        assert point_index(wedge, (1.0, 0, 0), (0, 1.0, 0), radius=0.3).value == "+k"
        assert point_index(mirror, (1.0, 0, 0), (0, 1.0, 0), radius=0.3).value == "-k"

    def test_oversized_radius_retries_smaller(self):
        # radius 2 sweeps through the opposite degenerate point and must
        # fall back to a smaller transversal circle
        f = AxisymLoopField(r0=1.0)
        w = point_index(f, (1.0, 0, 0), (0, 1.0, 0), radius=2.0)
        assert w.value == "+i"

    def test_non_degenerate_center_warns(self):
        f = AxisymLoopField(r0=1.0)
        with pytest.warns(UserWarning, match="not degenerate"):
            w = point_index(f, (0.5, 0, 0), (0, 1.0, 0), radius=0.1)
        assert w.value == "+1"


class TestLoopWinding:
    def test_companion_of_degenerate_circle(self):
        f = AxisymLoopField(r0=1.0)
        loop = Polyline3(f.true_curve(240), closed=True)
        assert loop_winding(f, loop, offset=0.05).value == "+1"

    def test_offset_choice_does_not_matter(self):
        f = AxisymLoopField(r0=1.0)
        loop = Polyline3(f.true_curve(240), closed=True)
        a = loop_winding(f, loop, offset=0.05)
        b = loop_winding(f, loop, offset=0.11)
        assert a.value == b.value

    def test_transversal_ring_links_tube(self):
        f = AxisymLoopField(r0=1.0)
        w = loop_winding(f, Polyline3(tube_ring(), closed=True), offset=0.02)
        assert w.value == "+i"

    def test_open_loop_rejected(self):
        line = np.column_stack([np.linspace(0, 1, 8), np.zeros(8), np.zeros(8)])
        with pytest.raises(ValueError, match="closed"):
            loop_winding(ConstField(), Polyline3(line, closed=False))

    def test_everywhere_degenerate_field_raises(self):
        with pytest.raises(WindingError, match="companion"):
            loop_winding(
                ConstantDegenerateField(), Polyline3(ring_xy(), closed=True)
            )


class TestProductRule:
    """Composing loops at a shared basepoint multiplies raw windings."""

    def test_shared_arc_rectangles(self):
        f = AxisymLoopField(r0=1.0)
        r1 = rect_loop([(0, -1), (2, -1), (2, 1), (0, 1)])
        r2 = rect_loop([(0, -1), (0, 1), (-2, 1), (-2, -1)])
        ru = rect_loop([(0, -1), (2, -1), (2, 1), (0, 1), (-2, 1), (-2, -1)])
        w1 = transport_winding(f, Polyline3(r1, closed=True), canonicalize=False)
        w2 = transport_winding(f, Polyline3(r2, closed=True), canonicalize=False)
        wu = transport_winding(f, Polyline3(ru, closed=True), canonicalize=False)
        assert {w1.value, w2.value} == {"+i", "-i"}
        assert wu.value == "+1"
        # transport acts on the right, so the second loop multiplies from
        # the left; here the factors commute and both orders agree
        assert (w2 * w1).value == wu.value
        assert (w1 * w2).value == wu.value

    def test_double_traversal_squares_the_winding(self):
        f = AxisymLoopField(r0=1.0)
        twice = rect_loop([(0, -1), (2, -1), (2, 1), (0, 1)], repeat=2)
        w = transport_winding(f, Polyline3(twice, closed=True), canonicalize=False)
        assert w.value == "-1"
