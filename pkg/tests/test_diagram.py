import numpy as np
import pytest

from conftest import trefoil_points
from tensortopo.curves import Polyline3, linking_integral
from tensortopo.diagram import (
    Crossing,
    DiagramError,
    IntractableDiagram,
    Knottedness,
    LaurentPoly,
    LinkDiagram,
    is_knotted,
    jones_polynomial,
    project_to_diagram,
    simplify_diagram,
)


def circle(n=64, radius=1.0, center=(0, 0, 0), plane="xy"):
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    c, s = radius * np.cos(t), radius * np.sin(t)
    z = np.zeros(n)
    cols = {"xy": (c, s, z), "xz": (c, z, s), "yz": (z, c, s)}[plane]
    return Polyline3(np.column_stack(cols) + np.asarray(center, dtype=float), closed=True)


def trefoil(n=400):
    return Polyline3(trefoil_points(n), closed=True)


def figure_eight(n=600):
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    w = 2.0 + np.cos(2 * t)
    return Polyline3(
        np.column_stack([w * np.cos(3 * t), w * np.sin(3 * t), np.sin(4 * t)]),
        closed=True,
    )


def kinked_unknot(n=800):
    # an epitrochoid whose 14 petal loops are pure Reidemeister-I kinks;
    # the depth phase keeps the 3D curve embedded
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    return Polyline3(
        np.column_stack(
            [
                np.cos(t) + 0.15 * np.cos(15 * t),
                np.sin(t) + 0.15 * np.sin(15 * t),
                0.05 * np.sin(29 * t + 0.4),
            ]
        ),
        closed=True,
    )


def torus_knot_2q(q, n=600):
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    w = 2.0 + np.cos(q * t)
    return Polyline3(
        np.column_stack([w * np.cos(2 * t), w * np.sin(2 * t), np.sin(q * t)]),
        closed=True,
    )


class TestLaurentPoly:
    def test_text_forms(self):
        assert LaurentPoly().text() == "0"
        assert LaurentPoly({0: 1}).text() == "1"
        assert LaurentPoly({0: -3}).text() == "-3"
        assert LaurentPoly({2: 1}).text() == "t"
        assert LaurentPoly({2: -1}).text() == "-t"
        assert LaurentPoly({6: 2}).text() == "2t^3"
        assert LaurentPoly({-8: -1, -6: 1, -2: 1}).text() == "-t^-4 + t^-3 + t^-1"
        assert LaurentPoly({-1: -1, 1: -1}).text() == "-t^-1/2 - t^1/2"

    def test_zero_coefficients_dropped(self):
        assert LaurentPoly({4: 0, 0: 1}) == LaurentPoly.one()

    def test_arithmetic(self):
        a = LaurentPoly({2: 1})
        b = LaurentPoly({-2: 1})
        assert (a * b).is_one()
        assert (a + (-a)) == LaurentPoly()
        assert hash(a) != hash(b)


class TestProjection:
    def test_planar_circle_has_no_crossings(self):
        d = project_to_diagram([circle(100)])
        assert d.n_crossings == 0

    def test_trefoil_minimal_diagram(self):
        d = project_to_diagram([trefoil()])
        assert d.n_crossings == 3
        assert {c.sign for c in d.crossings} == {-1}

    def test_stacked_circles_two_crossings(self):
        top = circle(64, center=(1.0, 0.0, 1.0))
        d = project_to_diagram([circle(64), top])
        assert d.n_crossings == 2

    def test_deterministic_for_seed(self):
        d1 = project_to_diagram([trefoil()], seed=5)
        d2 = project_to_diagram([trefoil()], seed=5)
        assert d1.crossings == d2.crossings

    def test_open_curve_rejected(self):
        pts = np.column_stack([np.linspace(0, 1, 8), np.zeros(8), np.zeros(8)])
        with pytest.raises(DiagramError, match="closed"):
            project_to_diagram([Polyline3(pts, closed=False)])

    def test_crossing_signs_match_linking(self):
        c1 = circle(200)
        c2 = circle(200, center=(1, 0, 0), plane="xz")
        d = project_to_diagram([c1, c2])
        cross_sum = sum(
            c.sign for c in d.crossings if c.over[0] != c.under[0]
        )
        assert cross_sum / 2 == round(linking_integral(c1, c2))


class TestSimplify:
    def _kink_diagram(self, sign):
        pts = np.column_stack([np.cos(np.linspace(0, 2 * np.pi, 8, endpoint=False)),
                               np.sin(np.linspace(0, 2 * np.pi, 8, endpoint=False))])
        return LinkDiagram(
            [pts], [Crossing(over=(0, 1.5), under=(0, 6.5), sign=sign, pos=(0.0, 0.0))]
        )

    def test_single_kink_removed(self):
        for sign in (1, -1):
            out = simplify_diagram(self._kink_diagram(sign))
            assert out.n_crossings == 0

    def test_stacked_circles_reduce_to_zero(self):
        d = project_to_diagram([circle(64), circle(64, center=(1.0, 0.0, 1.0))])
        assert simplify_diagram(d).n_crossings == 0

    def test_trefoil_unchanged(self):
        d = project_to_diagram([trefoil()])
        assert simplify_diagram(d).n_crossings == 3

    def test_clasp_not_removed(self):
        # same-sign double crossing between two strands must survive
        ring = np.column_stack([np.cos(np.linspace(0, 2 * np.pi, 8, endpoint=False)),
                                np.sin(np.linspace(0, 2 * np.pi, 8, endpoint=False))])
        d = LinkDiagram(
            [ring, ring + 2.0],
            [
                Crossing(over=(0, 0.5), under=(1, 0.5), sign=1, pos=(0.0, 0.0)),
                Crossing(over=(0, 4.5), under=(1, 4.5), sign=1, pos=(1.0, 0.0)),
            ],
        )
        assert simplify_diagram(d).n_crossings == 2

    def test_kinked_unknot_fully_reduces(self):
        d = project_to_diagram([kinked_unknot()])
        assert d.n_crossings == 14
        assert simplify_diagram(d).n_crossings == 0


class TestJones:
    def test_unknot(self):
        assert jones_polynomial(project_to_diagram([circle()])).text() == "1"

    def test_two_component_unlink(self):
        d = project_to_diagram([circle(), circle(64, center=(5, 0, 0))])
        assert jones_polynomial(d).text() == "-t^-1/2 - t^1/2"

    def test_unlink_via_stacked_circles(self):
        d = project_to_diagram([circle(64), circle(64, center=(1.0, 0.0, 1.0))])
        assert jones_polynomial(d).text() == "-t^-1/2 - t^1/2"

    def test_trefoil_and_mirror(self):
        left = jones_polynomial(project_to_diagram([trefoil()]))
        right = jones_polynomial(project_to_diagram([trefoil().mirrored()]))
        assert left.text() == "-t^-4 + t^-3 + t^-1"
        assert right.text() == "t + t^3 - t^4"
        assert right == LaurentPoly({-k: v for k, v in left.coeffs.items()})

    def test_figure_eight_exact(self):
        # amphichiral, so the value is independent of any chirality choice
        d = project_to_diagram([figure_eight()])
        assert jones_polynomial(d).text() == "t^-2 - t^-1 + 1 - t + t^2"

    def test_hopf_link_matches_linking_sign(self):
        c1 = circle(200)
        c2 = circle(200, center=(1, 0, 0), plane="xz")
        d = project_to_diagram([c1, c2])
        assert jones_polynomial(d).text() == "-t^-5/2 - t^-1/2"

    def test_invariant_across_seeds(self):
        for curve in (trefoil(), figure_eight()):
            polys = {
                jones_polynomial(project_to_diagram([curve], seed=s))
                for s in range(10)
            }
            assert len(polys) == 1

    def test_equals_jones_of_simplified(self):
        d = project_to_diagram([kinked_unknot()])
        assert jones_polynomial(d) == jones_polynomial(simplify_diagram(d))
        d = project_to_diagram([trefoil()])
        assert jones_polynomial(d) == jones_polynomial(simplify_diagram(d))

    def test_budget_exceeded(self):
        d = project_to_diagram([torus_knot_2q(17)])
        assert d.n_crossings == 17
        with pytest.raises(IntractableDiagram):
            jones_polynomial(d)

    def test_budget_can_be_raised(self):
        d = project_to_diagram([torus_knot_2q(17)])
        poly = jones_polynomial(d, max_crossings=17)
        assert not poly.is_one()
        keys = sorted(poly.coeffs)
        assert keys[0] == -50 and keys[-1] == -16


class TestIsKnotted:
    def test_circle_unknotted(self):
        assert is_knotted(circle()) is Knottedness.UNKNOTTED

    def test_trefoil_knotted(self):
        assert is_knotted(trefoil()) is Knottedness.KNOTTED

    def test_kinked_unknot(self):
        assert is_knotted(kinked_unknot()) is Knottedness.UNKNOTTED

    def test_budget_gives_unresolved(self):
        assert is_knotted(torus_knot_2q(17)) is Knottedness.UNRESOLVED

    def test_open_curve_rejected(self):
        pts = np.column_stack([np.linspace(0, 1, 8), np.zeros(8), np.zeros(8)])
        with pytest.raises(ValueError, match="closed"):
            is_knotted(Polyline3(pts, closed=False))
