import dataclasses

import numpy as np
import pytest

from conftest import chi_tetrahedralization_oracle
from tensortopo.extract import (
    Linearity,
    NeutralSurface,
    extract_neutral_surface,
    trace_degenerate_curves,
)
from tensortopo.fields import AxisymLoopField, PlaneSheetField, SphereShellField
from tensortopo.mesh import TensorMesh, generate_box, sample_field_onto_mesh
from tensortopo.regions import (
    RelationKind,
    Side,
    assign_curve_region,
    betti,
    compute_relations,
    euler_characteristic,
    region_volume,
    segment_regions,
)


class ConstantField:
    def __init__(self, t6):
        self.t6 = np.asarray(t6, dtype=np.float64)

    def sample(self, points):
        return np.tile(self.t6, (len(points), 1))


def build_case(field_obj, lo, hi, res):
    mesh = sample_field_onto_mesh(generate_box(lo, hi, res), field_obj)
    surface = extract_neutral_surface(mesh)
    regions = segment_regions(mesh, surface)
    return mesh, surface, regions


def betti_all(regions, surface):
    relations = compute_relations(regions, surface)
    return [betti(r, regions, relations) for r in regions], relations


@pytest.fixture(scope="module")
def half_cube():
    return build_case(PlaneSheetField(z0=0.5), (0, 0, 0), (1, 1, 1), 11)


@pytest.fixture(scope="module")
def pocket():
    """Planar solid-torus pocket inside a linear box complement."""
    field_obj = AxisymLoopField(r0=1.0, swirl=-1.0, cap=0.8, width=0.5)
    mesh, surface, regions = build_case(field_obj, (-2, -2, -2), (2, 2, 2), 28)
    return field_obj, mesh, surface, regions


@pytest.fixture(scope="module")
def nested_shells():
    """Two concentric spherical sheets: ball inside shell inside box."""
    return build_case(SphereShellField(radii=(0.8, 1.4)), (-2, -2, -2), (2, 2, 2), 24)


class TestSegmentation:
    def test_uniform_sign_gives_single_region(self):
        mesh, surface, regions = build_case(
            ConstantField([4.0, 1.0, -1.0, 0.0, 0.0, 0.0]), (0, 0, 0), (1, 1, 1), 3
        )
        assert len(regions) == 1
        r = regions[0]
        assert r.linearity == Linearity.LINEAR
        assert len(r.cells) == mesh.n_tets
        assert r.volume == pytest.approx(1.0, abs=1e-12)
        assert r.euler_char == 1
        assert r.boundary_sheets == []

    def test_half_cube_split(self, half_cube):
        mesh, surface, regions = half_cube
        assert len(regions) == 2
        assert [r.linearity for r in regions] == [Linearity.LINEAR, Linearity.PLANAR]
        for r in regions:
            assert r.volume == pytest.approx(0.5, abs=1e-6)

    def test_volumes_sum_to_mesh_volume(self, half_cube, pocket, nested_shells):
        for mesh, _, regions in (half_cube, pocket[1:], nested_shells):
            total = sum(r.volume for r in regions)
            box = mesh.vertices.max(axis=0) - mesh.vertices.min(axis=0)
            assert total == pytest.approx(float(np.prod(box)), rel=1e-6)

    def test_surface_without_cell_data_rejected(self):
        mesh = sample_field_onto_mesh(
            generate_box((0, 0, 0), (1, 1, 1), 2),
            ConstantField([4.0, 1.0, -1.0, 0.0, 0.0, 0.0]),
        )
        bare = NeutralSurface(
            positions=np.zeros((0, 3)),
            triangles=np.zeros((0, 3), dtype=np.int64),
            sheet_ids=np.zeros(0, dtype=np.int64),
            sheet_closed=[],
        )
        with pytest.raises(ValueError, match="crossing"):
            segment_regions(mesh, bare)

    def test_mismatched_surface_rejected(self, half_cube):
        mesh, surface, _ = half_cube
        uncut = sample_field_onto_mesh(
            generate_box((0, 0, 0), (1, 1, 1), 11),
            ConstantField([4.0, 1.0, -1.0, 0.0, 0.0, 0.0]),
        )
        with pytest.raises(ValueError, match="inconsistent"):
            segment_regions(uncut, surface)


class TestVolume:
    def test_pocket_volume_matches_tube_formula(self):
        field_obj = AxisymLoopField(r0=1.0, swirl=-1.0, cap=0.8, width=0.5)
        _, _, regions = build_case(field_obj, (-2, -2, -2), (2, 2, 2), 48)
        pocket_region = next(r for r in regions if r.linearity == Linearity.PLANAR)
        tube = 0.5 / np.sqrt((3.0 * 0.8) ** 2 - 1.0)
        exact = np.pi**2 * tube**2
        assert pocket_region.volume == pytest.approx(exact, rel=0.02)

    def test_open_boundary_rejected(self):
        from tensortopo.regions import Region

        leaky = Region(
            id=0,
            linearity=Linearity.LINEAR,
            cells=[],
            boundary_tris=np.array([[0, 1, 2]]),
            positions=np.eye(3),
        )
        with pytest.raises(RuntimeError, match="open edge"):
            region_volume(leaky)


class TestEulerCharacteristic:
    def test_ball_solid_torus_and_their_union(self, pocket):
        _, _, _, regions = pocket
        by_lin = {r.linearity: r for r in regions}
        assert by_lin[Linearity.PLANAR].euler_char == 0
        assert by_lin[Linearity.LINEAR].euler_char == 1

    def test_ball_chi_is_one(self, half_cube):
        _, _, regions = half_cube
        assert [r.euler_char for r in regions] == [1, 1]

    def test_odd_boundary_sum_rejected(self):
        from tensortopo.regions import Region

        broken = Region(
            id=0,
            linearity=Linearity.LINEAR,
            cells=[],
            boundary_tris=np.array([[0, 1, 2]]),
            positions=np.eye(3),
        )
        with pytest.raises(RuntimeError, match="odd"):
            euler_characteristic(broken)

    @pytest.mark.parametrize(
        "field_obj,res",
        [
            (PlaneSheetField(z0=0.25), 8),
            (AxisymLoopField(r0=1.0, swirl=-1.0, cap=0.8, width=0.5), 9),
            (SphereShellField(radii=(0.8, 1.4)), 9),
        ],
        ids=["plane", "pocket", "shells"],
    )
    def test_chi_matches_tetrahedralization_oracle(self, field_obj, res):
        mesh, surface, regions = build_case(field_obj, (-2, -2, -2), (2, 2, 2), res)
        assert mesh.n_tets <= 5000
        for r in regions:
            assert chi_tetrahedralization_oracle(mesh, surface, r) == r.euler_char


class TestBetti:
    def test_pocket_and_complement(self, pocket):
        _, _, surface, regions = pocket
        numbers, _ = betti_all(regions, surface)
        by_lin = dict(zip([r.linearity for r in regions], numbers))
        assert by_lin[Linearity.PLANAR] == (1, 0)
        assert by_lin[Linearity.LINEAR] == (1, 1)

    def test_plain_balls_have_trivial_homology(self, half_cube):
        _, surface, regions = half_cube
        numbers, _ = betti_all(regions, surface)
        assert numbers == [(0, 0), (0, 0)]

    def test_nested_shells_chain(self, nested_shells):
        _, surface, regions = nested_shells
        numbers, _ = betti_all(regions, surface)
        assert sorted(numbers) == [(0, 0), (0, 1), (0, 1)]
        trivial = next(r for r, n in zip(regions, numbers) if n == (0, 0))
        assert all(bs.side == Side.INNER for bs in trivial.boundary_sheets)

    def test_negative_first_betti_rejected(self):
        from tensortopo.regions import Region

        impossible = Region(
            id=0, linearity=Linearity.LINEAR, cells=[], euler_char=5
        )
        with pytest.raises(RuntimeError, match="inconsistent topology"):
            betti(impossible, [impossible], [])


class TestRelations:
    def test_open_sheet_gives_adjacent_only(self, half_cube):
        _, surface, regions = half_cube
        relations = compute_relations(regions, surface)
        assert [rel.kind for rel in relations] == [RelationKind.ADJACENT]
        assert relations[0].sheets == [0]

    def test_pocket_is_contained(self, pocket):
        _, _, surface, regions = pocket
        relations = compute_relations(regions, surface)
        kinds = [rel.kind for rel in relations]
        assert kinds == [RelationKind.ADJACENT, RelationKind.CONTAINS]
        inside = relations[1]
        assert regions[inside.a].linearity == Linearity.LINEAR
        assert regions[inside.b].linearity == Linearity.PLANAR

    def test_nested_shells_form_containment_chain(self, nested_shells):
        _, surface, regions = nested_shells
        relations = compute_relations(regions, surface)
        contains = [
            (rel.a, rel.b) for rel in relations if rel.kind == RelationKind.CONTAINS
        ]
        assert len(contains) == 2
        assert contains[0][1] == contains[1][0]

    def test_adjacent_regions_have_opposite_linearity(
        self, half_cube, pocket, nested_shells
    ):
        for _, surface, regions in (half_cube, pocket[1:], nested_shells):
            for rel in compute_relations(regions, surface):
                assert regions[rel.a].linearity != regions[rel.b].linearity


class TestCurveAssignment:
    def test_pocket_curve_lands_in_pocket(self, pocket):
        field_obj, mesh, surface, regions = pocket
        curves = trace_degenerate_curves(mesh)
        assert len(curves) == 1
        curve = curves[0]
        assert curve.linearity == Linearity.PLANAR
        rid = assign_curve_region(curve, regions)
        assert regions[rid].linearity == Linearity.PLANAR
        assert regions[rid].euler_char == 0

    def test_single_region_field(self):
        mesh = sample_field_onto_mesh(
            generate_box((-2, -2, -2), (2, 2, 2), 12), AxisymLoopField(r0=1.0)
        )
        surface = extract_neutral_surface(mesh)
        regions = segment_regions(mesh, surface)
        assert len(regions) == 1
        curves = trace_degenerate_curves(mesh)
        assert assign_curve_region(curves[0], regions) == regions[0].id

    def test_unresolved_curve_rejected(self, pocket):
        _, _, _, regions = pocket
        curves = trace_degenerate_curves(pocket[1])
        lost = dataclasses.replace(
            curves[0], tet_ids=[-1] * len(curves[0].tet_ids)
        )
        with pytest.raises(ValueError, match="resolved"):
            assign_curve_region(lost, regions)


class TestOrderInvariance:
    @pytest.mark.parametrize(
        "field_obj,res",
        [
            (PlaneSheetField(z0=0.25), 8),
            (SphereShellField(radii=(0.8, 1.4)), 9),
        ],
        ids=["plane", "shells"],
    )
    def test_summary_invariant_under_tet_shuffle(self, field_obj, res):
        mesh, surface, regions = build_case(field_obj, (-2, -2, -2), (2, 2, 2), res)
        numbers, _ = betti_all(regions, surface)

        rng = np.random.default_rng(7)
        perm = rng.permutation(mesh.n_tets)
        shuffled = TensorMesh(mesh.vertices, mesh.tensors, mesh.tets[perm])
        surface2 = extract_neutral_surface(shuffled)
        regions2 = segment_regions(shuffled, surface2)
        numbers2, _ = betti_all(regions2, surface2)

        def summary(regs, nums):
            return sorted(
                (r.linearity.value, r.euler_char, n, round(r.volume, 9))
                for r, n in zip(regs, nums)
            )

        assert len(regions2) == len(regions)
        assert summary(regions2, numbers2) == summary(regions, numbers)
