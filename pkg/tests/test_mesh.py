"""Triangulation, refinement and mesh quadrature."""
from __future__ import annotations

import math

import numpy as np
import pytest

from svsection.geometry import Polygon, SectionSpec, analytic_props, normalize_section
from svsection.mesh import (
    BoundaryLoop,
    TriMesh,
    mesh_props,
    refine,
    triangulate,
    validate_mesh,
)

from conftest import MAT, make_spec, observed_orders


def two_triangle_square() -> TriMesh:
    nodes = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    tris = np.array([[0, 1, 2], [0, 2, 3]])
    loop = BoundaryLoop(np.array([0, 1, 2, 3]))
    return TriMesh(nodes, tris, [loop])


class TestTriangulate:
    def test_unit_square_exact_area(self):
        mesh = triangulate(make_spec("square"), 0.6)
        validate_mesh(mesh)
        # 4 nodes per side at this target, area preserved exactly
        assert mesh.n_nodes == 16
        assert mesh.areas.sum() == pytest.approx(1.0, abs=0)
        assert mesh.h <= 0.6

    def test_circle_area_deficit(self):
        mesh = triangulate(make_spec("circle"), 0.1)
        validate_mesh(mesh)
        assert abs(mesh.areas.sum() - math.pi) / math.pi <= 0.01

    def test_annulus_topology(self):
        mesh = triangulate(make_spec("annulus"), 0.15)
        validate_mesh(mesh)
        tags = sorted(lp.tag for lp in mesh.loops)
        assert tags == ["hole(0)", "outer"]
        edges = {
            tuple(sorted(e))
            for t in mesh.triangles
            for e in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0]))
        }
        euler = mesh.n_nodes - len(edges) + mesh.n_elements
        assert euler == 0  # annular topology

    def test_polygon_with_hole_meshes_conformally(self):
        poly = Polygon(
            [(-1, -1), (1, -1), (1, 1), (-1, 1)],
            [[(-0.4, -0.4), (-0.4, 0.4), (0.4, 0.4), (0.4, -0.4)]],
        )
        spec = normalize_section(SectionSpec("holed", poly, MAT))
        mesh = triangulate(spec, 0.2)
        validate_mesh(mesh)
        assert mesh.areas.sum() == pytest.approx(4.0 - 0.64, rel=1e-14)
        assert [lp.tag for lp in mesh.loops] == ["outer", "hole(0)"]

    def test_h_target_validation(self):
        with pytest.raises(ValueError, match="h_target"):
            triangulate(make_spec("circle"), 0.0)
        with pytest.raises(ValueError, match="h_target"):
            triangulate(make_spec("circle"), 5.0)

    def test_requires_normalized_spec(self):
        from svsection.geometry import Circle

        with pytest.raises(ValueError, match="normalize"):
            triangulate(SectionSpec("c", Circle(1.0), MAT), 0.1)

    def test_element_budget_rejection(self):
        with pytest.raises(ValueError, match="budget"):
            triangulate(make_spec("circle"), 0.01, max_elements=100)

    def test_budget_env_override(self, monkeypatch):
        from svsection.mesh import ELEMENT_BUDGET_ENV

        monkeypatch.setenv(ELEMENT_BUDGET_ENV, "100")
        with pytest.raises(ValueError, match="budget"):
            triangulate(make_spec("circle"), 0.01)

    def test_sliver_polygon_rejected(self):
        spec = normalize_section(
            SectionSpec("sliver", Polygon([(0, 0), (10, 0), (10, 1)]), MAT)
        )
        with pytest.raises(ValueError, match="angle"):
            triangulate(spec, 1.0)


class TestRefine:
    def test_two_triangle_square(self):
        mesh = refine(two_triangle_square())
        validate_mesh(mesh)
        assert mesh.n_elements == 8
        assert mesh.n_nodes == 9
        assert mesh.areas.sum() == pytest.approx(1.0, abs=0)

    def test_circle_area_error_quartered(self):
        m0 = triangulate(make_spec("circle"), 0.2)
        m1 = refine(m0)
        e0 = math.pi - m0.areas.sum()
        e1 = math.pi - m1.areas.sum()
        assert 3.5 <= e0 / e1 <= 4.5

    def test_deterministic(self):
        m = triangulate(make_spec("circle"), 0.3)
        a = refine(refine(m))
        b = refine(refine(m))
        assert np.array_equal(a.nodes, b.nodes)
        assert np.array_equal(a.triangles, b.triangles)
        assert a.n_nodes == b.n_nodes

    def test_boundary_stays_snapped(self):
        mesh = triangulate(make_spec("ellipse"), 0.4)
        for _ in range(3):
            mesh = refine(mesh)
            validate_mesh(mesh)  # includes the snap check

    def test_h_roughly_halves(self):
        m0 = triangulate(make_spec("circle"), 0.2)
        m1 = refine(m0)
        assert m1.h <= 0.55 * m0.h


class TestMeshProps:
    def test_square_exact(self):
        p = mesh_props(two_triangle_square())
        assert p.A == pytest.approx(1.0, abs=0)
        assert p.Jo == pytest.approx(1 / 6, rel=1e-15)

    def test_circle_jo_converges(self):
        mesh = refine(triangulate(make_spec("circle"), 0.1))
        p = mesh_props(mesh)
        assert abs(p.Jo - math.pi / 2) / (math.pi / 2) <= 0.01

    def test_l_polygon_matches_green_exactly(self):
        spec = make_spec("L")
        mesh = triangulate(spec, 0.2)
        pm = mesh_props(mesh)
        pa = analytic_props(spec)
        assert pm.A == pytest.approx(pa.A, rel=1e-12)
        assert pm.I1 == pytest.approx(pa.I1, rel=1e-12)
        assert pm.I2 == pytest.approx(pa.I2, rel=1e-12)
        assert pm.I12 == pytest.approx(0.0, abs=1e-12 * pa.Jo)

    @pytest.mark.parametrize("name", ["circle", "ellipse"])
    def test_convergence_order_at_least_1p8(self, name):
        spec = make_spec(name)
        exact = analytic_props(spec)
        meshes = [triangulate(spec, 0.4)]
        for _ in range(3):
            meshes.append(refine(meshes[-1]))
        errA = [abs(mesh_props(m).A - exact.A) for m in meshes]
        errJ = [abs(mesh_props(m).Jo - exact.Jo) for m in meshes]
        assert observed_orders(errA).min() >= 1.8
        assert observed_orders(errJ).min() >= 1.8
