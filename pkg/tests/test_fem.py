"""Linear-triangle Poisson assembly and solves."""
from __future__ import annotations

import math

import numpy as np
import pytest

from svsection.fem import (
    LinearSystem,
    SolverError,
    _pcg,
    assemble,
    gradient_field,
    solve_dirichlet,
)
from svsection.mesh import BoundaryLoop, TriMesh, refine, triangulate

from conftest import make_spec


def unit_right_triangle() -> TriMesh:
    nodes = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    tris = np.array([[0, 1, 2]])
    return TriMesh(nodes, tris, [BoundaryLoop(np.array([0, 1, 2]))])


def grid_square(n=8) -> TriMesh:
    from conftest import make_spec

    return triangulate(make_spec("square"), math.sqrt(2) / n)


class TestAssemble:
    def test_reference_element_matrix(self):
        sys = assemble(unit_right_triangle())
        K = sys.stiffness.toarray()
        expected = np.array([[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]])
        assert np.allclose(K, expected, atol=1e-15)

    def test_constant_source_load_sums_to_fA(self):
        mesh = grid_square(6)
        sys = assemble(mesh, source=-2.0)
        assert sys.load.sum() == pytest.approx(-2.0 * mesh.areas.sum(), rel=1e-13)

    def test_row_sums_vanish_before_constraints(self):
        mesh = grid_square(5)
        sys = assemble(mesh)
        rows = np.asarray(sys.stiffness.sum(axis=1)).ravel()
        assert np.max(np.abs(rows)) <= 1e-12

    def test_operator_symmetric(self):
        mesh = grid_square(7)
        K = assemble(mesh).stiffness
        asym = abs(K - K.T)
        assert asym.max() <= 1e-12 * abs(K).max()

    def test_degenerate_triangle_rejected(self):
        nodes = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 1e-16]])
        mesh = TriMesh(nodes, np.array([[0, 1, 2]]), [])
        with pytest.raises(ValueError, match="triangle 0"):
            assemble(mesh)


class TestSolveDirichlet:
    def test_patch_test_linear_field(self):
        mesh = grid_square(6)
        sys = assemble(mesh)
        loop = mesh.outer_loop.nodes
        u, _ = solve_dirichlet(sys, loop, mesh.nodes[loop, 0])
        assert np.max(np.abs(u - mesh.nodes[:, 0])) <= 1e-9

    def test_disk_poisson_center_value(self):
        mesh = refine(triangulate(make_spec("circle"), 0.1))
        sys = assemble(mesh, source=-2.0)
        loop = mesh.outer_loop.nodes
        u, _ = solve_dirichlet(sys, loop, np.zeros(len(loop)))
        center = int(np.argmin(np.hypot(mesh.nodes[:, 0], mesh.nodes[:, 1])))
        assert u[center] == pytest.approx(0.5, rel=0.01)

    def test_annulus_floating_constant(self):
        mesh = refine(triangulate(make_spec("annulus"), 0.1))
        sys = assemble(mesh, source=-2.0)
        outer = mesh.outer_loop.nodes
        hole = mesh.hole_loops[0]
        u, consts = solve_dirichlet(
            sys,
            outer,
            np.zeros(len(outer)),
            hole_groups=[hole.nodes],
            hole_loads=[2.0 * mesh.loop_polygon_area(hole)],
        )
        assert consts[0] == pytest.approx((1.0 - 0.25) / 2.0, rel=5e-3)
        assert np.max(np.abs(u[outer])) == 0.0  # boundary exactly equals data
        assert np.ptp(u[hole.nodes]) == 0.0  # one shared value on the hole

    def test_spd_after_elimination(self):
        mesh = grid_square(4)
        sys = assemble(mesh)
        loop = mesh.outer_loop.nodes
        fixed = np.zeros(mesh.n_nodes, dtype=bool)
        fixed[loop] = True
        free = np.nonzero(~fixed)[0]
        K = sys.stiffness.toarray()[np.ix_(free, free)]
        np.linalg.cholesky(K)  # raises if not SPD

    def test_galerkin_orthogonality(self):
        mesh = refine(triangulate(make_spec("circle"), 0.1))
        rtol = 1e-10
        sys = assemble(mesh, source=-2.0)
        loop = mesh.outer_loop.nodes
        u, _ = solve_dirichlet(sys, loop, np.zeros(len(loop)), rtol=rtol, method="cg")
        fixed = np.zeros(mesh.n_nodes, dtype=bool)
        fixed[loop] = True
        free = np.nonzero(~fixed)[0]
        K = sys.stiffness
        resid = (-sys.load - K @ u)[free]
        bnorm = np.linalg.norm((-sys.load)[free])
        rng = np.random.default_rng(7)
        for _ in range(20):
            v = rng.normal(size=len(free))
            v /= np.linalg.norm(v)
            assert abs(v @ resid) <= rtol * bnorm

    def test_energy_monotone_under_refinement(self):
        mesh = triangulate(make_spec("circle"), 0.3)
        energies = []
        for _ in range(4):
            sys = assemble(mesh, source=-2.0)
            loop = mesh.outer_loop.nodes
            u, _ = solve_dirichlet(sys, loop, np.zeros(len(loop)))
            energies.append(float(u @ (sys.stiffness @ u)))
            mesh = refine(mesh)
        diffs = np.diff(energies)
        assert np.all(diffs >= -1e-10 * energies[-1])

    def test_discrete_maximum_principle_on_disk(self):
        mesh = refine(triangulate(make_spec("circle"), 0.2))
        sys = assemble(mesh, source=-2.0)
        loop = mesh.outer_loop.nodes
        u, _ = solve_dirichlet(sys, loop, np.zeros(len(loop)))
        interior = np.setdiff1d(np.arange(mesh.n_nodes), loop)
        assert np.all(u[interior] > 0.0)

    def test_zero_system_returns_zero(self):
        mesh = grid_square(3)
        sys = assemble(mesh)
        loop = mesh.outer_loop.nodes
        u, _ = solve_dirichlet(sys, loop, np.zeros(len(loop)), method="cg")
        assert np.max(np.abs(u)) == 0.0


class TestPcgFailures:
    def test_indefinite_matrix_detected(self):
        import scipy.sparse as sp

        A = sp.csr_matrix(np.array([[1.0, 0.0], [0.0, -1.0]]))
        with pytest.raises(SolverError, match="indefinite"):
            _pcg(A, np.array([1.0, 1.0]), rtol=1e-10, maxiter=10)

    def test_iteration_cap_carries_history(self):
        mesh = grid_square(6)
        sys = assemble(mesh)
        loop = mesh.outer_loop.nodes
        fixed = np.zeros(mesh.n_nodes, dtype=bool)
        fixed[loop] = True
        free = np.nonzero(~fixed)[0]
        K = sys.stiffness[free][:, free].tocsr()
        b = np.ones(len(free))
        with pytest.raises(SolverError) as err:
            _pcg(K, b, rtol=1e-14, maxiter=2)
        assert err.value.residual_history is not None
        assert len(err.value.residual_history) >= 2


class TestGradientField:
    def test_linear_field_gradient(self):
        mesh = grid_square(5)
        g = gradient_field(mesh, mesh.nodes[:, 0])
        assert np.allclose(g, [1.0, 0.0], atol=1e-13)

    def test_quadratic_field_gradient_consistency(self):
        mesh = grid_square(12)
        u = mesh.nodes[:, 0] ** 2 + mesh.nodes[:, 1] ** 2
        g = gradient_field(mesh, u)
        c = mesh.centroids
        err = np.linalg.norm(g - 2 * c, axis=1)
        assert err.max() <= 2.5 * mesh.h

    def test_constant_field_zero_gradient(self):
        mesh = grid_square(4)
        g = gradient_field(mesh, np.full(mesh.n_nodes, 3.7))
        assert np.max(np.abs(g)) <= 1e-12
