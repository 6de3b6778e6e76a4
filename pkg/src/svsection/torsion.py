"""Uniform torsion of a meshed section in stress-function form.

With the twist normalization G*theta = 1 the stress potential phi minimizes

    int (|grad phi|^2 / 2 - 2 phi) dA  -  2 sum_k c_k A_k

over nodal fields vanishing on the outer boundary and taking one floating
constant c_k on each hole loop (A_k is the hole area, which makes the hole
circulation condition the natural condition of the solve). Stresses are the
rotated gradient s = (dphi/dx2, -dphi/dx1); the twisting moment equals the
torsion constant Jt = 2 int phi dA + 2 sum_k c_k A_k.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import factors
from .fem import assemble, gradient_field, solve_dirichlet
from .fields import TangentialStressField
from .mesh import TriMesh

__all__ = [
    "TorsionSolution",
    "solve_torsion",
    "equality_deviation",
    "rotation_coefficient",
]


@dataclass
class TorsionSolution:
    """Stress function, hole constants, stresses and torsion constant under
    the G*theta = 1 normalization."""

    mesh: TriMesh
    phi: np.ndarray
    hole_constants: np.ndarray
    stress: TangentialStressField
    Mt: float
    Jt: float

    @property
    def gradient_energy(self) -> float:
        """int |grad phi|^2 dA; equals Jt at the converged solve."""
        g = gradient_field(self.mesh, self.phi)
        return float(np.sum(self.mesh.areas * (g**2).sum(axis=1)))


def solve_torsion(mesh: TriMesh, rtol: float = 1e-10, method: str = "auto") -> TorsionSolution:
    """Solve the torsion problem on a normalized section mesh."""
    sys = assemble(mesh, source=-2.0)
    outer = mesh.outer_loop.nodes
    holes = [lp.nodes for lp in mesh.hole_loops]
    hole_areas = [mesh.loop_polygon_area(lp) for lp in mesh.hole_loops]
    phi, constants = solve_dirichlet(
        sys,
        dirichlet_nodes=outer,
        dirichlet_values=np.zeros(len(outer)),
        hole_groups=holes,
        hole_loads=[2.0 * a for a in hole_areas],
        rtol=rtol,
        method=method,
    )
    g = gradient_field(mesh, phi)
    stress = TangentialStressField(
        mesh=mesh,
        values=np.column_stack([g[:, 1], -g[:, 0]]),
        origin="torsion",
        normalization="G*theta = 1",
    )
    phi_int = float(np.sum(mesh.areas / 3.0 * phi[mesh.triangles].sum(axis=1)))
    Jt = 2.0 * phi_int + 2.0 * float(np.dot(constants, hole_areas))
    Mt = factors.resultants(stress).Mt
    return TorsionSolution(
        mesh=mesh, phi=phi, hole_constants=constants, stress=stress, Mt=Mt, Jt=Jt
    )


def rotation_coefficient(field: TangentialStressField) -> float:
    """Best coefficient c for approximating the field by the rigid-rotation
    traction c * (-x2, x1), in the field's own piecewise-constant metric."""
    mesh = field.mesh
    w = mesh.areas
    c = mesh.centroids
    rot = np.column_stack([-c[:, 1], c[:, 0]])
    denom = float(np.sum(w * (rot**2).sum(axis=1)))
    if denom == 0.0:
        raise ValueError("degenerate mesh: zero rotational norm")
    return float(np.sum(w * (field.values * rot).sum(axis=1))) / denom


def equality_deviation(field: TangentialStressField) -> float:
    """Relative L2 distance from the nearest rigid-rotation traction field.

    Returns min over c of |s - c*(-x2, x1)| / |s|, evaluated in the
    piecewise-constant element metric (centroid samples of the rotation
    family). Zero means the torsion equality case holds exactly; positive
    values quantify the section's deviation from central symmetry.
    """
    mesh = field.mesh
    energy = float(np.sum(mesh.areas * (field.values**2).sum(axis=1)))
    if energy <= 0.0:
        raise ValueError("equality deviation of a zero-energy field is undefined")
    w = mesh.areas
    cen = mesh.centroids
    rot = np.column_stack([-cen[:, 1], cen[:, 0]])
    cross = float(np.sum(w * (field.values * rot).sum(axis=1)))
    denom = float(np.sum(w * (rot**2).sum(axis=1)))
    dev_sq = 1.0 - cross * cross / (denom * energy)
    return float(np.sqrt(max(dev_sq, 0.0)))
