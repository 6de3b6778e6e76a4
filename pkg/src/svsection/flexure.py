"""Saint-Venant flexure (shear) of a simply connected section, in stress
variables, for a unit shear resultant along a principal axis.

The stress field is written s = s0 + curl(phi) with curl(phi) =
(dphi/dx2, -dphi/dx1). For load along e2 the particular part is
s0 = (0, -x2^2 / (2 I1)), which carries div s = -x2/I1 and hence a unit
resultant once the mantle is sealed; the potential solves

    Laplacian(phi) = -(nu / (1 + nu)) * x1 / I1

with Dirichlet data accumulated from the mantle condition
(s0 + curl phi) . n = 0 along the outer boundary. Loading along e1 mirrors
the construction (source +(nu/(1+nu)) * x2 / I2). The superposed-twist
compatibility constant is fixed to zero: the Laplacian source is exactly the
one above, with no rigid-rotation term added.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import factors
from .fem import assemble, gradient_field, solve_dirichlet
from .fields import TangentialStressField
from .mesh import TriMesh, mesh_props

__all__ = ["FlexureSolution", "boundary_potential", "particular_field", "solve_flexure"]

CLOSURE_TOL = 1e-10


@dataclass
class FlexureSolution:
    """Flexure stress state for unit shear resultant along `direction`."""

    mesh: TriMesh
    potential: np.ndarray
    stress: TangentialStressField
    direction: str
    nu: float
    resultant: tuple[float, float]  # realized (T1, T2) from quadrature
    target: float = 1.0


def particular_field(direction: str, inertia: float):
    """The divergence-carrying particular stress s0 for a unit resultant."""
    if direction == "e2":
        return lambda x1, x2: np.stack(
            [np.zeros_like(x1), -(x2**2) / (2.0 * inertia)], axis=-1
        )
    if direction == "e1":
        return lambda x1, x2: np.stack(
            [-(x1**2) / (2.0 * inertia), np.zeros_like(x2)], axis=-1
        )
    raise ValueError(f"direction must be 'e1' or 'e2', got {direction!r}")


def boundary_potential(mesh: TriMesh, direction: str, inertia: float) -> np.ndarray:
    """Dirichlet data for the curl potential, per outer-loop node.

    Accumulates g(P) = -int s0 . n dtau counterclockwise from the loop's first
    node (the mantle condition turns into dphi/dtau = -s0 . n). The values
    align with mesh.outer_loop.nodes. The loop closure defect must vanish --
    it equals the integral of div s0, which is zero because the centroid is at
    the origin -- and is checked against CLOSURE_TOL.
    """
    if mesh.hole_loops:
        raise ValueError("flexure requires a simply connected section (no holes)")
    if not (inertia > 0):
        raise ValueError("inertia must be positive")
    s0 = particular_field(direction, inertia)

    loop = mesh.outer_loop.nodes
    p = mesh.nodes[loop]
    q = np.roll(p, -1, axis=0)
    t = q - p
    # outward normal of a counterclockwise loop
    normal = np.column_stack([t[:, 1], -t[:, 0]])
    # Simpson on each straight edge: s0 . n is quadratic along the edge
    flux = np.zeros(len(loop))
    for u, wgt in ((0.0, 1.0 / 6.0), (0.5, 4.0 / 6.0), (1.0, 1.0 / 6.0)):
        pt = p + u * t
        s = s0(pt[:, 0], pt[:, 1])
        flux += wgt * (s * normal).sum(axis=1)

    g = np.concatenate([[0.0], -np.cumsum(flux)])
    defect = abs(g[-1])
    g = g[:-1]
    scale = float(np.max(np.abs(g))) or 1.0
    if defect > CLOSURE_TOL * scale:
        raise ValueError(
            f"boundary data fails to close (defect {defect:.3e}); "
            "is the section normalized?"
        )
    return g


def solve_flexure(
    mesh: TriMesh,
    nu: float,
    direction: str = "e2",
    rtol: float = 1e-10,
    method: str = "auto",
) -> FlexureSolution:
    """Solve the flexure problem for a unit shear resultant.

    The realized resultant is not imposed; it comes out of the divergence
    identity and is returned from quadrature (1 + O(h^2) along the load
    direction, O(h^2) transverse).
    """
    if not (-1.0 < nu < 0.5):
        raise ValueError(f"Poisson ratio must lie in (-1, 0.5), got {nu}")
    props = mesh_props(mesh)
    inertia = props.I1 if direction == "e2" else props.I2
    g_data = boundary_potential(mesh, direction, inertia)

    amp = nu / (1.0 + nu)
    if direction == "e2":
        source = lambda x1, x2: -amp * x1 / inertia
    else:
        source = lambda x1, x2: +amp * x2 / inertia
    sys = assemble(mesh, source=source)
    loop = mesh.outer_loop.nodes
    phi, _ = solve_dirichlet(
        sys,
        dirichlet_nodes=loop,
        dirichlet_values=g_data,
        rtol=rtol,
        method=method,
    )

    grad = gradient_field(mesh, phi)
    curl = np.column_stack([grad[:, 1], -grad[:, 0]])
    s0 = particular_field(direction, inertia)
    cen = mesh.centroids
    values = s0(cen[:, 0], cen[:, 1]) + curl
    stress = TangentialStressField(
        mesh=mesh,
        values=values,
        origin="flexure",
        normalization="unit shear resultant, zero superposed twist",
        direction=direction,
    )
    r = factors.resultants(stress)
    return FlexureSolution(
        mesh=mesh,
        potential=phi,
        stress=stress,
        direction=direction,
        nu=nu,
        resultant=(r.T1, r.T2),
    )
