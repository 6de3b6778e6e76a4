"""Scalar Poisson problems on triangle meshes with linear elements.

Solves Laplacian(u) = f with Dirichlet data, including the multiply-connected
variant where every hole boundary carries one shared unknown constant value
(handled by index condensation so the reduced operator stays symmetric
positive definite).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .mesh import TriMesh, edge_midpoints

__all__ = [
    "LinearSystem",
    "SolverError",
    "assemble",
    "solve_dirichlet",
    "gradient_field",
    "DIRECT_SOLVE_LIMIT",
]

DIRECT_SOLVE_LIMIT = 20_000
DEGENERATE_AREA_FACTOR = 1e-14
STAGNATION_WINDOW = 500


class SolverError(RuntimeError):
    """Linear solve failure; carries the residual history when iterating."""

    def __init__(self, message: str, residual_history=None):
        super().__init__(message)
        self.residual_history = (
            None if residual_history is None else np.asarray(residual_history)
        )


@dataclass
class LinearSystem:
    """Unconstrained stiffness operator and load vector for one mesh.

    `stiffness` is the symmetric CSR matrix of grad-grad products; `load` is
    the integral of the source against each nodal basis function. Boundary
    conditions are applied later, in solve_dirichlet.
    """

    mesh: TriMesh
    stiffness: sp.csr_matrix
    load: np.ndarray

    @property
    def n(self) -> int:
        return self.load.shape[0]


def _element_gradients(mesh: TriMesh) -> np.ndarray:
    """Gradients of the three barycentric basis functions, shape (m, 3, 2)."""
    p = mesh.nodes[mesh.triangles]
    g = np.empty((mesh.n_elements, 3, 2))
    for i in range(3):
        e = p[:, (i + 2) % 3] - p[:, (i + 1) % 3]
        g[:, i, 0] = -e[:, 1]
        g[:, i, 1] = e[:, 0]
    g /= (2.0 * mesh.areas)[:, None, None]
    return g


def assemble(mesh: TriMesh, source=0.0) -> LinearSystem:
    """Assemble stiffness and load for a mesh.

    `source` may be a scalar, a per-element array, or a callable f(x, y)
    evaluated with the degree-2 midpoint rule (exact for linear sources).
    """
    areas = mesh.areas
    diam = float(np.max(mesh.nodes.max(axis=0) - mesh.nodes.min(axis=0)))
    tiny = DEGENERATE_AREA_FACTOR * diam * diam
    if np.any(areas <= tiny):
        bad = int(np.argmax(areas <= tiny))
        raise ValueError(f"triangle {bad} is degenerate (area {areas[bad]:.3e})")

    g = _element_gradients(mesh)
    ke = np.einsum("eia,eja->eij", g, g) * areas[:, None, None]
    tris = mesh.triangles
    rows = np.repeat(tris, 3, axis=1).ravel()
    cols = np.tile(tris, (1, 3)).ravel()
    K = sp.coo_matrix(
        (ke.ravel(), (rows, cols)), shape=(mesh.n_nodes, mesh.n_nodes)
    ).tocsr()

    # load: int f * lambda_i with the midpoint rule; lambda_i at the midpoint
    # of edge k is 1/2 for i in {k, k+1} and 0 opposite
    mids = edge_midpoints(mesh)
    if callable(source):
        fq = source(mids[:, :, 0], mids[:, :, 1])
    else:
        src = np.asarray(source, dtype=float)
        if src.ndim == 0:
            fq = np.broadcast_to(src, (mesh.n_elements, 3))
        elif src.shape == (mesh.n_elements,):
            fq = np.broadcast_to(src[:, None], (mesh.n_elements, 3))
        else:
            raise ValueError("source must be scalar, per-element, or callable")
    if not np.all(np.isfinite(fq)):
        raise ValueError("source evaluates to non-finite values")
    w = areas / 3.0
    contrib = np.empty((mesh.n_elements, 3))
    for i in range(3):
        lam = np.zeros(3)
        lam[i] = 0.5
        lam[(i + 2) % 3] = 0.5  # midpoint k touches nodes k and k+1
        contrib[:, i] = w * (fq * lam[None, :]).sum(axis=1)
    load = np.zeros(mesh.n_nodes)
    np.add.at(load, tris.ravel(), contrib.ravel())
    return LinearSystem(mesh=mesh, stiffness=K, load=load)


def _pcg(A: sp.csr_matrix, b: np.ndarray, rtol: float, maxiter: int) -> np.ndarray:
    """Jacobi-preconditioned conjugate gradients, deterministic."""
    d = A.diagonal()
    if np.any(d <= 0):
        raise SolverError("indefiniteness detected: non-positive diagonal entry")
    x = np.zeros_like(b)
    r = b.copy()
    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        return x
    z = r / d
    p = z.copy()
    rz = float(r @ z)
    history = [float(np.linalg.norm(r)) / bnorm]
    best = history[0]
    since_best = 0
    for _ in range(maxiter):
        Ap = A @ p
        pAp = float(p @ Ap)
        if pAp <= 0.0:
            raise SolverError("indefiniteness detected: non-positive curvature", history)
        alpha = rz / pAp
        x += alpha * p
        r -= alpha * Ap
        res = float(np.linalg.norm(r)) / bnorm
        history.append(res)
        if res <= rtol:
            return x
        if res < best:
            best = res
            since_best = 0
        else:
            since_best += 1
            if since_best >= STAGNATION_WINDOW:
                raise SolverError(
                    f"CG stagnated: no residual reduction over {STAGNATION_WINDOW} "
                    f"iterations (residual {res:.3e})",
                    history,
                )
        z = r / d
        rz_new = float(r @ z)
        beta = rz_new / rz
        rz = rz_new
        p = z + beta * p
    raise SolverError(
        f"CG did not converge in {maxiter} iterations (residual {history[-1]:.3e})",
        history,
    )


def solve_dirichlet(
    sys: LinearSystem,
    dirichlet_nodes: np.ndarray,
    dirichlet_values: np.ndarray,
    hole_groups=(),
    hole_loads=(),
    rtol: float = 1e-10,
    method: str = "auto",
) -> tuple[np.ndarray, np.ndarray]:
    """Solve Laplacian(u) = f with prescribed boundary values.

    Parameters
    ----------
    dirichlet_nodes, dirichlet_values : prescribed nodes and their values.
    hole_groups : sequence of node-index arrays; the nodes of each group share
        one floating unknown constant (index condensation).
    hole_loads : extra right-hand-side value added to each floating constant's
        equation (used by the torsion functional's hole-area term).
    method : "auto" (direct under DIRECT_SOLVE_LIMIT unknowns, else CG),
        "direct", or "cg".

    Returns
    -------
    (u, hole_constants): nodal field with boundary values exactly equal to the
    data, and the recovered constant per hole group.
    """
    n = sys.n
    dirichlet_nodes = np.asarray(dirichlet_nodes, dtype=np.int64)
    dirichlet_values = np.asarray(dirichlet_values, dtype=float)
    if dirichlet_nodes.shape != dirichlet_values.shape:
        raise ValueError("dirichlet nodes and values must align")
    hole_groups = [np.asarray(g, dtype=np.int64) for g in hole_groups]
    hole_loads = list(hole_loads)
    if hole_loads and len(hole_loads) != len(hole_groups):
        raise ValueError("hole_loads must align with hole_groups")
    if not hole_loads:
        hole_loads = [0.0] * len(hole_groups)

    slot = np.full(n, -1, dtype=np.int64)
    fixed = np.zeros(n, dtype=bool)
    fixed[dirichlet_nodes] = True
    for g in hole_groups:
        if np.any(fixed[g]):
            raise ValueError("a node is both Dirichlet-fixed and in a hole group")
        fixed[g] = True  # not free individually
    free = np.nonzero(~fixed)[0]
    slot[free] = np.arange(len(free))
    n_red = len(free) + len(hole_groups)
    for k, g in enumerate(hole_groups):
        slot[g] = len(free) + k

    u_c = np.zeros(n)
    u_c[dirichlet_nodes] = dirichlet_values

    keep = slot >= 0
    P = sp.coo_matrix(
        (np.ones(keep.sum()), (np.nonzero(keep)[0], slot[keep])), shape=(n, n_red)
    ).tocsr()

    K = sys.stiffness
    rhs = P.T @ (-sys.load - K @ u_c)
    for k in range(len(hole_groups)):
        rhs[len(free) + k] += hole_loads[k]
    K_red = (P.T @ K @ P).tocsr()

    if method not in ("auto", "direct", "cg"):
        raise ValueError(f"unknown method {method!r}")
    if n_red == 0:
        u_r = np.zeros(0)
    elif method == "direct" or (method == "auto" and n_red < DIRECT_SOLVE_LIMIT):
        u_r = spla.spsolve(K_red.tocsc(), rhs)
        if not np.all(np.isfinite(u_r)):
            raise SolverError("direct factorization produced non-finite values")
    else:
        u_r = _pcg(K_red, rhs, rtol=rtol, maxiter=10 * n_red)

    u = u_c + P @ u_r
    constants = np.array([u_r[len(free) + k] for k in range(len(hole_groups))])
    return u, constants


def gradient_field(mesh: TriMesh, u: np.ndarray) -> np.ndarray:
    """Exact gradient of the piecewise-linear interpolant, one 2-vector per
    element."""
    u = np.asarray(u, dtype=float)
    if u.shape != (mesh.n_nodes,):
        raise ValueError("field length must equal the node count")
    g = _element_gradients(mesh)
    return np.einsum("ei,eia->ea", u[mesh.triangles], g)
