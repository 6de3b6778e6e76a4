"""Conforming triangulations of normalized sections.

Primitives are meshed with mapped structured patterns (disk: concentric
hexagonal rings; annulus: quad rings split to triangles; rectangle: grid with
diagonal split; ellipse: mapped disk). Polygons are seeded by ear clipping and
refined uniformly. Boundary loops are kept as ordered node cycles walking the
domain on the left; curved loops carry their parametric description so
refinement can snap new midpoints back onto the exact boundary.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from . import earcut
from .geometry import (
    Annulus,
    Circle,
    Ellipse,
    Polygon,
    Rectangle,
    SectionProps,
    SectionSpec,
)

__all__ = [
    "TriMesh",
    "BoundaryLoop",
    "CircleBoundary",
    "EllipseBoundary",
    "triangulate",
    "refine",
    "mesh_props",
    "validate_mesh",
    "DEFAULT_ELEMENT_BUDGET",
    "ELEMENT_BUDGET_ENV",
]

DEFAULT_ELEMENT_BUDGET = 2_000_000
ELEMENT_BUDGET_ENV = "SVSECTION_ELEMENT_BUDGET"

MIN_SEED_ANGLE_DEG = 15.0


@dataclass(frozen=True)
class CircleBoundary:
    radius: float

    def snap(self, pts: np.ndarray) -> np.ndarray:
        r = np.hypot(pts[:, 0], pts[:, 1])
        return pts * (self.radius / r)[:, None]

    def distance(self, pts: np.ndarray) -> np.ndarray:
        return np.abs(np.hypot(pts[:, 0], pts[:, 1]) - self.radius)


@dataclass(frozen=True)
class EllipseBoundary:
    a: float
    b: float

    def snap(self, pts: np.ndarray) -> np.ndarray:
        th = np.arctan2(pts[:, 1] / self.b, pts[:, 0] / self.a)
        return np.column_stack([self.a * np.cos(th), self.b * np.sin(th)])

    def distance(self, pts: np.ndarray) -> np.ndarray:
        return np.linalg.norm(pts - self.snap(pts), axis=1)


@dataclass(frozen=True)
class BoundaryLoop:
    """Ordered node cycle along one boundary component.

    Walking the cycle keeps the domain on the left: the outer loop is
    counterclockwise, hole loops are clockwise. `hole` is -1 for the outer
    loop, otherwise the hole index from the section spec.
    """

    nodes: np.ndarray
    hole: int = -1
    curve: CircleBoundary | EllipseBoundary | None = None

    @property
    def is_outer(self) -> bool:
        return self.hole < 0

    @property
    def tag(self) -> str:
        return "outer" if self.is_outer else f"hole({self.hole})"


class TriMesh:
    """Triangulated cross section: node coordinates, CCW triangles, tagged
    boundary loops and the mesh size h (max element circumdiameter)."""

    def __init__(self, nodes: np.ndarray, triangles: np.ndarray, loops):
        self.nodes = np.ascontiguousarray(nodes, dtype=float)
        self.triangles = np.ascontiguousarray(triangles, dtype=np.int64)
        self.loops = tuple(loops)
        if self.nodes.ndim != 2 or self.nodes.shape[1] != 2:
            raise ValueError("nodes must be an (n, 2) array")
        if self.triangles.ndim != 2 or self.triangles.shape[1] != 3:
            raise ValueError("triangles must be an (m, 3) array")
        self._areas: np.ndarray | None = None
        self._centroids: np.ndarray | None = None
        self._h: float | None = None
        self._node_neighbors = None

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_elements(self) -> int:
        return self.triangles.shape[0]

    @property
    def areas(self) -> np.ndarray:
        if self._areas is None:
            p = self.nodes[self.triangles]
            self._areas = 0.5 * (
                (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
                - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0])
            )
        return self._areas

    @property
    def centroids(self) -> np.ndarray:
        if self._centroids is None:
            self._centroids = self.nodes[self.triangles].mean(axis=1)
        return self._centroids

    @property
    def h(self) -> float:
        if self._h is None:
            p = self.nodes[self.triangles]
            la = np.linalg.norm(p[:, 1] - p[:, 0], axis=1)
            lb = np.linalg.norm(p[:, 2] - p[:, 1], axis=1)
            lc = np.linalg.norm(p[:, 0] - p[:, 2], axis=1)
            self._h = float(np.max(la * lb * lc / (2.0 * self.areas)))
        return self._h

    @property
    def outer_loop(self) -> BoundaryLoop:
        for lp in self.loops:
            if lp.is_outer:
                return lp
        raise ValueError("mesh has no outer boundary loop")

    @property
    def hole_loops(self) -> tuple[BoundaryLoop, ...]:
        return tuple(lp for lp in self.loops if not lp.is_outer)

    @property
    def boundary_edges(self) -> list[tuple[tuple[int, int], str]]:
        out = []
        for lp in self.loops:
            ns = lp.nodes
            for k in range(len(ns)):
                out.append(((int(ns[k]), int(ns[(k + 1) % len(ns)])), lp.tag))
        return out

    @property
    def boundary_nodes(self) -> np.ndarray:
        return np.unique(np.concatenate([lp.nodes for lp in self.loops]))

    def node_neighbors(self):
        """Symmetric node adjacency (scipy CSR), cached; excludes self."""
        if self._node_neighbors is None:
            import scipy.sparse as sp

            t = self.triangles
            rows = np.concatenate([t[:, 0], t[:, 1], t[:, 1], t[:, 2], t[:, 2], t[:, 0]])
            cols = np.concatenate([t[:, 1], t[:, 0], t[:, 2], t[:, 1], t[:, 0], t[:, 2]])
            data = np.ones(len(rows))
            adj = sp.coo_matrix((data, (rows, cols)), shape=(self.n_nodes, self.n_nodes))
            adj = adj.tocsr()
            adj.data[:] = 1.0
            self._node_neighbors = adj
        return self._node_neighbors

    def loop_polygon_area(self, loop: BoundaryLoop) -> float:
        """Unsigned area enclosed by the straight-edge polygon of a loop."""
        p = self.nodes[loop.nodes]
        x, y = p[:, 0], p[:, 1]
        x2, y2 = np.roll(x, -1), np.roll(y, -1)
        return abs(0.5 * float(np.sum(x * y2 - x2 * y)))


# ---------------------------------------------------------------------------
# quadrature on meshes (degree-2 exact midpoint rule)


def edge_midpoints(mesh: TriMesh) -> np.ndarray:
    """Per-element edge midpoints, shape (m, 3, 2)."""
    p = mesh.nodes[mesh.triangles]
    return 0.5 * (p + np.roll(p, -1, axis=1))


def integrate_quadratic(mesh: TriMesh, values_at_midpoints: np.ndarray) -> float:
    """Integrate a field given its values at the 3 edge midpoints of every
    element; exact for piecewise-quadratic integrands."""
    return float(np.sum(mesh.areas / 3.0 * values_at_midpoints.sum(axis=1)))


def integrate_nodal(mesh: TriMesh, nodal: np.ndarray) -> float:
    """Integrate a piecewise-linear nodal field exactly."""
    return float(np.sum(mesh.areas / 3.0 * nodal[mesh.triangles].sum(axis=1)))


def mesh_props(mesh: TriMesh) -> SectionProps:
    """Section properties of the meshed domain by exact per-triangle
    quadrature; equals the analytic values up to boundary discretization."""
    mids = edge_midpoints(mesh)
    w = mesh.areas / 3.0
    A = float(np.sum(mesh.areas))
    sx = float(np.sum(w * mids[:, :, 0].sum(axis=1)))
    sy = float(np.sum(w * mids[:, :, 1].sum(axis=1)))
    cx, cy = sx / A, sy / A
    ixx = float(np.sum(w * (mids[:, :, 1] ** 2).sum(axis=1)))
    iyy = float(np.sum(w * (mids[:, :, 0] ** 2).sum(axis=1)))
    ixy = float(np.sum(w * (mids[:, :, 0] * mids[:, :, 1]).sum(axis=1)))
    return SectionProps(
        A=A,
        centroid=(cx, cy),
        I1=ixx - A * cy * cy,
        I2=iyy - A * cx * cx,
        I12=ixy - A * cx * cy,
    )


# ---------------------------------------------------------------------------
# structured primitive meshes


def _fix_orientation(nodes: np.ndarray, tris: np.ndarray) -> np.ndarray:
    p = nodes[tris]
    a2 = (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1]) - (
        p[:, 1, 1] - p[:, 0, 1]
    ) * (p[:, 2, 0] - p[:, 0, 0])
    flip = a2 < 0
    if np.any(flip):
        tris = tris.copy()
        tris[flip, 1], tris[flip, 2] = tris[flip, 2].copy(), tris[flip, 1].copy()
    return tris


def _disk_mesh(radius: float, nr: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Hexagonal-ring disk triangulation: ring j carries 6j nodes."""
    nodes = [np.zeros((1, 2))]
    ring_start = [0] * (nr + 1)
    for j in range(1, nr + 1):
        ring_start[j] = sum(len(a) for a in nodes)
        th = 2.0 * np.pi * np.arange(6 * j) / (6 * j)
        r = radius * j / nr
        nodes.append(np.column_stack([r * np.cos(th), r * np.sin(th)]))
    pts = np.vstack(nodes)

    tris = []
    for j in range(1, nr + 1):
        cj = 6 * j
        ci = 6 * (j - 1)
        for s in range(6):
            for t in range(j):
                o0 = ring_start[j] + (s * j + t) % cj
                o1 = ring_start[j] + (s * j + t + 1) % cj
                if j == 1:
                    tris.append((o0, o1, 0))
                    continue
                i0 = ring_start[j - 1] + (s * (j - 1) + t) % ci
                tris.append((o0, o1, i0))
                if t < j - 1:
                    i1 = ring_start[j - 1] + (s * (j - 1) + t + 1) % ci
                    tris.append((o1, i1, i0))
    tris = np.asarray(tris, dtype=np.int64)
    outer = np.arange(ring_start[nr], ring_start[nr] + 6 * nr, dtype=np.int64)
    return pts, _fix_orientation(pts, tris), outer


def _mesh_disk(radius: float, h_target: float, budget: int) -> TriMesh:
    nr = max(1, math.ceil(1.3 * radius / h_target))
    while True:
        if 6 * nr * nr > budget:
            raise ValueError(
                f"meshing the disk at h={h_target} needs more than the element "
                f"budget of {budget} triangles"
            )
        pts, tris, outer = _disk_mesh(radius, nr)
        mesh = TriMesh(pts, tris, [BoundaryLoop(outer, curve=CircleBoundary(radius))])
        if mesh.h <= h_target:
            return mesh
        nr = max(nr + 1, math.ceil(nr * mesh.h / h_target))


def _mesh_ellipse(a: float, b: float, h_target: float, budget: int) -> TriMesh:
    nr = max(1, math.ceil(1.3 * max(a, b) / h_target))
    while True:
        if 6 * nr * nr > budget:
            raise ValueError(
                f"meshing the ellipse at h={h_target} needs more than the element "
                f"budget of {budget} triangles"
            )
        pts, tris, outer = _disk_mesh(1.0, nr)
        pts = pts * np.array([a, b])
        mesh = TriMesh(pts, tris, [BoundaryLoop(outer, curve=EllipseBoundary(a, b))])
        if mesh.h <= h_target:
            return mesh
        nr = max(nr + 1, math.ceil(nr * mesh.h / h_target))


def _mesh_rectangle(width: float, height: float, h_target: float, budget: int) -> TriMesh:
    s = h_target / math.sqrt(2.0)
    nx = max(1, math.ceil(width / s))
    ny = max(1, math.ceil(height / s))
    if 2 * nx * ny > budget:
        raise ValueError(
            f"meshing the rectangle at h={h_target} needs more than the element "
            f"budget of {budget} triangles"
        )
    xs = np.linspace(-width / 2.0, width / 2.0, nx + 1)
    ys = np.linspace(-height / 2.0, height / 2.0, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    pts = np.column_stack([X.ravel(), Y.ravel()])

    def idx(i, j):
        return j * (nx + 1) + i

    tris = []
    for j in range(ny):
        for i in range(nx):
            tris.append((idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)))
            tris.append((idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)))
    loop = (
        [idx(i, 0) for i in range(nx)]
        + [idx(nx, j) for j in range(ny)]
        + [idx(i, ny) for i in range(nx, 0, -1)]
        + [idx(0, j) for j in range(ny, 0, -1)]
    )
    return TriMesh(
        pts,
        np.asarray(tris, dtype=np.int64),
        [BoundaryLoop(np.asarray(loop, dtype=np.int64))],
    )


def _mesh_annulus(outer_r: float, inner_r: float, h_target: float, budget: int) -> TriMesh:
    s = h_target / math.sqrt(2.0)
    nt = max(8, math.ceil(2.0 * np.pi * outer_r / s))
    nr = max(1, math.ceil((outer_r - inner_r) / s))
    while True:
        if 2 * nt * nr > budget:
            raise ValueError(
                f"meshing the annulus at h={h_target} needs more than the element "
                f"budget of {budget} triangles"
            )
        radii = np.linspace(inner_r, outer_r, nr + 1)
        th = 2.0 * np.pi * np.arange(nt) / nt
        pts = np.vstack(
            [np.column_stack([r * np.cos(th), r * np.sin(th)]) for r in radii]
        )

        def idx(k, i):
            return k * nt + (i % nt)

        tris = []
        for k in range(nr):
            for i in range(nt):
                tris.append((idx(k, i), idx(k + 1, i), idx(k + 1, i + 1)))
                tris.append((idx(k, i), idx(k + 1, i + 1), idx(k, i + 1)))
        outer_loop = np.arange(nr * nt, (nr + 1) * nt, dtype=np.int64)
        inner_loop = np.arange(nt - 1, -1, -1, dtype=np.int64)  # clockwise
        mesh = TriMesh(
            pts,
            np.asarray(tris, dtype=np.int64),
            [
                BoundaryLoop(outer_loop, curve=CircleBoundary(outer_r)),
                BoundaryLoop(inner_loop, hole=0, curve=CircleBoundary(inner_r)),
            ],
        )
        if mesh.h <= h_target:
            return mesh
        grow = mesh.h / h_target
        nt = math.ceil(nt * grow)
        nr = math.ceil(nr * grow)


def _mesh_polygon(poly: Polygon, h_target: float, budget: int) -> TriMesh:
    pts = np.vstack([poly.outer, *poly.holes]) if poly.holes else np.array(poly.outer)
    offsets = np.cumsum([0, len(poly.outer)] + [len(h) for h in poly.holes])
    outer_idx = list(range(len(poly.outer)))
    hole_idx = [
        list(range(offsets[k + 1], offsets[k + 2])) for k in range(len(poly.holes))
    ]
    tris = earcut.triangulate_polygon(pts, outer_idx, hole_idx)

    # seed quality gate: quality problems must surface here, not downstream
    p = pts[tris]
    la = np.linalg.norm(p[:, 1] - p[:, 0], axis=1)
    lb = np.linalg.norm(p[:, 2] - p[:, 1], axis=1)
    lc = np.linalg.norm(p[:, 0] - p[:, 2], axis=1)
    area2 = (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1]) - (
        p[:, 1, 1] - p[:, 0, 1]
    ) * (p[:, 2, 0] - p[:, 0, 0])
    sines = np.minimum.reduce(
        [area2 / (lb * lc), area2 / (lc * la), area2 / (la * lb)]
    )
    min_angle = math.degrees(float(np.arcsin(np.clip(sines.min(), -1.0, 1.0))))
    if min_angle <= MIN_SEED_ANGLE_DEG:
        raise ValueError(
            f"polygon seed triangulation has minimum angle {min_angle:.2f} deg "
            f"(need > {MIN_SEED_ANGLE_DEG}); simplify or re-vertex the polygon"
        )

    loops = [BoundaryLoop(np.asarray(outer_idx, dtype=np.int64))]
    for k, hidx in enumerate(hole_idx):
        loops.append(BoundaryLoop(np.asarray(hidx, dtype=np.int64), hole=k))
    mesh = TriMesh(pts, tris, loops)

    levels = 0
    h = mesh.h
    while h > h_target:
        levels += 1
        h /= 2.0
    if mesh.n_elements * 4**levels > budget:
        raise ValueError(
            f"refining the polygon seed to h={h_target} needs "
            f"{mesh.n_elements * 4 ** levels} elements, over the budget of {budget}"
        )
    for _ in range(levels):
        mesh = refine(mesh)
    return mesh


def _element_budget(max_elements: int | None) -> int:
    if max_elements is not None:
        return int(max_elements)
    env = os.environ.get(ELEMENT_BUDGET_ENV)
    if env:
        return int(env)
    return DEFAULT_ELEMENT_BUDGET


def triangulate(spec: SectionSpec, h_target: float, max_elements: int | None = None) -> TriMesh:
    """Mesh a normalized section with max element circumdiameter <= h_target.

    Parameters
    ----------
    spec : normalized section.
    h_target : requested mesh size, 0 < h_target < diameter/2.
    max_elements : optional element budget; defaults to the
        SVSECTION_ELEMENT_BUDGET environment variable or 2e6.
    """
    if not spec.normalized:
        raise ValueError("section must be normalized first (normalize_section)")
    if not (0 < h_target < spec.diameter / 2.0):
        raise ValueError(
            f"h_target must lie in (0, diameter/2) = (0, {spec.diameter / 2.0}), "
            f"got {h_target}"
        )
    budget = _element_budget(max_elements)
    s = spec.shape
    if isinstance(s, Circle):
        return _mesh_disk(s.radius, h_target, budget)
    if isinstance(s, Ellipse):
        return _mesh_ellipse(s.a, s.b, h_target, budget)
    if isinstance(s, Rectangle):
        return _mesh_rectangle(s.width, s.height, h_target, budget)
    if isinstance(s, Annulus):
        return _mesh_annulus(s.outer, s.inner, h_target, budget)
    if isinstance(s, Polygon):
        return _mesh_polygon(s, h_target, budget)
    raise TypeError(f"unknown shape {type(s).__name__}")


# ---------------------------------------------------------------------------
# refinement


def refine(mesh: TriMesh) -> TriMesh:
    """Split every triangle into 4 by edge midpoints; midpoints that land on a
    curved boundary loop are snapped onto the exact curve."""
    tris = mesh.triangles
    n = mesh.n_nodes
    edges = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    und = np.sort(edges, axis=1)
    keys = und[:, 0] * np.int64(n) + und[:, 1]
    uniq_keys, inverse = np.unique(keys, return_inverse=True)
    ua = uniq_keys // n
    ub = uniq_keys % n
    mid_coords = 0.5 * (mesh.nodes[ua] + mesh.nodes[ub])
    mid_index = n + np.arange(len(uniq_keys), dtype=np.int64)

    m = mesh.n_elements
    mab = mid_index[inverse[0:m]]
    mbc = mid_index[inverse[m : 2 * m]]
    mca = mid_index[inverse[2 * m : 3 * m]]
    a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
    new_tris = np.concatenate(
        [
            np.column_stack([a, mab, mca]),
            np.column_stack([mab, b, mbc]),
            np.column_stack([mca, mbc, c]),
            np.column_stack([mab, mbc, mca]),
        ]
    )

    nodes = np.vstack([mesh.nodes, mid_coords])

    key_to_mid = {int(k): int(i) for k, i in zip(uniq_keys, mid_index)}
    new_loops = []
    for lp in mesh.loops:
        ns = lp.nodes
        out = np.empty(2 * len(ns), dtype=np.int64)
        fresh = []
        for k in range(len(ns)):
            u, v = int(ns[k]), int(ns[(k + 1) % len(ns)])
            key = min(u, v) * n + max(u, v)
            mid = key_to_mid[key]
            out[2 * k] = u
            out[2 * k + 1] = mid
            fresh.append(mid)
        if lp.curve is not None:
            fresh = np.asarray(fresh, dtype=np.int64)
            nodes[fresh] = lp.curve.snap(nodes[fresh])
        new_loops.append(BoundaryLoop(out, hole=lp.hole, curve=lp.curve))

    return TriMesh(nodes, new_tris, new_loops)


# ---------------------------------------------------------------------------
# validation


def validate_mesh(mesh: TriMesh, snap_tol: float = 1e-12) -> None:
    """Check the mesh invariants; raises ValueError on the first violation.

    Verified: strictly positive triangle areas, conformity (every edge in one
    or two triangles, single-triangle edges exactly the tagged loop edges with
    domain-left orientation) and curved-loop nodes on their curve within
    snap_tol times the diameter.
    """
    if np.any(mesh.areas <= 0):
        bad = int(np.argmax(mesh.areas <= 0))
        raise ValueError(f"triangle {bad} has non-positive area {mesh.areas[bad]}")

    n = mesh.n_nodes
    tris = mesh.triangles
    directed = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    dkeys = directed[:, 0] * np.int64(n) + directed[:, 1]
    if len(np.unique(dkeys)) != len(dkeys):
        raise ValueError("non-conforming mesh: a directed edge appears twice")
    und = np.sort(directed, axis=1)
    ukeys = und[:, 0] * np.int64(n) + und[:, 1]
    uniq, counts = np.unique(ukeys, return_counts=True)
    if np.any(counts > 2):
        raise ValueError("non-conforming mesh: an edge is shared by >2 triangles")
    boundary_keys = set(uniq[counts == 1].tolist())

    loop_keys = set()
    dkey_set = set(dkeys.tolist())
    for lp in mesh.loops:
        ns = lp.nodes
        for k in range(len(ns)):
            u, v = int(ns[k]), int(ns[(k + 1) % len(ns)])
            if u * n + v not in dkey_set:
                raise ValueError(
                    f"loop {lp.tag} edge ({u},{v}) is not a domain-left triangle edge"
                )
            loop_keys.add(min(u, v) * n + max(u, v))
    if loop_keys != boundary_keys:
        raise ValueError("boundary loops do not partition the mesh boundary")

    diam = float(np.max(mesh.nodes.max(axis=0) - mesh.nodes.min(axis=0)))
    for lp in mesh.loops:
        if lp.curve is not None:
            d = lp.curve.distance(mesh.nodes[lp.nodes])
            if np.any(d > snap_tol * diam):
                raise ValueError(
                    f"loop {lp.tag} has nodes off the parametric curve by "
                    f"{float(d.max()):.3e}"
                )
