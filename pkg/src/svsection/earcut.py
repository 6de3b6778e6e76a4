"""Ear-clipping triangulation for simple polygons with holes.

Holes are merged into the outer ring with bridge edges (rightmost hole vertex
connected to a visible outer vertex), then the merged ring is clipped. Ear
selection is greedy on triangle quality so convex polygons still come out with
sane aspect ratios. Everything is deterministic: no randomization, fixed
traversal order.
"""
from __future__ import annotations

import numpy as np

__all__ = ["triangulate_polygon"]


def _orient(points: np.ndarray, i: int, j: int, k: int) -> float:
    a, b, c = points[i], points[j], points[k]
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _point_in_triangle(p, a, b, c) -> bool:
    d1 = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
    d2 = (c[0] - b[0]) * (p[1] - b[1]) - (c[1] - b[1]) * (p[0] - b[0])
    d3 = (a[0] - c[0]) * (p[1] - c[1]) - (a[1] - c[1]) * (p[0] - c[0])
    return d1 >= 0 and d2 >= 0 and d3 >= 0


def _min_angle(a, b, c) -> float:
    la = np.hypot(*(c - b))
    lb = np.hypot(*(a - c))
    lc = np.hypot(*(b - a))
    area2 = abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
    if la * lb * lc == 0:
        return 0.0
    # sin of each angle = opposite * (2 area) / product of the adjacent sides
    s = area2 / np.array([lb * lc, lc * la, la * lb])
    return float(np.arcsin(np.clip(s.min(), 0.0, 1.0)))


def _bridge_hole(points: np.ndarray, ring: list[int], hole: list[int]) -> list[int]:
    """Splice `hole` into `ring` with a two-way bridge edge.

    Uses the classic visibility construction: from the rightmost hole vertex M
    cast a ray toward +x, find the nearest crossed ring edge, then pick a ring
    vertex visible from M (the edge endpoint with the larger x, or the reflex
    vertex inside the candidate triangle closest in angle to the ray).
    """
    m_pos = max(range(len(hole)), key=lambda t: (points[hole[t]][0], points[hole[t]][1]))
    M = points[hole[m_pos]]

    best_x = np.inf
    best_edge = -1
    n = len(ring)
    for i in range(n):
        p = points[ring[i]]
        q = points[ring[(i + 1) % n]]
        if (p[1] > M[1]) == (q[1] > M[1]):
            continue
        xi = p[0] + (M[1] - p[1]) * (q[0] - p[0]) / (q[1] - p[1])
        if xi >= M[0] - 1e-14 and xi < best_x:
            best_x = xi
            best_edge = i
    if best_edge < 0:
        raise ValueError("hole is not inside the outer ring (no bridge found)")

    p_idx = best_edge
    q_idx = (best_edge + 1) % n
    # candidate: the endpoint of the crossed edge lying to the right
    cand = p_idx if points[ring[p_idx]][0] > points[ring[q_idx]][0] else q_idx
    I = np.array([best_x, M[1]])
    C = points[ring[cand]]

    # any reflex ring vertex inside triangle (M, I, C) blocks the bridge;
    # take the blocker with the smallest slope from the ray
    best = cand
    best_key = None
    for i in range(n):
        if i == cand:
            continue
        P = points[ring[i]]
        if P[0] < M[0]:
            continue
        prev = points[ring[i - 1]]
        nxt = points[ring[(i + 1) % n]]
        reflex = (
            (P[0] - prev[0]) * (nxt[1] - P[1]) - (P[1] - prev[1]) * (nxt[0] - P[0])
        ) < 0
        if not reflex:
            continue
        if _point_in_triangle(P, M, I, C) or _point_in_triangle(P, C, I, M):
            dx = P[0] - M[0]
            key = (abs(P[1] - M[1]) / dx if dx > 0 else np.inf, dx)
            if best_key is None or key < best_key:
                best = i
                best_key = key

    # splice: ring[..best], M..hole..M, best, ring[best+1..]
    hole_cycle = hole[m_pos:] + hole[:m_pos]
    return ring[: best + 1] + hole_cycle + [hole_cycle[0], ring[best]] + ring[best + 1 :]


def triangulate_polygon(points: np.ndarray, outer: list[int], holes=()) -> np.ndarray:
    """Triangulate a polygon given vertex coordinates and index loops.

    Parameters
    ----------
    points : (n, 2) array of all vertex coordinates.
    outer : indices of the counterclockwise outer loop.
    holes : iterable of index loops for clockwise holes.

    Returns
    -------
    (m, 3) int array of counterclockwise triangles referencing `points` rows.
    """
    points = np.asarray(points, dtype=float)
    ring = list(outer)
    hole_list = sorted(
        (list(h) for h in holes),
        key=lambda h: -max(points[i][0] for i in h),
    )
    for hole in hole_list:
        ring = _bridge_hole(points, ring, hole)

    diam2 = float(np.max(points.max(axis=0) - points.min(axis=0))) ** 2
    eps = 1e-14 * diam2

    triangles: list[tuple[int, int, int]] = []
    while len(ring) > 3:
        n = len(ring)
        best_pos = -1
        best_quality = -1.0
        for pos in range(n):
            i0, i1, i2 = ring[pos - 1], ring[pos], ring[(pos + 1) % n]
            a, b, c = points[i0], points[i1], points[i2]
            area2 = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            if area2 <= eps:
                continue
            ok = True
            for j in ring:
                if j in (i0, i1, i2):
                    continue
                if _point_in_triangle(points[j], a, b, c):
                    ok = False
                    break
            if not ok:
                continue
            q = _min_angle(a, b, c)
            if q > best_quality:
                best_quality = q
                best_pos = pos
        if best_pos < 0:
            raise ValueError("no ear found; polygon is degenerate or self-intersecting")
        i0, i1, i2 = ring[best_pos - 1], ring[best_pos], ring[(best_pos + 1) % len(ring)]
        triangles.append((i0, i1, i2))
        del ring[best_pos]
    i0, i1, i2 = ring
    if _orient(points, i0, i1, i2) <= eps:
        raise ValueError("final ear is degenerate (near-zero-area)")
    triangles.append((i0, i1, i2))
    return np.asarray(triangles, dtype=np.int64)
