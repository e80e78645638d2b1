"""Planar polyline utilities: self-intersection scan and Hausdorff distance."""

from __future__ import annotations

import numpy as np


def _orient(ax, ay, bx, by, cx, cy):
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def self_intersections(pts, closed: bool = False, limit: int | None = None, chunk: int = 256):
    """Index pairs (i, j) of non-adjacent segments that properly cross.

    Segment i joins pts[i] and pts[i + 1]; a closed polyline also joins the
    last point to the first. Touching at shared endpoints of neighbours is
    not a crossing.
    """
    pts = np.asarray(pts, dtype=float)
    if closed:
        pts = np.vstack([pts, pts[:1]])
    p, q = pts[:-1], pts[1:]
    n = len(p)
    found = []
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        i = np.arange(lo, hi)[:, None]
        j = np.arange(n)[None, :]
        a1x, a1y = p[lo:hi, 0:1], p[lo:hi, 1:2]
        a2x, a2y = q[lo:hi, 0:1], q[lo:hi, 1:2]
        b1x, b1y = p[None, :, 0], p[None, :, 1]
        b2x, b2y = q[None, :, 0], q[None, :, 1]
        d1 = _orient(a1x, a1y, a2x, a2y, b1x, b1y)
        d2 = _orient(a1x, a1y, a2x, a2y, b2x, b2y)
        d3 = _orient(b1x, b1y, b2x, b2y, a1x, a1y)
        d4 = _orient(b1x, b1y, b2x, b2y, a2x, a2y)
        cross = (d1 * d2 < 0) & (d3 * d4 < 0)
        mask = j > i + 1
        if closed:
            mask &= ~((i == 0) & (j == n - 1))
        ii, jj = np.nonzero(cross & mask)
        found.extend(zip((ii + lo).tolist(), jj.tolist()))
        if limit is not None and len(found) >= limit:
            return found[:limit]
    return found


def is_simple(pts, closed: bool = False) -> bool:
    return len(self_intersections(pts, closed=closed, limit=1)) == 0


def point_polyline_distance(x, poly, chunk: int = 2048) -> np.ndarray:
    """Distance from each point of x (m, 2) to the polyline poly (n, 2)."""
    x = np.asarray(x, dtype=float)
    poly = np.asarray(poly, dtype=float)
    a, b = poly[:-1], poly[1:]
    ab = b - a
    L2 = np.maximum((ab * ab).sum(axis=1), 1e-300)
    out = np.empty(len(x))
    for lo in range(0, len(x), chunk):
        xs = x[lo : lo + chunk, None, :]
        t = np.clip(((xs - a[None]) * ab[None]).sum(axis=2) / L2[None], 0.0, 1.0)
        proj = a[None] + t[..., None] * ab[None]
        out[lo : lo + chunk] = np.sqrt(((xs - proj) ** 2).sum(axis=2)).min(axis=1)
    return out


def hausdorff(c1, c2) -> float:
    """Symmetric Hausdorff distance between two polylines (vertex to polyline)."""
    c1 = np.asarray(c1, dtype=float)
    c2 = np.asarray(c2, dtype=float)
    return float(max(point_polyline_distance(c1, c2).max(), point_polyline_distance(c2, c1).max()))
