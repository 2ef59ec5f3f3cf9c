"""Collision predicates between fat volumes and fixed geometry.

Every predicate is conservative: ties and near-ties count as collision so
that rounding can never turn a touching configuration into a reported miss.
Only sign checks of quadratics and point-in-polygon tests are used.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import cross2, cross3, point_in_convex_polygon2d

REL_TOL = 1e-12


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError("interval needs lo <= hi")


def point_in_convex_polygon(p2, poly2):
    """Boundary-inclusive test for a counterclockwise convex polygon."""
    return point_in_convex_polygon2d(p2, poly2, tol=REL_TOL)


def _polygon_distances(centers, polygon):
    """Distance of each center to the convex polygon region, shape (k,)."""
    c = np.atleast_2d(centers)
    verts = polygon.vertices
    starts, ends = polygon.edges()
    h = c @ polygon.normal - polygon.offset
    c2 = polygon.to_2d(c)
    v2 = polygon.to_2d(verts)
    e2 = np.roll(v2, -1, axis=0) - v2
    scale = max(float(np.max(np.abs(v2))), 1.0)
    inside = np.all(cross2(e2[None, :, :], c2[:, None, :] - v2[None, :, :])
                    >= -REL_TOL * scale * scale, axis=1)
    # distance to each boundary segment
    d = ends - starts
    t = np.einsum("kij,ij->ki", c[:, None, :] - starts[None], d) / np.einsum("ij,ij->i", d, d)
    t = np.clip(t, 0.0, 1.0)
    closest = starts[None] + t[..., None] * d[None]
    seg = np.sqrt(np.min(np.sum((c[:, None, :] - closest) ** 2, axis=-1), axis=1))
    return np.where(inside, np.abs(h), seg)


def spheres_vs_polygon(centers, radii, polygon):
    """Vectorised :func:`sphere_vs_polygon`; true if any ball touches."""
    dist = _polygon_distances(centers, polygon)
    r = np.asarray(radii, dtype=float)
    scale = max(float(np.max(np.abs(polygon.vertices))), 1.0)
    return bool(np.any(dist <= r * (1.0 + REL_TOL) + REL_TOL * scale))


def sphere_vs_polygon(ball, polygon):
    """True iff the closed ball meets the convex polygon (boundary included)."""
    return spheres_vs_polygon(ball.center[None, :], [ball.radius], polygon)


def _quadratic_min_leq(a, b, c, lo, hi, tol):
    """Whether ``a u^2 + b u + c <= tol`` somewhere on ``[lo, hi]`` (vectorised)."""
    f_lo = (a * lo + b) * lo + c
    f_hi = (a * hi + b) * hi + c
    hit = (f_lo <= tol) | (f_hi <= tol)
    with np.errstate(divide="ignore", invalid="ignore"):
        us = -b / (2.0 * a)
    interior = (a > 0) & (us > lo) & (us < hi)
    # at the stationary point the value is c - b^2 / (4a), i.e. the discriminant sign
    disc_hit = interior & (b * b - 4.0 * a * (c - tol) >= 0)
    return hit | disc_hit


def segments_vs_edge_solids(starts, ends, origins, axes, p2, q2, slab_lo, slab_hi):
    """Whether any of m segments meets any of k fat edge solids.

    Edge data are stacked along a leading axis of length k: ``origins``
    (k, 3), ``axes`` (k, 3, 3) with the edge direction as first row, and
    the scalars ``p2, q2, slab_lo, slab_hi`` of shape (k,).
    """
    rel0 = np.atleast_2d(starts)[None, :, :] - origins[:, None, :]
    rel1 = np.atleast_2d(ends)[None, :, :] - origins[:, None, :]
    s0 = np.einsum("kmj,kij->kmi", rel0, axes)
    s1 = np.einsum("kmj,kij->kmi", rel1, axes)
    d = s1 - s0
    pad = REL_TOL * (np.abs(slab_lo) + np.abs(slab_hi)
                     + np.max(np.abs(s0[..., 0]), axis=1) + np.max(np.abs(s1[..., 0]), axis=1))
    lo_x = (slab_lo - pad)[:, None]
    hi_x = (slab_hi + pad)[:, None]
    lengths = np.abs(d).sum(axis=-1)
    x0, dx = s0[..., 0], d[..., 0]
    parallel = np.abs(dx) <= REL_TOL * lengths
    with np.errstate(divide="ignore", invalid="ignore"):
        ua = (lo_x - x0) / dx
        ub = (hi_x - x0) / dx
    lo = np.where(parallel, 0.0, np.maximum(0.0, np.minimum(ua, ub)))
    hi = np.where(parallel, 1.0, np.minimum(1.0, np.maximum(ua, ub)))
    # a segment parallel to the slab planes is either fully inside or outside
    in_slab = (x0 >= lo_x) & (x0 <= hi_x)
    valid = np.where(parallel, in_slab, lo <= hi)
    if not np.any(valid):
        return False
    # q(u) = (y^2 + z^2)/p2 - x^2/q2 - 1 along the segment
    ip = (1.0 / p2)[:, None]
    iq = (1.0 / q2)[:, None]
    y0, z0, dy, dz = s0[..., 1], s0[..., 2], d[..., 1], d[..., 2]
    a = (dy * dy + dz * dz) * ip - dx * dx * iq
    b = 2.0 * ((y0 * dy + z0 * dz) * ip - x0 * dx * iq)
    c = (y0 * y0 + z0 * z0) * ip - x0 * x0 * iq - 1.0
    tol = REL_TOL * (np.abs(a) + np.abs(b) + np.abs(c) + 1.0)
    hit = _quadratic_min_leq(a, b, c, lo, hi, tol)
    return bool(np.any(valid & hit))


def segments_vs_fat_edge(starts, ends, fe):
    """Vectorised :func:`segment_vs_fat_edge`; true if any segment hits."""
    return segments_vs_edge_solids(starts, ends, fe.origin[None], fe.axes[None],
                                   np.array([fe.p2]), np.array([fe.q2]),
                                   np.array([fe.slab[0]]), np.array([fe.slab[1]]))


def segment_vs_fat_edge(seg_start, seg_end, fe):
    """True iff the segment meets the fat edge solid inside its slab.

    The segment is clipped against the two slab planes and the implicit
    quadratic is sign-checked on the clipped parameter interval (end point
    values and stationary point), without iterative root finding.
    """
    return segments_vs_fat_edge(np.asarray(seg_start, float)[None], np.asarray(seg_end, float)[None], fe)


def points_vs_fat_face(points, ff):
    """Vectorised :func:`point_vs_fat_face`; true if any point is inside."""
    x = ff.local(np.atleast_2d(points))
    val = x[:, 0] ** 2 / ff.a2 + x[:, 1] ** 2 / ff.b2 - x[:, 2] ** 2 / ff.c2 + 1.0
    mag = x[:, 0] ** 2 / ff.a2 + x[:, 1] ** 2 / ff.b2 + x[:, 2] ** 2 / ff.c2 + 1.0
    between = val >= -REL_TOL * mag
    if not np.any(between):
        return False
    poly = ff.scaled_polygon
    e = np.roll(poly, -1, axis=0) - poly
    scale = max(float(np.max(np.abs(poly))), float(np.max(np.abs(x[:, :2]))), 1e-300)
    inside = np.all(cross2(e[None, :, :], x[:, None, :2] - poly[None, :, :])
                    >= -REL_TOL * scale * scale, axis=1)
    return bool(np.any(between & inside))


def point_vs_fat_face(p, ff):
    """True iff ``p`` is between the sheets and projects into the scaled polygon."""
    return points_vs_fat_face(np.asarray(p, float)[None], ff)


def segments_vs_polygon(starts, ends, polygon):
    """Whether any segment meets the convex polygon (touching counts).

    Parametric clipping of each segment against the thickened plane and the
    edge half-spaces of the polygon.
    """
    s0 = np.atleast_2d(starts)
    d = np.atleast_2d(ends) - s0
    verts = polygon.vertices
    scale = max(float(np.max(np.abs(verts))), float(np.max(np.abs(s0))), 1.0)
    tol = REL_TOL * scale
    n = polygon.normal
    e = np.roll(verts, -1, axis=0) - verts
    inward = cross3(n[None, :], e)
    inward /= np.sqrt(np.einsum("ij,ij->i", inward, inward))[:, None]
    # constraints c0 + u c1 >= 0
    c0 = np.concatenate([
        (s0 @ n - polygon.offset + tol)[:, None],
        (polygon.offset + tol - s0 @ n)[:, None],
        np.einsum("kj,ij->ki", s0, inward) - np.einsum("ij,ij->i", verts, inward)[None] + tol,
    ], axis=1)
    c1 = np.concatenate([(d @ n)[:, None], -(d @ n)[:, None], d @ inward.T], axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        bound = -c0 / c1
    lo = np.max(np.where(c1 > 0, bound, 0.0), axis=1, initial=0.0)
    hi = np.min(np.where(c1 < 0, bound, 1.0), axis=1, initial=1.0)
    feasible = np.all((c1 != 0) | (c0 >= 0), axis=1)
    return bool(np.any(feasible & (lo <= hi)))


def polygons_intersect(p, q):
    """Static intersection test of two convex polygons (touching counts)."""
    ps, pe = p.edges()
    qs, qe = q.edges()
    return segments_vs_polygon(ps, pe, q) or segments_vs_polygon(qs, qe, p)
