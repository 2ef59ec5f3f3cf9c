"""Orbit ("fat") volumes of vertices, edges and faces under a displacement ball.

All volumes are built in zero position, i.e. for the ball ``B(id, R)``.
For a point ``x`` the orbit is the ball of radius ``R rho(x)``; for a line
it is bounded by a one-sheeted hyperboloid of revolution and for a plane
by a two-sheeted hyperboloid. The orbit of a convex polygon is the union of
the balls over its points and splits into a face patch over a shrunken
copy of the polygon, edge patches between two parallel planes and the
vertex balls.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BallTooLarge
from .geometry import Polygon3
from .metric import distortion_rate2, line_metric_data, plane_metric_data

#: radii within this relative distance of a validity bound are refused
CONDITIONING_TOL = 1e-6


@dataclass(frozen=True)
class FatVertex:
    center: np.ndarray
    radius: float

    def contains(self, points, slack=0.0):
        d = np.linalg.norm(np.atleast_2d(points) - self.center, axis=-1)
        return d <= self.radius * (1.0 + slack)


@dataclass(frozen=True)
class FatEdge:
    """Hyperboloid solid ``(y^2 + z^2)/p2 - x^2/q2 <= 1`` cut to ``slab``.

    Coordinates ``(x, y, z)`` refer to ``origin`` and the rows of ``axes``
    (edge direction first).
    """

    origin: np.ndarray
    axes: np.ndarray
    p2: float
    q2: float
    slab: tuple

    def local(self, points):
        return (np.asarray(points, dtype=float) - self.origin) @ self.axes.T

    def implicit(self, points):
        x = self.local(points)
        return (x[..., 1] ** 2 + x[..., 2] ** 2) / self.p2 - x[..., 0] ** 2 / self.q2

    def contains(self, points, slack=0.0):
        """Inside the hyperboloid and between the slab planes (relative slack)."""
        x = self.local(np.atleast_2d(points))
        val = (x[:, 1] ** 2 + x[:, 2] ** 2) / self.p2 - x[:, 0] ** 2 / self.q2
        lo, hi = self.slab
        pad = slack * max(hi - lo, np.sqrt(self.p2))
        return (val <= 1.0 + slack) & (x[:, 0] >= lo - pad) & (x[:, 0] <= hi + pad)


@dataclass(frozen=True)
class FatFace:
    """Region between the sheets of ``x^2/a2 + y^2/b2 - z^2/c2 + 1 = 0``.

    Only points whose orthographic projection lies in ``scaled_polygon``
    (counterclockwise, frame coordinates) belong to the face patch.
    """

    origin: np.ndarray
    axes: np.ndarray
    a2: float
    b2: float
    c2: float
    scaled_polygon: np.ndarray
    scale: tuple

    def local(self, points):
        return (np.asarray(points, dtype=float) - self.origin) @ self.axes.T

    def implicit(self, points):
        """Positive between the sheets, zero on them."""
        x = self.local(points)
        return x[..., 0] ** 2 / self.a2 + x[..., 1] ** 2 / self.b2 - x[..., 2] ** 2 / self.c2 + 1.0

    def contains(self, points, slack=0.0):
        """Between the sheets and projecting into the scaled polygon."""
        x = self.local(np.atleast_2d(points))
        val = x[:, 0] ** 2 / self.a2 + x[:, 1] ** 2 / self.b2 - x[:, 2] ** 2 / self.c2 + 1.0
        poly = self.scaled_polygon
        e = np.roll(poly, -1, axis=0) - poly
        scale = float(np.max(np.abs(poly)))
        side = e[None, :, 0] * (x[:, None, 1] - poly[None, :, 1]) \
            - e[None, :, 1] * (x[:, None, 0] - poly[None, :, 0])
        inside = np.all(side >= -slack * scale * np.linalg.norm(e, axis=1), axis=1)
        return (val >= -slack) & inside


@dataclass(frozen=True)
class FatPolygon:
    """Orbit of a convex polygon split into vertex, edge and face parts."""

    vertices: tuple
    edges: tuple
    face: FatFace

    def contains(self, points, slack=0.0):
        """Membership in the union of all parts, one flag per point."""
        inside = self.face.contains(points, slack)
        for part in self.edges + self.vertices:
            inside |= part.contains(points, slack)
        return inside


def edge_frame(b):
    """Orthonormal rows ``(b, n1, n2)`` for a unit edge direction ``b``."""
    k = int(np.argmin(np.abs(b)))
    e = np.zeros(3)
    e[k] = 1.0
    n1 = np.cross(b, e)
    n1 /= np.linalg.norm(n1)
    return np.array([b, n1, np.cross(b, n1)])


def _check_radius(R, lam):
    if not R > 0:
        raise ValueError("ball radius must be positive")
    if R >= lam * (1.0 - CONDITIONING_TOL):
        raise BallTooLarge(f"R={R:.6g} too close to or above lambda={lam:.6g}")


def fat_vertex(x, md, R):
    x = np.asarray(x, dtype=float)
    return FatVertex(x, float(R * np.sqrt(distortion_rate2(x, md))))


def fat_edge_from_data(data, start, end, R):
    """Fat edge from precomputed line metric data of the supporting line."""
    _check_radius(R, data.lam)
    b = data.direction
    p2 = R * R * data.rho0 * data.rho0
    q2 = p2 * ((data.lam / R) ** 2 - 1.0)
    shrink = 1.0 - (R / data.lam) ** 2
    ta = float((np.asarray(start) - data.anchor) @ b)
    tb = float((np.asarray(end) - data.anchor) @ b)
    return FatEdge(data.anchor, edge_frame(b), p2, q2,
                   (shrink * min(ta, tb), shrink * max(ta, tb)))


def fat_edge(edge_endpoints, md, R):
    """Orbit solid of the open edge between the two end points.

    Raises
    ------
    BallTooLarge
        If ``R`` reaches the edge line's ``lambda`` (the orbit is no longer
        bounded by a hyperboloid).
    """
    start, end = (np.asarray(p, dtype=float) for p in edge_endpoints)
    if np.array_equal(start, end):
        raise ValueError("edge end points coincide")
    return fat_edge_from_data(line_metric_data(start, end - start, md), start, end, R)


def fat_face_from_data(data, polygon, R):
    _check_radius(R, min(data.lam1, data.lam2))
    c2 = R * R * data.rho0 * data.rho0
    a2 = c2 * ((data.lam1 / R) ** 2 - 1.0)
    b2 = c2 * ((data.lam2 / R) ** 2 - 1.0)
    s1 = 1.0 - (R / data.lam1) ** 2
    s2 = 1.0 - (R / data.lam2) ** 2
    axes = np.array([data.basis1, data.basis2, np.cross(data.basis1, data.basis2)])
    verts = getattr(polygon, "vertices", polygon)
    local = (np.asarray(verts) - data.anchor) @ axes[:2].T
    scaled = local * np.array([s1, s2])
    area2 = np.sum(scaled[:, 0] * np.roll(scaled[:, 1], -1) - scaled[:, 1] * np.roll(scaled[:, 0], -1))
    if area2 < 0:
        scaled = scaled[::-1].copy()
    return FatFace(data.anchor, axes, a2, b2, c2, scaled, (s1, s2))


def fat_face(polygon, md, R):
    """Face patch of the orbit of a convex polygon (zero position).

    Raises
    ------
    BallTooLarge
        If ``R`` reaches ``min(lam1, lam2)`` of the polygon's plane.
    """
    if not isinstance(polygon, Polygon3):
        polygon = Polygon3(polygon)
    v = polygon.vertices
    data = plane_metric_data(v[0], polygon.u, polygon.v, md)
    return fat_face_from_data(data, polygon, R)


def fat_polygon(polygon, md, R):
    """All orbit parts of a convex polygon under ``B(id, R)``.

    Raises
    ------
    BallTooLarge
        If an edge or the face exceeds its validity bound.
    """
    if not isinstance(polygon, Polygon3):
        polygon = Polygon3(polygon)
    starts, ends = polygon.edges()
    return FatPolygon(tuple(fat_vertex(v, md, R) for v in polygon.vertices),
                      tuple(fat_edge((a, b), md, R) for a, b in zip(starts, ends)),
                      fat_face(polygon, md, R))
