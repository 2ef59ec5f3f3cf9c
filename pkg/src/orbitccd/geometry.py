"""Planar convex polygons in 3-space and small geometric helpers."""
from __future__ import annotations

import numpy as np

from .errors import ValidationError

PLANARITY_TOL = 1e-9
DISTINCT_TOL = 1e-12


def newell_normal(vertices):
    """Area-weighted normal of a closed polygon (not normalised)."""
    v = np.asarray(vertices, dtype=float)
    w = np.roll(v, -1, axis=0)
    return np.array([
        np.sum((v[:, 1] - w[:, 1]) * (v[:, 2] + w[:, 2])),
        np.sum((v[:, 2] - w[:, 2]) * (v[:, 0] + w[:, 0])),
        np.sum((v[:, 0] - w[:, 0]) * (v[:, 1] + w[:, 1])),
    ])


def plane_basis(normal):
    """Two unit vectors ``u, v`` with ``u x v = normal``."""
    n = np.asarray(normal, dtype=float)
    k = int(np.argmin(np.abs(n)))
    e = np.zeros(3)
    e[k] = 1.0
    u = np.cross(e, n)
    u /= np.linalg.norm(u)
    v = np.cross(n, u)
    return u, v


def diameter(points):
    p = np.asarray(points, dtype=float)
    d = p[:, None, :] - p[None, :, :]
    return float(np.sqrt(np.max(np.einsum("ijk,ijk->ij", d, d))))


def cross3(a, b):
    """Cross product over the last axis (cheaper than ``np.cross`` for small arrays)."""
    a0, a1, a2 = a[..., 0], a[..., 1], a[..., 2]
    b0, b1, b2 = b[..., 0], b[..., 1], b[..., 2]
    return np.stack([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0], axis=-1)


def cross2(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def polygon_area2d(poly2):
    p = np.asarray(poly2, dtype=float)
    return 0.5 * float(np.sum(cross2(p, np.roll(p, -1, axis=0))))


def is_convex2d(poly2, tol=1e-12):
    """True if the ring is convex and counterclockwise (collinear runs allowed)."""
    p = np.asarray(poly2, dtype=float)
    e = np.roll(p, -1, axis=0) - p
    scale = max(float(np.max(np.abs(p - p.mean(axis=0)))), 1e-300)
    turns = cross2(e, np.roll(e, -1, axis=0))
    if np.any(turns < -tol * scale * scale):
        return False
    # total turning of a simple convex ring is exactly 2 pi
    ang = np.arctan2(turns, np.einsum("ij,ij->i", e, np.roll(e, -1, axis=0)))
    return abs(float(np.sum(ang)) - 2.0 * np.pi) < 1e-6


def point_in_convex_polygon2d(p2, poly2, tol=1e-12):
    """Boundary-inclusive inside test for a counterclockwise convex ring."""
    poly = np.asarray(poly2, dtype=float)
    p = np.asarray(p2, dtype=float)
    e = np.roll(poly, -1, axis=0) - poly
    scale = max(float(np.max(np.abs(poly))), float(np.max(np.abs(p))), 1.0)
    c = cross2(e, p - poly)
    return bool(np.all(c >= -tol * scale * scale))


def closest_point_on_segment(p, a, b):
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return a.copy()
    t = min(max(float((p - a) @ ab) / denom, 0.0), 1.0)
    return a + t * ab


def segment_segment_distance(p1, q1, p2, q2):
    """Minimum distance between segments ``p1q1`` and ``p2q2``."""
    d1 = q1 - p1
    d2 = q2 - p2
    r = p1 - p2
    a = float(d1 @ d1)
    e = float(d2 @ d2)
    f = float(d2 @ r)
    if a <= 1e-300 and e <= 1e-300:
        return float(np.linalg.norm(r))
    if a <= 1e-300:
        s, t = 0.0, min(max(f / e, 0.0), 1.0)
    else:
        c = float(d1 @ r)
        if e <= 1e-300:
            t, s = 0.0, min(max(-c / a, 0.0), 1.0)
        else:
            b = float(d1 @ d2)
            denom = a * e - b * b
            s = min(max((b * f - c * e) / denom, 0.0), 1.0) if denom > 0.0 else 0.0
            t = (b * s + f) / e
            if t < 0.0:
                t, s = 0.0, min(max(-c / a, 0.0), 1.0)
            elif t > 1.0:
                t, s = 1.0, min(max((b - c) / a, 0.0), 1.0)
    return float(np.linalg.norm(p1 + s * d1 - (p2 + t * d2)))


class Polygon3:
    """Convex planar polygon in 3-space.

    Vertices are stored as an ``(n, 3)`` array. The unit normal follows the
    vertex order (right-hand rule), so the ring is counterclockwise in the
    ``(u, v)`` coordinates returned by :meth:`to_2d`.
    """

    __slots__ = ("vertices", "normal", "offset", "u", "v", "_diameter")

    def __init__(self, vertices, *, check=True):
        verts = np.array(vertices, dtype=float)
        if verts.ndim != 2 or verts.shape[1] != 3 or len(verts) < 3:
            raise ValidationError("polygon needs at least 3 vertices in 3-space")
        if not np.all(np.isfinite(verts)):
            raise ValidationError("polygon vertices must be finite")
        n = newell_normal(verts)
        nn = float(np.linalg.norm(n))
        self._diameter = None
        if check:
            diam = diameter(verts)
            self._diameter = diam
            gaps = np.linalg.norm(np.roll(verts, -1, axis=0) - verts, axis=1)
            if np.any(gaps <= DISTINCT_TOL * diam):
                raise ValidationError("consecutive polygon vertices coincide")
            if nn <= 1e-14 * diam * diam:
                raise ValidationError("polygon has zero area")
        if nn == 0.0:
            raise ValidationError("polygon has zero area")
        n = n / nn
        self.vertices = verts
        self.vertices.flags.writeable = False
        self.normal = n
        self.offset = float(n @ verts.mean(axis=0))
        self.u, self.v = plane_basis(n)
        if check:
            if np.max(np.abs(verts @ n - self.offset)) > PLANARITY_TOL * self._diameter:
                raise ValidationError("polygon is not planar")
            if not is_convex2d(self.to_2d(verts), tol=1e-10):
                raise ValidationError("polygon is not convex (decompose it first)")

    @classmethod
    def trusted(cls, vertices):
        """Wrap vertices already known to form a valid convex polygon."""
        return cls(vertices, check=False)

    def __len__(self):
        return len(self.vertices)

    def __repr__(self):
        return f"Polygon3({self.vertices.tolist()!r})"

    def __eq__(self, other):
        if not isinstance(other, Polygon3):
            return NotImplemented
        return self.vertices.shape == other.vertices.shape and bool(
            np.array_equal(self.vertices, other.vertices))

    __hash__ = None

    @property
    def diameter(self):
        if self._diameter is None:
            self._diameter = diameter(self.vertices)
        return self._diameter

    @property
    def centroid(self):
        return self.vertices.mean(axis=0)

    def edges(self):
        """Edge start and end points as two ``(n, 3)`` arrays."""
        return self.vertices, np.roll(self.vertices, -1, axis=0)

    def to_2d(self, points):
        """Coordinates along the in-plane axes ``u`` and ``v``."""
        p = np.asarray(points, dtype=float)
        return np.stack([p @ self.u, p @ self.v], axis=-1)

    def area(self):
        return polygon_area2d(self.to_2d(self.vertices))

    def transformed(self, linear, translation):
        """Affine image ``linear @ x + translation`` (convexity is preserved)."""
        return Polygon3.trusted(self.vertices @ np.asarray(linear).T + translation)
