"""Sampling-based ground truth for validating the detector and the orbit shapes.

Nothing here is conservative: dense sampling can miss a short contact. The
code paths are deliberately separate from the predicates they check.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metric import Displacement
from .motion import evaluate_many


@dataclass(frozen=True)
class ProbeResult:
    worst_parameter: float
    min_distance: float
    samples: int


def _inside_ring(points, ring, normal):
    """Points (T, k, 3) against convex rings (T, n, 3) with normals (T, 3)."""
    e = np.roll(ring, -1, axis=1) - ring
    rel = points[:, :, None, :] - ring[:, None, :, :]
    s = np.einsum("tkij,tj->tki", np.cross(e[:, None], rel), normal)
    scale = np.max(np.abs(ring), axis=(1, 2))[:, None, None] ** 2 + 1.0
    return np.all(s >= -1e-12 * scale, axis=2)


def _point_polygon_dist(points, ring, normal, offset):
    """Distance of points (T, k, 3) to convex polygons (T, n, 3)."""
    h = np.einsum("tkj,tj->tk", points, normal) - offset[:, None]
    inside = _inside_ring(points, ring, normal)
    a = ring[:, None, :, :]
    d = (np.roll(ring, -1, axis=1) - ring)[:, None, :, :]
    p = points[:, :, None, :]
    t = np.clip(np.sum((p - a) * d, axis=-1) / np.sum(d * d, axis=-1), 0.0, 1.0)
    seg = np.sqrt(np.min(np.sum((p - a - t[..., None] * d) ** 2, axis=-1), axis=2))
    return np.where(inside, np.abs(h), seg)


def _segment_distances(p1, q1, p2, q2):
    """Pairwise segment distances, (T, n) x (T, m) -> (T, n, m)."""
    P1, Q1 = p1[:, :, None, :], q1[:, :, None, :]
    P2, Q2 = p2[:, None, :, :], q2[:, None, :, :]
    d1, d2 = Q1 - P1, Q2 - P2
    r = P1 - P2
    a = np.sum(d1 * d1, -1)
    e = np.sum(d2 * d2, -1)
    b = np.sum(d1 * d2, -1)
    c = np.sum(d1 * r, -1)
    f = np.sum(d2 * r, -1)
    denom = a * e - b * b
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(denom > 1e-14 * a * e, np.clip((b * f - c * e) / denom, 0, 1), 0.0)
        t = (b * s + f) / e
        s = np.where(t < 0, np.clip(-c / a, 0, 1), np.where(t > 1, np.clip((b - c) / a, 0, 1), s))
        t = np.clip(t, 0, 1)
    diff = P1 + s[..., None] * d1 - P2 - t[..., None] * d2
    return np.sqrt(np.sum(diff * diff, -1))


def _plane(ring):
    v = ring
    w = np.roll(v, -1, axis=1)
    n = np.cross(v, w).sum(axis=1)
    n /= np.linalg.norm(n, axis=1)[:, None]
    return n, np.einsum("tj,tj->t", v.mean(axis=1), n)


def _crossings(ring_a, ring_b, nb, ob):
    """Whether an edge of ring_a crosses the plane of ring_b inside ring_b."""
    s = ring_a
    e = np.roll(ring_a, -1, axis=1)
    ds = np.einsum("tkj,tj->tk", s, nb) - ob[:, None]
    de = np.einsum("tkj,tj->tk", e, nb) - ob[:, None]
    strict = ds * de < 0
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(strict, ds / (ds - de), 0.0)
    x = s + u[..., None] * (e - s)
    return np.any(strict & _inside_ring(x, ring_b, nb), axis=1)


def batch_polygon_distance(moving_rings, fixed_ring):
    """Distances between many moving polygons (T, n, 3) and one fixed polygon."""
    a = np.asarray(moving_rings, dtype=float)
    T = len(a)
    b = np.broadcast_to(np.asarray(fixed_ring, dtype=float), (T,) + np.shape(fixed_ring))
    na, oa = _plane(a)
    nb, ob = _plane(b)
    dist = np.minimum(
        _point_polygon_dist(a, b, nb, ob).min(axis=1),
        _point_polygon_dist(b, a, na, oa).min(axis=1))
    dist = np.minimum(dist, _segment_distances(a, np.roll(a, -1, axis=1),
                                               b, np.roll(b, -1, axis=1)).min(axis=(1, 2)))
    cross = _crossings(a, b, nb, ob) | _crossings(b, a, na, oa)
    return np.where(cross, 0.0, dist)


def polygon_distance(P, Q):
    """Euclidean distance between two convex planar polygons (0 if they meet)."""
    return float(batch_polygon_distance(P.vertices[None], Q.vertices)[0])


def sampled_min_distance(moving, fixed, motion, samples=10_000, *, lo=None, hi=None, chunk=2048):
    """Minimum polygon distance over uniformly spaced motion parameters."""
    if samples < 2:
        raise ValueError("at least two samples are needed")
    t0, t1 = motion.domain
    ts = np.linspace(t0 if lo is None else lo, t1 if hi is None else hi, samples)
    best, arg = np.inf, ts[0]
    for k in range(0, samples, chunk):
        part = ts[k:k + chunk]
        dist = distances_along(moving, fixed, motion, part)
        j = int(np.argmin(dist))
        if dist[j] < best:
            best, arg = float(dist[j]), float(part[j])
    return ProbeResult(arg, best, samples)


def distances_along(moving, fixed, motion, ts, chunk=1024):
    """Polygon distance at each parameter in ``ts``, evaluated in chunks."""
    ts = np.asarray(ts, dtype=float)
    out = np.empty(len(ts))
    for k in range(0, len(ts), chunk):
        vec = evaluate_many(motion, ts[k:k + chunk])
        lin = vec[:, :9].reshape(-1, 3, 3)
        rings = np.einsum("tij,kj->tki", lin, moving.vertices) + vec[:, None, 9:12]
        out[k:k + chunk] = batch_polygon_distance(rings, fixed.vertices)
    return out


def _inverse_metric(z, md):
    lead = z.shape[:-1]
    zr = z.reshape(lead + (3, 4))
    u_inv_t = np.linalg.inv(md.gram_factor).T
    rows = zr @ u_inv_t
    return np.concatenate([rows[..., :3].reshape(lead + (9,)), rows[..., 3]], axis=-1)


def random_boundary_displacements(md, R, count, rng):
    """Displacement 12-vectors on the metric sphere of radius R about the identity."""
    z = rng.standard_normal((count, 12))
    z *= R / np.linalg.norm(z, axis=1)[:, None]
    return _inverse_metric(z, md) + Displacement.identity().as_vector()


def random_boundary_displacement(md, R, seed):
    if not R > 0:
        raise ValueError("R must be positive")
    rng = np.random.default_rng(seed)
    return Displacement.from_vector(random_boundary_displacements(md, R, 1, rng)[0])


def orbit_radius_probe(md, x, R, samples=100_000, seed=0):
    """Largest sampled ``|alpha(x) - x|`` over the metric sphere ``|alpha - id| = R``."""
    rng = np.random.default_rng(seed)
    x = np.asarray(x, dtype=float)
    best = 0.0
    for k in range(0, samples, 20_000):
        n = min(20_000, samples - k)
        v = random_boundary_displacements(md, R, n, rng)
        moved = np.einsum("tij,j->ti", v[:, :9].reshape(-1, 3, 3), x) + v[:, 9:12]
        best = max(best, float(np.max(np.linalg.norm(moved - x, axis=1))))
    return best


def sample_polygon(polygon, count, rng):
    """Uniform-ish points of a convex polygon (fan triangles weighted by area)."""
    v = polygon.vertices
    tris = np.stack([np.repeat(v[:1], len(v) - 2, axis=0), v[1:-1], v[2:]], axis=1)
    area = np.linalg.norm(np.cross(tris[:, 1] - tris[:, 0], tris[:, 2] - tris[:, 0]), axis=1)
    pick = rng.choice(len(tris), size=count, p=area / area.sum())
    r1, r2 = rng.random(count), rng.random(count)
    flip = r1 + r2 > 1
    r1[flip], r2[flip] = 1 - r1[flip], 1 - r2[flip]
    t = tris[pick]
    return t[:, 0] + r1[:, None] * (t[:, 1] - t[:, 0]) + r2[:, None] * (t[:, 2] - t[:, 0])
