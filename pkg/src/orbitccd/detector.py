"""Guaranteed collision detection by motion subdivision.

The motion is covered by metric balls of displacements. For every ball the
orbit of the moving polygon is tested against the fixed polygon; if they
may touch, the motion is split and both halves are tested again. The
recursion stops with a suspect interval once the orbit is thinner than
``epsilon`` (or the depth limit is hit). An empty result certifies that
the polygons never touch.
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ArcTooLong, BallTooLarge
from .geometry import Polygon3, diameter, polygon_area2d
from .metric import (build_mass_distribution, distortion_rate2, line_metric_data,
                     max_distortion_over_polygon, plane_metric_data)
from .motion import (control_ball, curvature_ball, inverse, miniball_control, start_tangent,
                     subdivide)
from .orbits import CONDITIONING_TOL, FatFace, edge_frame
from .primitives import (points_vs_fat_face, polygons_intersect, segments_vs_edge_solids,
                         spheres_vs_polygon)

BALL_STRATEGIES = ("control", "miniball", "curvature")
MASS_STRATEGIES = ("global", "per_polygon")
APEX_HEIGHT = 0.1


@dataclass(frozen=True)
class PrecomputedPolygon:
    """Moving polygon with its metric data, reusable across motions."""

    polygon: Polygon3
    edge_metric: tuple
    face_metric: object
    max_rho: float
    md_ref: object
    vertex_rho: np.ndarray = field(repr=False)
    # stacked per-edge frames and data for the batched fat edge test
    edge_origins: np.ndarray = field(repr=False)
    edge_axes: np.ndarray = field(repr=False)
    edge_rho0: np.ndarray = field(repr=False)
    edge_lam: np.ndarray = field(repr=False)
    edge_span: np.ndarray = field(repr=False)
    face_axes: np.ndarray = field(repr=False)
    face_local: np.ndarray = field(repr=False)
    # bounding sphere of the polygon for the coarse exclusion test
    center: np.ndarray = field(repr=False)
    radius: float = 0.0


class IntervalList:
    """Sorted, pairwise disjoint closed parameter intervals.

    Intervals that overlap or share an end point are merged on construction.
    """

    __slots__ = ("intervals",)

    def __init__(self, intervals=()):
        merged = []
        for lo, hi in sorted((float(a), float(b)) for a, b in intervals):
            if lo > hi:
                raise ValueError("interval with lo > hi")
            if merged and lo <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
            else:
                merged.append((lo, hi))
        self.intervals = tuple(merged)

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def __bool__(self):
        return bool(self.intervals)

    def __eq__(self, other):
        if isinstance(other, IntervalList):
            return self.intervals == other.intervals
        return NotImplemented

    def __repr__(self):
        return f"IntervalList({list(self.intervals)})"

    def contains(self, t):
        return any(lo <= t <= hi for lo, hi in self.intervals)

    def covers(self, lo, hi):
        return any(a <= lo and hi <= b for a, b in self.intervals)


@dataclass(frozen=True)
class DetectorConfig:
    """Recursion parameters.

    ``epsilon=None`` means 1% of the moving geometry's diameter.
    ``curvature_bounds`` maps a motion segment to ``(arc_length,
    curvature_radius)`` bounds and is required by the ``curvature`` strategy.
    """

    epsilon: Optional[float] = None
    max_depth: int = 40
    ball_strategy: str = "control"
    mass_strategy: str = "per_polygon"
    threads: int = 1
    curvature_bounds: Optional[Callable] = field(default=None, compare=False)

    def __post_init__(self):
        if self.epsilon is not None and not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        if self.ball_strategy not in BALL_STRATEGIES:
            raise ValueError(f"unknown ball strategy {self.ball_strategy!r}")
        if self.mass_strategy not in MASS_STRATEGIES:
            raise ValueError(f"unknown mass strategy {self.mass_strategy!r}")
        if self.ball_strategy == "curvature" and self.curvature_bounds is None:
            raise ValueError("curvature strategy needs curvature_bounds")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")

    def resolve_epsilon(self, polygons):
        if self.epsilon is not None:
            return float(self.epsilon)
        pts = np.concatenate([p.vertices for p in polygons])
        return 0.01 * diameter(pts)


def precompute(polygon, md):
    """Metric data of the edges and the plane of a moving polygon."""
    starts, ends = polygon.edges()
    edges = tuple(line_metric_data(a, b - a, md) for a, b in zip(starts, ends))
    face = plane_metric_data(polygon.vertices[0], polygon.u, polygon.v, md)
    rho = np.sqrt(distortion_rate2(polygon.vertices, md))
    origins = np.array([e.anchor for e in edges])
    axes = np.array([edge_frame(e.direction) for e in edges])
    # axial coordinates of both end points, sorted per edge
    span = np.sort(np.stack([np.einsum("kj,kj->k", starts - origins, axes[:, 0]),
                             np.einsum("kj,kj->k", ends - origins, axes[:, 0])], axis=1), axis=1)
    face_axes = np.array([face.basis1, face.basis2, np.cross(face.basis1, face.basis2)])
    local = (polygon.vertices - face.anchor) @ face_axes[:2].T
    if polygon_area2d(local) < 0:
        local = local[::-1].copy()
    center = polygon.vertices.mean(axis=0)
    arrays = (rho, origins, axes, np.array([e.rho0 for e in edges]),
              np.array([e.lam for e in edges]), span, face_axes, local, center)
    for arr in arrays:
        arr.flags.writeable = False
    radius = float(np.max(np.linalg.norm(polygon.vertices - center, axis=1)))
    return PrecomputedPolygon(polygon, edges, face, max_distortion_over_polygon(polygon, md), md,
                              *arrays, radius)


def auto_mass_distribution(polygons):
    """Unit masses at the vertices plus one over the barycenter.

    The extra point sits at a tenth of the diameter above the vertex
    barycenter, along the mean normal, so that the distribution spans
    3-space.
    """
    verts = np.unique(np.concatenate([p.vertices for p in polygons]), axis=0)
    normal = np.sum([p.normal * p.area() for p in polygons], axis=0)
    if np.linalg.norm(normal) == 0:
        normal = polygons[0].normal
    normal = normal / np.linalg.norm(normal)
    apex = verts.mean(axis=0) + APEX_HEIGHT * diameter(verts) * normal
    return build_mass_distribution(np.vstack([verts, apex]))


def _plane_separated(moving, fixed_zero, R_eff):
    """Whether the plane of either polygon keeps the orbit and ``fixed_zero`` apart.

    The vertex balls suffice against the fixed plane: ``rho`` is convex on
    the polygon, so height minus orbit radius is smallest at a vertex.
    """
    poly = moving.polygon
    slack = 1e-12 * (poly.diameter + fixed_zero.diameter + abs(fixed_zero.offset))
    radii = R_eff * moving.vertex_rho + slack
    h = poly.vertices @ fixed_zero.normal - fixed_zero.offset
    if np.all(h > radii) or np.all(h < -radii):
        return True
    reach = R_eff * moving.max_rho + slack
    h = fixed_zero.vertices @ poly.normal - poly.offset
    return bool(np.all(h > reach) or np.all(h < -reach))


def intersection(moving, fixed, g, R):
    """Whether the orbit of the moving polygon under ``B(g, R)`` may meet ``fixed``.

    The test runs in zero position against ``g^-1(fixed)``. If the linear
    part of ``g`` is not orthogonal the pulled-back orbit balls become
    ellipsoids; the radius is then inflated by the spectral norm of
    ``g^-1`` so the test stays conservative.

    Raises
    ------
    BallTooLarge
        If some edge or face orbit is not a hyperboloid at this radius.
    SingularDisplacement
        If ``g`` is not invertible.
    """
    ginv = inverse(g)
    amp = float(np.linalg.norm(ginv.linear, 2))
    poly = moving.polygon
    R_eff = max(R * amp * (1.0 + 1e-12), 1e-12 * poly.diameter / moving.max_rho)
    fixed_zero = fixed.transformed(ginv.linear, ginv.translation)
    # coarse exclusion: no point of the polygon moves farther than R_eff * max_rho
    fc = fixed_zero.vertices.mean(axis=0)
    fr = float(np.max(np.linalg.norm(fixed_zero.vertices - fc, axis=1)))
    reach = moving.radius + fr + R_eff * moving.max_rho
    if np.linalg.norm(fc - moving.center) > reach * (1.0 + 1e-9):
        return False
    if _plane_separated(moving, fixed_zero, R_eff):
        return False
    # fat polygon in zero position: edge solids (stacked) and face patch
    lam = moving.edge_lam
    face = moving.face_metric
    if R_eff >= (1.0 - CONDITIONING_TOL) * min(float(lam.min()), face.lam1, face.lam2):
        raise BallTooLarge(f"R={R_eff:.6g} exceeds an edge or face validity bound")
    p2 = R_eff * R_eff * moving.edge_rho0 ** 2
    q2 = p2 * ((lam / R_eff) ** 2 - 1.0)
    shrink = 1.0 - (R_eff / lam) ** 2
    slab_lo = shrink * moving.edge_span[:, 0]
    slab_hi = shrink * moving.edge_span[:, 1]
    c2 = R_eff * R_eff * face.rho0 ** 2
    s1 = 1.0 - (R_eff / face.lam1) ** 2
    s2 = 1.0 - (R_eff / face.lam2) ** 2
    fat_face = FatFace(face.anchor, moving.face_axes, c2 * ((face.lam1 / R_eff) ** 2 - 1.0),
                       c2 * ((face.lam2 / R_eff) ** 2 - 1.0), c2,
                       moving.face_local * np.array([s1, s2]), (s1, s2))

    if spheres_vs_polygon(poly.vertices, R_eff * moving.vertex_rho, fixed_zero):
        return True
    fs, fe = fixed_zero.edges()
    if segments_vs_edge_solids(fs, fe, moving.edge_origins, moving.edge_axes, p2, q2,
                               slab_lo, slab_hi):
        return True
    if points_vs_fat_face(fixed_zero.vertices, fat_face):
        return True
    # polygons already crossing at the ball center: no first-contact
    # feature pair needs to be near, so test the crossing directly
    return polygons_intersect(poly, fixed_zero)


def bounding_ball(motion, md, config):
    if config.ball_strategy == "miniball":
        return miniball_control(motion, md)
    if config.ball_strategy == "curvature":
        tangent = start_tangent(motion, md)
        if tangent is not None:
            ell, r = config.curvature_bounds(motion)
            try:
                return curvature_ball(motion.controls[0], tangent, ell, r, md)
            except ArcTooLong:
                pass
    return control_ball(motion, md)


@dataclass
class PairResult:
    """Outcome and work counters of one moving/fixed polygon pair."""

    moving_index: int
    fixed_index: int
    intervals: IntervalList
    intersection_calls: int = 0
    oversized_balls: int = 0
    max_depth: int = 0
    leaves: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def certified(self):
        return not self.intervals


def collision_report(moving, fixed, motion, config, epsilon=None, *, intersect=intersection,
                     indices=(0, 0)):
    """Run the subdivision recursion and keep work counters.

    ``leaves`` lists ``(lo, hi, reason)`` for every suspect leaf, where
    reason is ``"epsilon"`` or ``"depth"``.
    """
    eps = config.resolve_epsilon([moving.polygon]) if epsilon is None else epsilon
    md = moving.md_ref
    result = PairResult(indices[0], indices[1], IntervalList())
    found = []
    start = time.perf_counter()

    def recurse(seg, depth):
        ball = bounding_ball(seg, md, config)
        result.max_depth = max(result.max_depth, depth)
        too_large = False
        try:
            hit = intersect(moving, fixed, ball.center, ball.radius)
            result.intersection_calls += 1
        except BallTooLarge:
            # no fat polygon exists for this ball, so no test was made
            result.oversized_balls += 1
            hit = too_large = True
        if not hit:
            return
        if not too_large and ball.radius * moving.max_rho < eps:
            found.append(seg.domain)
            result.leaves.append((*seg.domain, "epsilon"))
            return
        if depth >= config.max_depth:
            found.append(seg.domain)
            result.leaves.append((*seg.domain, "depth"))
            return
        left, right = subdivide(seg)
        recurse(left, depth + 1)
        recurse(right, depth + 1)

    recurse(motion, 0)
    result.intervals = IntervalList(found)
    result.seconds = time.perf_counter() - start
    return result


def collision(moving, fixed, motion, config, *, intersect=intersection):
    """Suspect parameter intervals; empty certifies no collision."""
    return collision_report(moving, fixed, motion, config, intersect=intersect).intervals


@dataclass
class Report:
    pairs: list
    mass_strategy: str
    epsilon: float
    seconds: float = 0.0

    @property
    def certified(self):
        return all(p.certified for p in self.pairs)

    @property
    def intersection_calls(self):
        return sum(p.intersection_calls for p in self.pairs)

    @property
    def oversized_balls(self):
        return sum(p.oversized_balls for p in self.pairs)

    @property
    def max_depth(self):
        return max((p.max_depth for p in self.pairs), default=0)


def collide_surfaces(moving_polys, fixed_polys, motion, config, mass=None, *,
                     intersect=intersection):
    """Check every moving polygon against every fixed polygon.

    Parameters
    ----------
    moving_polys, fixed_polys : list of Polygon3
        Convex pieces of the moving and fixed surfaces.
    motion : RationalMotion
    config : DetectorConfig
    mass : MassDistribution, optional
        Explicit mass distribution used for every moving polygon; overrides
        ``config.mass_strategy``.

    Returns
    -------
    report : Report
        Pair results in (moving, fixed) index order, whatever the thread
        count.
    """
    start = time.perf_counter()
    eps = config.resolve_epsilon(moving_polys)
    if mass is not None:
        mds = [mass] * len(moving_polys)
    elif config.mass_strategy == "global":
        mds = [auto_mass_distribution(moving_polys)] * len(moving_polys)
    else:
        mds = [auto_mass_distribution([p]) for p in moving_polys]
    pre = [precompute(p, md) for p, md in zip(moving_polys, mds)]
    jobs = [(i, j) for i in range(len(moving_polys)) for j in range(len(fixed_polys))]

    def run(job):
        i, j = job
        return collision_report(pre[i], fixed_polys[j], motion, config, eps,
                                intersect=intersect, indices=job)

    if config.threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            pairs = list(pool.map(run, jobs))
    else:
        pairs = [run(job) for job in jobs]
    return Report(pairs, "explicit" if mass is not None else config.mass_strategy, eps,
                  time.perf_counter() - start)
