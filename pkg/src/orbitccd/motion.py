"""Rational Bezier motions in the 12-dimensional space of affine maps.

A motion is stored as control displacements (rows of a ``(n + 1, 12)``
array, see :meth:`orbitccd.metric.Displacement.as_vector`) with positive
weights over a parameter interval. Bounding balls are measured in the
object-oriented metric of a :class:`~orbitccd.metric.MassDistribution`.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import ArcTooLong, NonPositiveWeight, ParameterOutOfDomain, SingularDisplacement
from .errors import ValidationError
from .metric import Displacement, metric_coordinates


class RationalMotion:
    """Rational Bezier curve ``c(t)`` of affine displacements.

    Parameters
    ----------
    controls : sequence of Displacement or array, shape (n + 1, 12)
    weights : array, shape (n + 1,)
        Strictly positive weights (convex hull property).
    domain : (float, float)
        Parameter interval ``t0 < t1``.
    """

    __slots__ = ("controls", "weights", "domain")

    def __init__(self, controls, weights=None, domain=(0.0, 1.0)):
        if len(controls) and isinstance(controls[0], Displacement):
            ctrl = np.array([c.as_vector() for c in controls])
        else:
            ctrl = np.array(controls, dtype=float)
        if ctrl.ndim != 2 or ctrl.shape[1] != 12 or len(ctrl) < 1:
            raise ValidationError("motion needs at least one 12-dimensional control")
        w = np.ones(len(ctrl)) if weights is None else np.array(weights, dtype=float).reshape(-1)
        if len(w) != len(ctrl):
            raise ValidationError("one weight per control displacement is required")
        if np.any(~(w > 0)):
            raise NonPositiveWeight("motion weights must be positive")
        t0, t1 = float(domain[0]), float(domain[1])
        if not t0 < t1:
            raise ValidationError("motion domain must satisfy t0 < t1")
        if not (np.all(np.isfinite(ctrl)) and np.all(np.isfinite(w))):
            raise ValidationError("motion data must be finite")
        ctrl.flags.writeable = False
        w.flags.writeable = False
        self.controls = ctrl
        self.weights = w
        self.domain = (t0, t1)

    @property
    def degree(self):
        return len(self.controls) - 1

    @property
    def displacements(self):
        return [Displacement.from_vector(c) for c in self.controls]

    def homogeneous(self):
        return np.hstack([self.controls * self.weights[:, None], self.weights[:, None]])

    def translated(self, offset):
        """Same motion followed by a constant translation."""
        ctrl = self.controls.copy()
        ctrl[:, 9:12] += np.asarray(offset, dtype=float)
        return RationalMotion(ctrl, self.weights, self.domain)

    def __eq__(self, other):
        if not isinstance(other, RationalMotion):
            return NotImplemented
        return (self.domain == other.domain
                and self.controls.shape == other.controls.shape
                and bool(np.array_equal(self.controls, other.controls))
                and bool(np.array_equal(self.weights, other.weights)))

    __hash__ = None

    def __repr__(self):
        return f"RationalMotion(degree={self.degree}, domain={self.domain})"


@dataclass(frozen=True)
class Ball12:
    """Ball of displacements, radius measured in a mass-distribution metric."""

    center: Displacement
    radius: float

    def __post_init__(self):
        if not self.radius >= 0:
            raise ValueError("ball radius must be nonnegative")


def _local(motion, t):
    t0, t1 = motion.domain
    if not t0 <= t <= t1:
        raise ParameterOutOfDomain(f"t={t} outside [{t0}, {t1}]")
    return (t - t0) / (t1 - t0)


def _decasteljau(h, u):
    pts = h.copy()
    for _ in range(len(pts) - 1):
        pts = (1.0 - u) * pts[:-1] + u * pts[1:]
    return pts[0]


def evaluate_vector(motion, t):
    u = _local(motion, t)
    if u == 0.0:
        return motion.controls[0].copy()
    if u == 1.0:
        return motion.controls[-1].copy()
    h = _decasteljau(motion.homogeneous(), u)
    return h[:12] / h[12]


def evaluate(motion, t):
    """Curve point at parameter ``t`` by homogeneous de Casteljau."""
    return Displacement.from_vector(evaluate_vector(motion, t))


def evaluate_many(motion, ts):
    """Curve points for many parameters via the Bernstein basis, shape (T, 12).

    Independent of the de Casteljau path used by :func:`evaluate`.
    """
    t0, t1 = motion.domain
    u = (np.asarray(ts, dtype=float) - t0) / (t1 - t0)
    if np.any((u < 0) | (u > 1)):
        raise ParameterOutOfDomain("parameters outside the motion domain")
    n = motion.degree
    i = np.arange(n + 1)
    binom = np.array([comb(n, k) for k in i], dtype=float)
    basis = binom * u[:, None] ** i * (1.0 - u[:, None]) ** (n - i)
    h = basis @ motion.homogeneous()
    return h[:, :12] / h[:, 12:13]


def subdivide(motion, at=0.5):
    """Split at a fraction of the domain (midpoint by default)."""
    h = motion.homogeneous()
    left = [h[0]]
    right = [h[-1]]
    pts = h
    for _ in range(len(h) - 1):
        pts = (1.0 - at) * pts[:-1] + at * pts[1:]
        left.append(pts[0])
        right.append(pts[-1])
    left = np.array(left)
    right = np.array(right[::-1])
    t0, t1 = motion.domain
    m = t0 + at * (t1 - t0)
    return (RationalMotion(left[:, :12] / left[:, 12:], left[:, 12], (t0, m)),
            RationalMotion(right[:, :12] / right[:, 12:], right[:, 12], (m, t1)))


def control_ball(motion, md):
    """Ball centered at the curve midpoint through the farthest control."""
    t0, t1 = motion.domain
    center = evaluate_vector(motion, 0.5 * (t0 + t1))
    z = metric_coordinates(motion.controls - center, md)
    radius = float(np.sqrt(np.max(np.einsum("ij,ij->i", z, z))))
    return Ball12(Displacement.from_vector(center), radius)


def _circumball(support):
    p0 = support[0]
    if len(support) == 1:
        return p0.copy(), 0.0
    v = np.array(support[1:]) - p0
    gram = v @ v.T
    lam = np.linalg.lstsq(2.0 * gram, np.diag(gram), rcond=None)[0]
    c = p0 + lam @ v
    return c, float(np.linalg.norm(c - p0))


def _welzl(points, support, dim):
    if not points or len(support) == dim + 1:
        if not support:
            return np.zeros(dim), -1.0
        return _circumball(support)
    p = points[-1]
    c, r = _welzl(points[:-1], support, dim)
    if r >= 0 and np.linalg.norm(p - c) <= r * (1 + 1e-12) + 1e-300:
        return c, r
    return _welzl(points[:-1], support + [p], dim)


def miniball(points):
    """Minimum enclosing ball of a small Euclidean point set (Welzl)."""
    pts = [np.asarray(p, dtype=float) for p in points]
    c, _ = _welzl(pts, [], pts[0].shape[0])
    r = max(float(np.linalg.norm(p - c)) for p in pts)
    return c, r


def miniball_control(motion, md):
    """Minimum enclosing ball of the control displacements in the metric."""
    z = metric_coordinates(motion.controls, md)
    c, r = miniball(z)
    # undo the per-row triangular map: rows @ U.T = z_rows
    rows = np.linalg.solve(md.gram_factor, c.reshape(3, 4).T).T
    center = np.concatenate([rows[:, :3].ravel(), rows[:, 3]])
    return Ball12(Displacement.from_vector(center), r)


def curvature_ball(start_point, unit_tangent, arc_length, curvature_radius, md):
    """Bounding ball of a curve with bounded arc length and curvature.

    For arc length ``l < r pi / 2`` and curvature at most ``1 / r`` the curve
    lies in the ball of radius ``k = r (1 - cos(l/r)) / sin(l/r)`` centered
    at ``start + k * tangent``.
    """
    ell = float(arc_length)
    r = float(curvature_radius)
    if not (ell >= 0 and r > 0):
        raise ValueError("arc length must be nonnegative and curvature radius positive")
    if ell >= r * np.pi / 2:
        raise ArcTooLong(f"arc length {ell} >= r*pi/2 = {r * np.pi / 2}")
    tvec = unit_tangent.as_vector() if isinstance(unit_tangent, Displacement) else np.asarray(unit_tangent, float)
    tn = float(np.linalg.norm(metric_coordinates(tvec, md)))
    if abs(tn - 1.0) > 1e-9:
        raise ValueError("tangent must have unit length in the metric")
    x = ell / r
    # (1 - cos x) / sin x == tan(x / 2), better conditioned for small x
    k = r * np.tan(0.5 * x)
    start = start_point.as_vector() if isinstance(start_point, Displacement) else np.asarray(start_point, float)
    return Ball12(Displacement.from_vector(start + k * tvec), float(k))


def start_tangent(motion, md):
    """Metric-unit tangent direction at the start of the motion, or None."""
    if len(motion.controls) < 2:
        return None
    # c'(t0) is a positive multiple of the first control leg
    d = motion.controls[1] - motion.controls[0]
    n = float(np.linalg.norm(metric_coordinates(d, md)))
    return d / n if n > 0 else None


def inverse(d):
    """Inverse affine map."""
    a = d.linear
    scale = float(np.max(np.abs(a))) if np.any(a) else 0.0
    det = float(np.linalg.det(a))
    if scale == 0.0 or abs(det) <= 1e-12 * scale ** 3:
        raise SingularDisplacement("linear part is not invertible")
    ainv = np.linalg.inv(a)
    return Displacement(ainv, -ainv @ d.translation)


def apply(d, x):
    return d.apply(x)


# ---------------------------------------------------------------------------
# motion construction helpers

def bernstein_product(a, b):
    """Bernstein coefficients of the product of two Bernstein polynomials."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = len(a) - 1, len(b) - 1
    out = np.zeros((m + n + 1,) + np.broadcast_shapes(a.shape[1:], b.shape[1:]))
    for i in range(m + 1):
        for j in range(n + 1):
            out[i + j] += comb(m, i) * comb(n, j) / comb(m + n, i + j) * a[i] * b[j]
    return out


def degree_elevate(coeffs, times=1):
    c = np.asarray(coeffs, dtype=float)
    if times == 0:
        return c.copy()
    return bernstein_product(c, np.ones((times + 1,) + (1,) * (c.ndim - 1)))


def _quat_matrix_coeffs(q):
    """Bernstein coefficients of the (unnormalised) rotation matrix of q(t)."""
    qq = [[bernstein_product(q[:, i], q[:, j]) for j in range(4)] for i in range(4)]
    w, x, y, z = 0, 1, 2, 3
    m = np.empty((len(qq[0][0]), 3, 3))
    m[:, 0, 0] = qq[w][w] + qq[x][x] - qq[y][y] - qq[z][z]
    m[:, 1, 1] = qq[w][w] - qq[x][x] + qq[y][y] - qq[z][z]
    m[:, 2, 2] = qq[w][w] - qq[x][x] - qq[y][y] + qq[z][z]
    m[:, 0, 1] = 2 * (qq[x][y] - qq[w][z])
    m[:, 1, 0] = 2 * (qq[x][y] + qq[w][z])
    m[:, 0, 2] = 2 * (qq[x][z] + qq[w][y])
    m[:, 2, 0] = 2 * (qq[x][z] - qq[w][y])
    m[:, 1, 2] = 2 * (qq[y][z] - qq[w][x])
    m[:, 2, 1] = 2 * (qq[y][z] + qq[w][x])
    norm2 = qq[w][w] + qq[x][x] + qq[y][y] + qq[z][z]
    return m, norm2


def quaternion_to_matrix(q):
    q = np.asarray(q, dtype=float)
    m, n2 = _quat_matrix_coeffs(q[None, :])
    return m[0] / n2[0]


def quaternion_motion(quaternions, pivot=(0.0, 0.0, 0.0), offsets=None, domain=(0.0, 1.0)):
    """Rigid rational motion ``x -> R(t)(x - pivot) + pivot + offset(t)``.

    ``R(t)`` is the rotation of the polynomial quaternion curve with Bezier
    controls ``quaternions`` (degree k) and ``offset(t)`` is a polynomial
    Bezier curve with controls ``offsets`` (degree m, constant zero if
    omitted). The result is a rational Bezier curve of degree ``2k + m``
    whose points are exact rigid displacements.
    """
    q = np.asarray(quaternions, dtype=float)
    pivot = np.asarray(pivot, dtype=float)
    off = np.zeros((1, 3)) if offsets is None else np.asarray(offsets, dtype=float)
    mcoef, norm2 = _quat_matrix_coeffs(q)
    mdeg = len(off) - 1
    mcoef = degree_elevate(mcoef, mdeg)
    trans = bernstein_product(norm2, pivot + off) - mcoef @ pivot
    w = degree_elevate(norm2, mdeg)
    if np.any(w <= 0):
        raise NonPositiveWeight("quaternion controls give nonpositive weights; keep them closer together")
    ctrl = np.hstack([mcoef.reshape(len(w), 9), trans]) / w[:, None]
    return RationalMotion(ctrl, w, domain)


def constant_motion(d, domain=(0.0, 1.0)):
    return RationalMotion([d], [1.0], domain)
