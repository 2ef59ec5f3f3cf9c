"""Object-oriented Euclidean metric on affine displacements.

A discrete mass distribution (feature points ``m_i`` with weights ``w_i``)
turns the 12-dimensional space of affine maps ``x -> A x + a`` into a
Euclidean space with squared distance ``sum_i w_i |alpha(m_i) - beta(m_i)|^2``.
Everything the collision machinery needs from the metric is determined by
the total mass, the barycenter and the central inertia of the distribution.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateMass, NonPositiveWeight

DEGENERACY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Displacement:
    """Affine map ``x -> linear @ x + translation``, a point of R^12.

    The 12-vector layout used by :meth:`as_vector` is the row-major linear
    part followed by the translation.
    """

    linear: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        lin = np.array(self.linear, dtype=float).reshape(3, 3)
        tr = np.array(self.translation, dtype=float).reshape(3)
        lin.flags.writeable = False
        tr.flags.writeable = False
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "translation", tr)

    @classmethod
    def identity(cls):
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_translation(cls, d):
        return cls(np.eye(3), d)

    @classmethod
    def from_vector(cls, vec):
        vec = np.asarray(vec, dtype=float)
        return cls(vec[:9].reshape(3, 3), vec[9:12])

    def as_vector(self):
        return np.concatenate([self.linear.ravel(), self.translation])

    def apply(self, x):
        return np.asarray(x, dtype=float) @ self.linear.T + self.translation

    def compose(self, other):
        """``self o other``: apply ``other`` first."""
        return Displacement(self.linear @ other.linear,
                            self.linear @ other.translation + self.translation)

    def __add__(self, other):
        return Displacement(self.linear + other.linear, self.translation + other.translation)

    def __sub__(self, other):
        return Displacement(self.linear - other.linear, self.translation - other.translation)

    def __mul__(self, s):
        return Displacement(s * self.linear, s * self.translation)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Displacement):
            return NotImplemented
        return bool(np.array_equal(self.linear, other.linear)
                    and np.array_equal(self.translation, other.translation))

    __hash__ = None

    def __repr__(self):
        return f"Displacement(linear={self.linear.tolist()}, translation={self.translation.tolist()})"


@dataclass(frozen=True, eq=False)
class MassDistribution:
    """Weighted feature points with their derived inertia data.

    ``rotation`` holds the principal axes as columns (a proper rotation);
    ``eigenvalues`` are the principal central moments in descending order.
    Build instances with :func:`build_mass_distribution`.
    """

    points: np.ndarray
    weights: np.ndarray
    total_mass: float
    barycenter: np.ndarray
    central_inertia: np.ndarray
    rotation: np.ndarray
    eigenvalues: np.ndarray
    # derived caches
    inertia_inverse: np.ndarray = field(repr=False)
    gram_factor: np.ndarray = field(repr=False)

    @property
    def principal_frame(self):
        return self.rotation, self.barycenter


def _principal_axes(jc):
    vals, vecs = np.linalg.eigh(jc)
    order = np.argsort(vals, kind="stable")[::-1]
    vals = vals[order]
    vecs = vecs[:, order]
    for k in range(2):
        col = vecs[:, k]
        if col[int(np.argmax(np.abs(col)))] < 0:
            vecs[:, k] = -col
    vecs[:, 2] = np.cross(vecs[:, 0], vecs[:, 1])
    return vals, vecs


def build_mass_distribution(points, weights=None):
    """Build a discrete mass distribution.

    Parameters
    ----------
    points : array, shape (n, 3)
        Feature points, ``n >= 4``, affinely spanning 3-space.
    weights : array, shape (n,), optional
        Positive point masses; unit masses if omitted.

    Returns
    -------
    md : MassDistribution

    Raises
    ------
    NonPositiveWeight
        If any weight is not strictly positive.
    DegenerateMass
        If the central inertia is (numerically) rank deficient.
    """
    pts = np.array(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError("points must have shape (n, 3)")
    w = np.ones(len(pts)) if weights is None else np.array(weights, dtype=float).reshape(-1)
    if len(w) != len(pts):
        raise ValueError("points and weights differ in length")
    if np.any(~(w > 0)):
        raise NonPositiveWeight("mass weights must be positive")
    if len(pts) < 4:
        raise DegenerateMass("at least 4 feature points are required")
    total = float(np.sum(w))
    b = (w @ pts) / total
    c = pts - b
    jc = (c * w[:, None]).T @ c
    jc = 0.5 * (jc + jc.T)
    vals, rot = _principal_axes(jc)
    if not vals[2] > DEGENERACY_TOL * float(np.sum(vals)):
        raise DegenerateMass("central inertia is not positive definite")
    jinv = rot @ np.diag(1.0 / vals) @ rot.T
    h = np.hstack([pts, np.ones((len(pts), 1))])
    gram = (h * w[:, None]).T @ h
    gram_factor = np.linalg.cholesky(gram).T
    for arr in (pts, w, b, jc, rot, vals, jinv, gram_factor):
        arr.flags.writeable = False
    return MassDistribution(pts, w, total, b, jc, rot, vals, jinv, gram_factor)


def metric_coordinates(vectors, md):
    """Map displacement 12-vectors to coordinates where the metric is Euclidean.

    ``|metric_coordinates(v)|^2 == <v, v>`` for the scalar product induced
    by ``md``. Accepts any leading batch shape.
    """
    v = np.asarray(vectors, dtype=float)
    lead = v.shape[:-1]
    rows = np.concatenate([v[..., :9].reshape(lead + (3, 3)), v[..., 9:12, None]], axis=-1)
    return (rows @ md.gram_factor.T).reshape(lead + (12,))


def displacement_inner(alpha, beta, md):
    """Scalar product ``sum_i w_i <alpha(m_i), beta(m_i)>``."""
    return float(np.sum(md.weights * np.einsum("ij,ij->i", alpha.apply(md.points),
                                                beta.apply(md.points))))


def displacement_distance2(alpha, beta, md):
    """Squared object-oriented distance ``sum_i w_i |alpha(m_i) - beta(m_i)|^2``."""
    d = alpha.apply(md.points) - beta.apply(md.points)
    return float(np.sum(md.weights * np.einsum("ij,ij->i", d, d)))


def distortion_rate2(x, md):
    """Squared distortion rate: orbit radius over ball radius, squared.

    ``1/|mu| + sum_k xi_k^2 / mu_k`` with ``xi`` the principal coordinates of
    ``x`` about the barycenter. Vectorised over leading axes of ``x``.
    """
    d = np.asarray(x, dtype=float) - md.barycenter
    return 1.0 / md.total_mass + np.einsum("...i,ij,...j->...", d, md.inertia_inverse, d)


def distortion_rate(x, md):
    return np.sqrt(distortion_rate2(x, md))


@dataclass(frozen=True)
class LineMetricData:
    """``rho^2(anchor + t direction) = rho0^2 + t^2 / lam^2``."""

    anchor: np.ndarray
    direction: np.ndarray
    rho0: float
    lam: float


@dataclass(frozen=True)
class PlaneMetricData:
    """``rho^2(anchor + s b1 + t b2) = rho0^2 + s^2/lam1^2 + t^2/lam2^2``.

    ``lam1 <= lam2`` and ``b1 x b2`` points along the input plane's normal.
    """

    anchor: np.ndarray
    basis1: np.ndarray
    basis2: np.ndarray
    rho0: float
    lam1: float
    lam2: float

    @property
    def normal(self):
        return np.cross(self.basis1, self.basis2)


def line_metric_data(point, direction, md):
    p = np.asarray(point, dtype=float)
    u = np.asarray(direction, dtype=float)
    norm = float(np.linalg.norm(u))
    if norm == 0.0:
        raise ValueError("line direction must be nonzero")
    u = u / norm
    m = md.inertia_inverse
    d = p - md.barycenter
    quad = float(u @ m @ u)
    lin = float(u @ m @ d)
    const = 1.0 / md.total_mass + float(d @ m @ d)
    s = -lin / quad
    rho0_sq = max(const - lin * lin / quad, 0.0)
    return LineMetricData(p + s * u, u, float(np.sqrt(rho0_sq)), float(1.0 / np.sqrt(quad)))


def plane_metric_data(point, span1, span2, md):
    """Principal-axis form of the distortion rate restricted to a plane."""
    p = np.asarray(point, dtype=float)
    e1 = np.asarray(span1, dtype=float)
    e2 = np.asarray(span2, dtype=float)
    normal = np.cross(e1, e2)
    if np.linalg.norm(normal) <= 1e-14 * np.linalg.norm(e1) * np.linalg.norm(e2):
        raise ValueError("plane spanning vectors are linearly dependent")
    e1 = e1 / np.linalg.norm(e1)
    e2 = e2 - (e2 @ e1) * e1
    e2 = e2 / np.linalg.norm(e2)
    basis = np.column_stack([e1, e2])
    m = md.inertia_inverse
    d = p - md.barycenter
    hess = basis.T @ m @ basis
    grad = basis.T @ m @ d
    w = -np.linalg.solve(hess, grad)
    anchor = p + basis @ w
    rho0_sq = max(1.0 / md.total_mass + float(d @ m @ d) + float(grad @ w), 0.0)
    vals, vecs = np.linalg.eigh(hess)
    # larger curvature first so that lam1 <= lam2
    vals = vals[::-1]
    vecs = vecs[:, ::-1]
    b1 = basis @ vecs[:, 0]
    b2 = basis @ vecs[:, 1]
    b1 /= np.linalg.norm(b1)
    b2 -= (b2 @ b1) * b1
    b2 /= np.linalg.norm(b2)
    if np.cross(b1, b2) @ normal < 0:
        b2 = -b2
    return PlaneMetricData(anchor, b1, b2, float(np.sqrt(rho0_sq)),
                           float(1.0 / np.sqrt(vals[0])), float(1.0 / np.sqrt(vals[1])))


def equivalent_vertex_masses(md):
    """Six equal masses on the principal axes with the same metric.

    The points ``b +- sqrt(3 mu_k / |mu|) e_k`` each carry ``|mu| / 6`` and
    reproduce total mass, barycenter and central inertia exactly, hence the
    same distance between any two displacements.
    """
    h = np.sqrt(3.0 * md.eigenvalues / md.total_mass)
    axes = md.rotation * h
    pts = np.concatenate([md.barycenter + axes.T, md.barycenter - axes.T])
    return build_mass_distribution(pts, np.full(6, md.total_mass / 6.0))


def max_distortion_over_polygon(polygon, md):
    """Maximal distortion rate over a convex polygon.

    ``rho^2`` is a convex quadratic, so the maximum sits at a vertex.
    """
    verts = getattr(polygon, "vertices", polygon)
    return float(np.sqrt(np.max(distortion_rate2(np.atleast_2d(verts), md))))
