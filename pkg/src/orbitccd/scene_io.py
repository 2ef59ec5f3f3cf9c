"""Scene files and convex decomposition of planar faces.

A scene is a JSON document with the top-level keys ``fixed``, ``moving``,
``motion``, ``mass`` and ``config`` (plus an optional free-form ``meta``
object)::

    {
      "fixed":  [[[0, 0, 0], [1, 0, 0], [0, 1, 0]]],
      "moving": [[[0, 0, 1], [1, 0, 1], [0, 1, 1]]],
      "motion": {"domain": [0, 1],
                 "controls": [{"matrix": [1, 0, 0, 0, 1, 0, 0, 0, 1],
                               "translation": [0, 0, 0], "weight": 1},
                              {"quat": [1, 0, 0, 0],
                               "translation": [0, 0, -2], "weight": 1}]},
      "mass": "auto",
      "config": {"epsilon": 0.01, "max_depth": 40,
                 "ball_strategy": "control", "mass_strategy": "per_polygon"}
    }

Faces may be simple non-convex polygons; they are split into convex
pieces on input. Quaternion controls are turned into matrices, so a
written scene always holds matrices.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .detector import DetectorConfig, collide_surfaces
from .errors import NonPositiveWeight, NonSimplePolygon, ParseError, ValidationError
from .geometry import (Polygon3, cross2, diameter, is_convex2d, newell_normal, plane_basis,
                       polygon_area2d)
from .metric import MassDistribution, build_mass_distribution
from .motion import RationalMotion, quaternion_to_matrix

KEYS = ("fixed", "moving", "motion", "mass", "config")
CONFIG_KEYS = ("epsilon", "max_depth", "ball_strategy", "mass_strategy")
FILE_STRATEGIES = ("control", "miniball")


@dataclass(frozen=True)
class MassSpec:
    """Explicit point masses of the moving surface."""

    points: tuple
    weights: tuple

    def build(self):
        return build_mass_distribution(np.array(self.points, dtype=float),
                                       np.array(self.weights, dtype=float))


@dataclass(frozen=True)
class Scene:
    fixed: list
    moving: list
    motion: RationalMotion
    mass: Union[str, MassSpec] = "auto"
    config: DetectorConfig = field(default_factory=DetectorConfig)
    meta: dict = field(default_factory=dict)

    def mass_distribution(self) -> Optional[MassDistribution]:
        """Explicit distribution, or None when the detector chooses."""
        return None if self.mass == "auto" else self.mass.build()

    def run(self, config=None, **kw):
        """Collide every moving piece with every fixed piece."""
        return collide_surfaces(self.moving, self.fixed, self.motion, config or self.config,
                                self.mass_distribution(), **kw)


# ---------------------------------------------------------------------------
# decomposition


def _segments_cross(a, b, c, d, tol):
    """Closed segments ab and cd share a point (2D)."""
    d1 = cross2(b - a, c - a)
    d2 = cross2(b - a, d - a)
    d3 = cross2(d - c, a - c)
    d4 = cross2(d - c, b - c)
    if ((d1 > tol and d2 < -tol) or (d1 < -tol and d2 > tol)) and \
            ((d3 > tol and d4 < -tol) or (d3 < -tol and d4 > tol)):
        return True

    def on(p, q, r, val):
        return abs(val) <= tol and min(p[0], q[0]) - tol <= r[0] <= max(p[0], q[0]) + tol \
            and min(p[1], q[1]) - tol <= r[1] <= max(p[1], q[1]) + tol

    return on(a, b, c, d1) or on(a, b, d, d2) or on(c, d, a, d3) or on(c, d, b, d4)


def _check_simple(p2):
    n = len(p2)
    scale = max(float(np.max(np.abs(p2 - p2.mean(axis=0)))), 1e-300)
    tol = 1e-12 * scale * scale
    for i in range(n):
        a, b = p2[i], p2[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or j == (i + 1) % n:
                continue
            if _segments_cross(a, b, p2[j], p2[(j + 1) % n], tol):
                raise NonSimplePolygon(f"edges {i} and {j} intersect")


def _ear_clip(p2):
    """Triangles (index triples) of a simple counterclockwise ring."""
    idx = list(range(len(p2)))
    scale = max(float(np.max(np.abs(p2 - p2.mean(axis=0)))), 1e-300)
    tol = 1e-12 * scale * scale
    tris = []
    while len(idx) > 3:
        m = len(idx)
        for k in range(m):
            i, j, l = idx[k - 1], idx[k], idx[(k + 1) % m]
            a, b, c = p2[i], p2[j], p2[l]
            if cross2(b - a, c - b) <= tol:
                continue
            blocked = False
            for o in idx:
                if o in (i, j, l):
                    continue
                p = p2[o]
                if (cross2(b - a, p - a) >= -tol and cross2(c - b, p - b) >= -tol
                        and cross2(a - c, p - c) >= -tol):
                    blocked = True
                    break
            if not blocked:
                tris.append([i, j, l])
                del idx[k]
                break
        else:
            raise NonSimplePolygon("no ear found; polygon is degenerate")
    tris.append(idx)
    return tris


def _merge_convex(pieces, p2):
    """Drop diagonals whose removal keeps both sides convex."""
    merged = True
    while merged:
        merged = False
        for i in range(len(pieces)):
            for j in range(i + 1, len(pieces)):
                a, b = pieces[i], pieces[j]
                joint = _join(a, b)
                if joint is not None and is_convex2d(p2[joint], tol=1e-10):
                    pieces[i] = joint
                    del pieces[j]
                    merged = True
                    break
            if merged:
                break
    return pieces


def _join(a, b):
    """Union ring of two index rings sharing an edge, or None."""
    na, nb = len(a), len(b)
    for s in range(na):
        u, v = a[s], a[(s + 1) % na]
        for t in range(nb):
            if b[t] == v and b[(t + 1) % nb] == u:
                # walk a from v around to u, then b from u around to v
                ring = [a[(s + 1 + k) % na] for k in range(na)]
                ring += [b[(t + 2 + k) % nb] for k in range(nb - 2)]
                return ring
    return None


def decompose(vertices):
    """Split a simple planar polygon into convex pieces.

    Convex input comes back as one piece with the original vertices.
    Otherwise the polygon is ear-clipped and triangles are merged greedily
    across diagonals while the union stays convex.

    Raises
    ------
    NonSimplePolygon
        If the boundary touches or crosses itself.
    ValidationError
        For too few, non-finite or non-planar vertices.
    """
    v = np.array(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 3 or len(v) < 3:
        raise ValidationError("polygon needs at least 3 vertices in 3-space")
    if not np.all(np.isfinite(v)):
        raise ValidationError("polygon vertices must be finite")
    # best-fit plane, oriented along the boundary's winding when it has one
    normal = np.linalg.svd(v - v.mean(axis=0))[2][-1]
    if newell_normal(v) @ normal < 0:
        normal = -normal
    u1, u2 = plane_basis(normal)
    p2 = np.stack([v @ u1, v @ u2], axis=1)
    _check_simple(p2)
    diam = diameter(v)
    if abs(polygon_area2d(p2)) <= 1e-14 * diam * diam:
        raise ValidationError("polygon has zero area")
    if is_convex2d(p2, tol=1e-10):
        return [Polygon3(v)]
    pieces = _merge_convex(_ear_clip(p2), p2)
    return [Polygon3(v[ring]) for ring in pieces]


# ---------------------------------------------------------------------------
# parsing


def _fail(msg, path):
    raise ParseError(msg, path)


def _numbers(obj, count, path):
    if not isinstance(obj, list) or (count is not None and len(obj) != count):
        _fail(f"expected a list of {count} numbers", path)
    for k, x in enumerate(obj):
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            _fail("expected a number", f"{path}[{k}]")
    return [float(x) for x in obj]


def _polygon_list(obj, path):
    if not isinstance(obj, list) or not obj:
        _fail("expected a nonempty list of polygons", path)
    out = []
    for k, ring in enumerate(obj):
        if not isinstance(ring, list):
            _fail("expected a list of vertices", f"{path}[{k}]")
        verts = [_numbers(p, 3, f"{path}[{k}][{i}]") for i, p in enumerate(ring)]
        try:
            out.extend(decompose(verts))
        except ValidationError as exc:
            raise type(exc)(f"{path}[{k}]: {exc}") from exc
    return out


def _motion(obj):
    if not isinstance(obj, dict):
        _fail("expected an object", "motion")
    controls = obj.get("controls")
    if not isinstance(controls, list):
        _fail("expected a list of controls", "motion.controls")
    if not controls:
        raise ValidationError("motion has no control displacements")
    domain = _numbers(obj.get("domain", [0.0, 1.0]), 2, "motion.domain")
    rows, weights = [], []
    for k, c in enumerate(controls):
        path = f"motion.controls[{k}]"
        if not isinstance(c, dict):
            _fail("expected an object", path)
        if ("matrix" in c) == ("quat" in c):
            _fail("give exactly one of 'matrix' and 'quat'", path)
        if "matrix" in c:
            lin = _numbers(c["matrix"], 9, path + ".matrix")
        else:
            q = np.array(_numbers(c["quat"], 4, path + ".quat"))
            if not np.linalg.norm(q) > 0:
                raise ValidationError(f"{path}.quat: zero quaternion")
            lin = quaternion_to_matrix(q).reshape(9).tolist()
        trans = _numbers(c.get("translation", [0.0, 0.0, 0.0]), 3, path + ".translation")
        w = c.get("weight", 1.0)
        if isinstance(w, bool) or not isinstance(w, (int, float)):
            _fail("expected a number", path + ".weight")
        rows.append(lin + trans)
        weights.append(float(w))
    try:
        return RationalMotion(rows, weights, domain)
    except NonPositiveWeight as exc:
        raise ValidationError(f"motion: {exc}") from exc


def _mass(obj):
    if obj == "auto":
        return "auto"
    if not isinstance(obj, dict) or "points" not in obj:
        _fail("expected \"auto\" or an object with points and weights", "mass")
    pts = obj["points"]
    if not isinstance(pts, list) or not pts:
        _fail("expected a nonempty list of points", "mass.points")
    points = tuple(tuple(_numbers(p, 3, f"mass.points[{k}]")) for k, p in enumerate(pts))
    weights = tuple(_numbers(obj.get("weights", [1.0] * len(points)), len(points),
                             "mass.weights"))
    spec = MassSpec(points, weights)
    try:
        spec.build()
    except ValueError as exc:
        raise ValidationError(f"mass: {exc}") from exc
    return spec


def _config(obj):
    if not isinstance(obj, dict):
        _fail("expected an object", "config")
    unknown = set(obj) - set(CONFIG_KEYS)
    if unknown:
        _fail(f"unknown keys {sorted(unknown)}", "config")
    kw = dict(obj)
    if kw.get("ball_strategy", "control") not in FILE_STRATEGIES:
        raise ValidationError(f"config.ball_strategy must be one of {FILE_STRATEGIES}")
    if "max_depth" in kw and (isinstance(kw["max_depth"], bool)
                              or not isinstance(kw["max_depth"], int)):
        _fail("expected an integer", "config.max_depth")
    if kw.get("epsilon") is not None:
        kw["epsilon"] = _numbers([kw["epsilon"]], 1, "config.epsilon")[0]
    try:
        return DetectorConfig(**kw)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"config: {exc}") from exc


def scene_from_dict(doc):
    if not isinstance(doc, dict):
        _fail("top level must be an object", "$")
    unknown = set(doc) - set(KEYS) - {"meta"}
    if unknown:
        _fail(f"unknown keys {sorted(unknown)}", "$")
    for key in ("fixed", "moving", "motion"):
        if key not in doc:
            _fail(f"missing key {key!r}", "$")
    meta = doc.get("meta", {})
    if not isinstance(meta, dict):
        _fail("expected an object", "meta")
    return Scene(fixed=_polygon_list(doc["fixed"], "fixed"),
                 moving=_polygon_list(doc["moving"], "moving"),
                 motion=_motion(doc["motion"]),
                 mass=_mass(doc.get("mass", "auto")),
                 config=_config(doc.get("config", {})),
                 meta=meta)


def parse_scene(text):
    """Parse and validate a scene document.

    Raises
    ------
    ParseError
        Malformed JSON (position is ``line:column``) or wrong structure
        (position is a path such as ``motion.controls[2].weight``).
    ValidationError
        Geometrically invalid content: non-simple polygons, non-positive
        weights, an empty motion.
    """
    if hasattr(text, "read"):
        text = text.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"{exc.lineno}:{exc.colno}") from None
    return scene_from_dict(doc)


def load_scene(path):
    with open(path, encoding="utf-8") as fh:
        return parse_scene(fh.read())


# ---------------------------------------------------------------------------
# writing


def _num(x):
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("scene numbers must be finite")
    return format(x, ".17g")


def _arr(values):
    return "[" + ", ".join(_num(x) for x in values) + "]"


def serialize_scene(scene):
    """Canonical text: fixed key order, numbers with 17 significant digits."""
    lines = ["{"]

    def polys(key, ps):
        body = ",\n".join("    [" + ", ".join(_arr(v) for v in p.vertices) + "]" for p in ps)
        return f'  "{key}": [\n{body}\n  ]'

    m = scene.motion
    ctrl = ",\n".join(
        f'      {{"matrix": {_arr(c[:9])}, "translation": {_arr(c[9:])}, "weight": {_num(w)}}}'
        for c, w in zip(m.controls, m.weights))
    if scene.mass == "auto":
        mass = '"auto"'
    else:
        pts = ", ".join(_arr(p) for p in scene.mass.points)
        mass = f'{{"points": [{pts}], "weights": {_arr(scene.mass.weights)}}}'
    cfg = scene.config
    eps = "null" if cfg.epsilon is None else _num(cfg.epsilon)
    parts = [
        polys("fixed", scene.fixed),
        polys("moving", scene.moving),
        f'  "motion": {{\n    "domain": {_arr(m.domain)},\n    "controls": [\n{ctrl}\n    ]\n  }}',
        f'  "mass": {mass}',
        f'  "config": {{"epsilon": {eps}, "max_depth": {cfg.max_depth}, '
        f'"ball_strategy": {json.dumps(cfg.ball_strategy)}, '
        f'"mass_strategy": {json.dumps(cfg.mass_strategy)}}}',
    ]
    if scene.meta:
        parts.append(f'  "meta": {json.dumps(scene.meta, sort_keys=True)}')
    lines.append(",\n".join(parts))
    lines.append("}")
    return "\n".join(lines) + "\n"


def save_scene(scene, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_scene(scene))
