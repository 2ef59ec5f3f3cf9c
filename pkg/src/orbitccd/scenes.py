"""Generated test scenes and the bundled scene corpus.

The octagon pair and the subdivided squares are reconstructions built to
exercise the same situations as the classic experiments (a near miss, an
interference, and an n x n grid of sub-squares under one shared motion).
Their coordinates and motion data are our own choices.
"""
from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np

from .detector import DetectorConfig
from .geometry import Polygon3, plane_basis
from .metric import Displacement
from .motion import RationalMotion, evaluate_many, quaternion_motion
from .oracle import sampled_min_distance
from .scene_io import MassSpec, Scene, decompose, parse_scene, serialize_scene

CASES = ("hit", "nearhit", "miss")
SQUARE_EPS_FRACTION = 0.01
#: lowest height of the moving square per case, in units of epsilon
#: (the miss case keeps one diameter)
NEAR_GAP = 1.5
HIT_GAP = 0.0


def quat(axis, angle):
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    return np.concatenate([[np.cos(0.5 * angle)], np.sin(0.5 * angle) * axis])


def regular_polygon(k, radius=1.0, center=(0.0, 0.0, 0.0), phase=None):
    """Regular k-gon in a plane z = const (counterclockwise seen from +z)."""
    phase = np.pi / k if phase is None else phase
    a = phase + 2.0 * np.pi * np.arange(k) / k
    pts = np.stack([radius * np.cos(a), radius * np.sin(a), np.zeros(k)], axis=1)
    return Polygon3(pts + np.asarray(center, dtype=float))


# ---------------------------------------------------------------------------
# octagons


OCTAGON_HEIGHT = 0.74
OCTAGON_DROP = -0.3


def octagon_motion(height=OCTAGON_HEIGHT):
    """Degree-8 rigid motion: cubic rotation about a tilted axis, quadratic path."""
    qs = [quat([1.0, 0.2, 0.0], a) for a in (0.0, 0.5, 0.9, 1.2)]
    offsets = [[-2.2, -1.2, height], [0.3, 0.2, height], [2.2, 1.2, height]]
    return quaternion_motion(qs, pivot=(0.0, 0.0, 0.0), offsets=offsets)


def octagon_scene(collide=False):
    """Octagon sweeping over an equal fixed octagon.

    Without ``collide`` the moving octagon passes close by (gap about 1.5%
    of the diameter); with it the same motion is lowered by a constant
    translation so the polygons interfere.
    """
    motion = octagon_motion()
    if collide:
        motion = motion.translated([0.0, 0.0, OCTAGON_DROP])
    oct_ = regular_polygon(8)
    return Scene(fixed=[oct_], moving=[oct_], motion=motion,
                 config=DetectorConfig(epsilon=0.01 * oct_.diameter),
                 meta={"family": "octagon", "expect": "hit" if collide else "miss",
                       "reconstruction": True})


# ---------------------------------------------------------------------------
# subdivided squares


def grid_squares(n, z=0.0):
    """Unit square [0, 1]^2 at height z cut into n x n sub-squares (row major)."""
    out = []
    h = 1.0 / n
    for j in range(n):
        for i in range(n):
            x0, y0 = i * h, j * h
            out.append(Polygon3([[x0, y0, z], [x0 + h, y0, z], [x0 + h, y0 + h, z],
                                 [x0, y0 + h, z]]))
    return out


def square_rotation():
    """Shared degree-8 rotational motion: a tilt about the square's diagonal.

    The axis runs through the square center along ``(1, -1, 0)``, so the
    corner at the origin dips while staying above the fixed square.
    """
    qs = [quat([1.0, -1.0, 0.0], a) for a in (0.0, 0.25, 0.45, 0.3, 0.1)]
    return quaternion_motion(qs, pivot=(0.5, 0.5, 0.0))


def _lowest_corner(motion, samples=20_001):
    corners = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], dtype=float)
    vec = evaluate_many(motion, np.linspace(*motion.domain, samples))
    z = np.einsum("tj,kj->tk", vec[:, 6:9], corners) + vec[:, None, 11]
    return float(z.min())


def two_squares(n, case, mass_strategy="per_polygon"):
    """Two unit squares, each cut into n^2 sub-squares.

    The moving square starts above the fixed one and tilts about a diagonal
    so one corner dips. The three cases differ only in a constant vertical
    translation: the lowest corner reaches ``HIT_GAP`` epsilon (interference),
    ``NEAR_GAP`` epsilon or one diameter above the fixed plane.
    """
    if case not in CASES:
        raise ValueError(f"case must be one of {CASES}")
    if n < 1:
        raise ValueError("n must be at least 1")
    diam = float(np.sqrt(2.0))
    eps = SQUARE_EPS_FRACTION * diam
    rot = square_rotation()
    gap = {"hit": HIT_GAP * eps, "nearhit": NEAR_GAP * eps, "miss": diam}[case]
    motion = rot.translated([0.0, 0.0, gap - _lowest_corner(rot)])
    return Scene(fixed=grid_squares(n), moving=grid_squares(n), motion=motion,
                 config=DetectorConfig(epsilon=eps, mass_strategy=mass_strategy),
                 meta={"family": "two_squares", "n": n, "case": case,
                       "expect": "hit" if case == "hit" else "miss",
                       "reconstruction": True})


# ---------------------------------------------------------------------------
# random scenes for the corpus


def random_convex_polygon(rng, k, radius, center, normal=None):
    """Random convex k-gon around ``center`` in the plane with the given normal."""
    a = np.sort(rng.uniform(0, 2 * np.pi, k))
    # spread the angles so no two vertices nearly coincide
    a = 0.5 * a + 0.5 * 2 * np.pi * np.arange(k) / k
    r = radius * rng.uniform(0.7, 1.0)
    pts = np.stack([r * np.cos(a), r * np.sin(a), np.zeros(k)], axis=1)
    if normal is not None:
        u, v = plane_basis(np.asarray(normal, float) / np.linalg.norm(normal))
        pts = pts[:, :1] * u + pts[:, 1:2] * v
    return Polygon3(pts + center)


def _random_rigid(rng, start, through, end, k=2):
    base = rng.standard_normal(4)
    base /= np.linalg.norm(base)
    qs = []
    for _ in range(k + 1):
        q = base + 0.25 * rng.standard_normal(4)
        qs.append(q / np.linalg.norm(q))
    qs = [q if q @ qs[0] >= 0 else -q for q in qs]
    return quaternion_motion(qs, offsets=[start, through, end])


def _random_affine(rng, start, end, degree=3):
    ctrl = []
    for k in range(degree + 1):
        lin = np.eye(3) + 0.15 * rng.standard_normal((3, 3))
        tr = start + (end - start) * k / degree + 0.2 * rng.standard_normal(3)
        ctrl.append(Displacement(lin, tr))
    return RationalMotion(ctrl, rng.uniform(0.5, 2.0, degree + 1))


def _push_to_gap(scene, target, samples=4_000, iters=40):
    """Translate the motion along the fixed normal so the sampled gap is ``target``."""
    normal = scene.fixed[0].normal

    def gap(s):
        m = scene.motion.translated(s * normal)
        return min(sampled_min_distance(p, f, m, samples).min_distance
                   for p in scene.moving for f in scene.fixed)

    # bracket from a coarse scan: the highest shift that still interferes
    shifts = np.linspace(-2.0, 2.0, 41)
    below = [s for s in shifts if gap(s) < target]
    if not below:
        raise ValueError("motion never comes within the target gap")
    lo = max(below)
    hi = lo + shifts[1] - shifts[0]
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if gap(mid) < target:
            lo = mid
        else:
            hi = mid
    return Scene(scene.fixed, scene.moving, scene.motion.translated(hi * normal), scene.mass,
                 scene.config, scene.meta)


def _rigid_pair(seed, lift):
    rng = np.random.default_rng(seed)
    fixed = random_convex_polygon(rng, int(rng.integers(3, 8)), 1.0, np.zeros(3))
    moving = random_convex_polygon(rng, int(rng.integers(3, 8)), 0.8, np.zeros(3),
                            normal=rng.standard_normal(3))
    start = np.array([-2.5, rng.uniform(-1, 1), lift + rng.uniform(-0.2, 0.2)])
    end = np.array([2.5, rng.uniform(-1, 1), lift + rng.uniform(-0.2, 0.2)])
    through = np.array([rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), lift])
    motion = _random_rigid(rng, start, through, end, k=int(rng.integers(1, 4)))
    return Scene([fixed], [moving], motion, config=DetectorConfig(epsilon=0.02))


def build_corpus():
    """All corpus scenes as ``(name, Scene)`` pairs, deterministically."""
    out = [("octagon_miss", octagon_scene(False)), ("octagon_hit", octagon_scene(True))]
    for n in (1, 2):
        for case in CASES:
            out.append((f"squares_n{n}_{case}", two_squares(n, case)))
    # random rigid motions passing above, through and far from the fixed face
    for seed in range(10):
        lift = (1.5, 0.0, 0.4, 3.0, 0.2)[seed % 5]
        sc = _rigid_pair(100 + seed, lift)
        out.append((f"rigid_{seed:02d}", _with_meta(sc, {"family": "rigid", "seed": 100 + seed})))
    # grazing near misses: sampled gap pushed to a fraction of epsilon
    for k, frac in enumerate((0.1, 0.25, 0.5, 1.0, 2.0, 0.05)):
        sc = _rigid_pair(200 + k, 0.5)
        sc = _push_to_gap(sc, frac * sc.config.epsilon)
        out.append((f"grazing_{k:02d}", _with_meta(sc, {"family": "grazing", "gap_eps": frac,
                                                       "seed": 200 + k})))
    # non-rigid affine motions with random weights
    for k in range(4):
        rng = np.random.default_rng(300 + k)
        fixed = random_convex_polygon(rng, 5, 1.0, np.zeros(3))
        moving = random_convex_polygon(rng, 4, 0.6, np.zeros(3), normal=[0.3, 0.2, 1.0])
        h = (0.0, 0.8, 2.0, 0.3)[k]
        motion = _random_affine(rng, np.array([-2.0, 0.0, h]), np.array([2.0, 0.3, h]))
        sc = Scene([fixed], [moving], motion, config=DetectorConfig(epsilon=0.02))
        out.append((f"affine_{k:02d}", _with_meta(sc, {"family": "affine", "seed": 300 + k})))
    out.extend(_special_scenes())
    return out


def _with_meta(scene, meta):
    return Scene(scene.fixed, scene.moving, scene.motion, scene.mass, scene.config, meta)


def _special_scenes():
    out = []
    tri = Polygon3([[0, 0, 0], [1, 0, 0], [0, 1, 0]])
    # face piercing: a vertical needle-like triangle passes through the face interior
    needle = Polygon3([[0.3, 0.3, 0.5], [0.32, 0.3, 1.5], [0.28, 0.3, 1.5]])
    down = RationalMotion([Displacement.identity(),
                           Displacement.from_translation([0.0, 0.0, -1.0])])
    out.append(("needle_pierce", Scene([tri], [needle], down, config=DetectorConfig(epsilon=0.01),
                                       meta={"family": "special", "expect": "hit"})))
    # crossing edges with no vertex close to the other polygon
    bar = Polygon3([[-1.0, 0.5, 0.3], [2.0, 0.5, 0.3], [2.0, 0.5, 0.4]])
    out.append(("edge_cross", Scene([Polygon3([[0.5, -1, 0], [0.5, 2, 0], [0.5, 2, 0.2]])], [bar],
                                    RationalMotion([Displacement.identity(),
                                                    Displacement.from_translation([0, 0, -0.5])]),
                                    config=DetectorConfig(epsilon=0.01),
                                    meta={"family": "special", "expect": "hit"})))
    # non-convex L-shaped moving face split into convex pieces, explicit masses
    ell = decompose([[0, 0, 0.5], [2, 0, 0.5], [2, 1, 0.5], [1, 1, 0.5], [1, 2, 0.5],
                     [0, 2, 0.5]])
    mass = MassSpec(((0.0, 0.0, 0.5), (2.0, 0.0, 0.5), (1.0, 1.0, 0.5), (0.0, 2.0, 0.5),
                     (0.7, 0.7, 0.8)), (1.0, 1.0, 2.0, 1.0, 0.5))
    fixed = [Polygon3([[-1, -1, 0], [3, -1, 0], [3, 3, 0], [-1, 3, 0]])]
    qs = [quat([0, 1, 0], a) for a in (0.0, 0.1, 0.2)]
    spin = quaternion_motion(qs, pivot=(1.0, 1.0, 0.5), offsets=[[0, 0, 0.2], [0, 0, 0.1]])
    out.append(("lshape_explicit_mass", Scene(fixed, ell, spin, mass,
                                              DetectorConfig(epsilon=0.02),
                                              {"family": "special", "expect": "miss"})))
    out.append(("lshape_miniball", Scene(fixed, ell, spin.translated([0, 0, -0.5]), "auto",
                                         DetectorConfig(epsilon=0.02, ball_strategy="miniball",
                                                        mass_strategy="global"),
                                         {"family": "special", "expect": "hit"})))
    # constant motions: far apart and touching
    far = RationalMotion([Displacement.from_translation([0, 0, 5.0])])
    out.append(("static_far", Scene([tri], [tri], far, config=DetectorConfig(epsilon=0.01),
                                    meta={"family": "special", "expect": "miss"})))
    out.append(("static_touch", Scene([tri], [tri], RationalMotion([Displacement.identity()]),
                                      config=DetectorConfig(epsilon=0.01),
                                      meta={"family": "special", "expect": "hit"})))
    return out


# ---------------------------------------------------------------------------
# bundled files


def write_corpus(directory):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name, scene in build_corpus():
        (directory / f"{name}.json").write_text(serialize_scene(scene), encoding="utf-8")


def corpus_names():
    root = resources.files("orbitccd") / "data" / "scenes"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_bundled(name):
    path = resources.files("orbitccd") / "data" / "scenes" / f"{name}.json"
    return parse_scene(path.read_text(encoding="utf-8"))


def load_corpus():
    """Bundled scenes as ``(name, Scene)`` pairs in name order."""
    return [(name, load_bundled(name)) for name in corpus_names()]
