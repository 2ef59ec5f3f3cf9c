"""Cross-checks of the detector and the orbit shapes against the sampling oracle.

Each suite returns plain records; callers decide what counts as failure.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import BallTooLarge
from .metric import build_mass_distribution, distortion_rate
from .oracle import (distances_along, orbit_radius_probe, random_boundary_displacements,
                     sample_polygon)
from .orbits import fat_polygon
from .scenes import random_convex_polygon


def random_mass(rng, count=None):
    """Random non-degenerate point masses with anisotropic spread."""
    count = int(rng.integers(4, 10)) if count is None else count
    pts = rng.standard_normal((count, 3)) * rng.uniform(0.3, 2.0, 3) + rng.uniform(-2, 2, 3)
    return build_mass_distribution(pts, rng.uniform(0.5, 2.0, count))


def orbit_radius_ratios(triples=20, samples=100_000, seed=0):
    """Sampled max orbit radius over ``R rho(x)`` for random (md, x, R)."""
    rng = np.random.default_rng(seed)
    ratios = []
    for k in range(triples):
        md = random_mass(rng)
        x = md.barycenter + rng.uniform(-3.0, 3.0, 3)
        R = float(rng.uniform(0.01, 1.0))
        r = orbit_radius_probe(md, x, R, samples, seed=seed * 1000 + k)
        ratios.append(r / (R * float(distortion_rate(x, md))))
    return np.array(ratios)


@dataclass
class EnvelopeResult:
    points: int = 0
    violations: int = 0
    configurations: int = 0


def envelope_check(samples=10_000, slack=1e-6, seed=0, per_config=500):
    """Orbit points of random convex polygons against their fat polygons.

    Half of the points come from random displacements on the metric sphere,
    half are extremal points ``x + R rho(x) u`` on the orbit boundary; a
    third of the base points lie on edges.
    """
    rng = np.random.default_rng(seed)
    res = EnvelopeResult()
    while res.points < samples:
        md = random_mass(rng)
        poly = random_convex_polygon(rng, int(rng.integers(3, 8)), float(rng.uniform(0.3, 2.0)),
                              md.barycenter + rng.standard_normal(3),
                              normal=rng.standard_normal(3))
        R = float(rng.uniform(0.005, 0.5))
        try:
            fp = fat_polygon(poly, md, R)
        except BallTooLarge:
            continue
        n = min(per_config, samples - res.points)
        x = sample_polygon(poly, n, rng)
        m = n // 3
        v = poly.vertices
        e = rng.integers(len(v), size=m)
        x[:m] = v[e] + rng.random(m)[:, None] * (np.roll(v, -1, axis=0)[e] - v[e])
        half = n // 2
        d = random_boundary_displacements(md, R, half, rng)
        y1 = np.einsum("tij,tj->ti", d[:, :9].reshape(-1, 3, 3), x[:half]) + d[:, 9:]
        u = rng.standard_normal((n - half, 3))
        u /= np.linalg.norm(u, axis=1)[:, None]
        y2 = x[half:] + (R * distortion_rate(x[half:], md))[:, None] * u
        inside = fp.contains(np.vstack([y1, y2]), slack)
        res.points += n
        res.violations += int(np.count_nonzero(~inside))
        res.configurations += 1
    return res


@dataclass
class SceneCheck:
    name: str
    certified: bool
    pairs: int
    oracle_min: float
    unsound: int = 0
    uncovered: int = 0
    eps_excess: list = field(default_factory=list)

    @property
    def ok(self):
        return self.unsound == 0 and self.uncovered == 0 and not self.eps_excess


def check_scene(name, scene, samples=10_000, leaf_samples=500, intersect=None, threads=1):
    """Run the detector on a scene and compare every pair with the oracle.

    ``unsound`` counts certified pairs with sampled interference,
    ``uncovered`` counts sampled interference parameters outside the suspect
    intervals and ``eps_excess`` lists epsilon leaves whose sampled minimum
    distance exceeds twice epsilon.
    """
    kw = {} if intersect is None else {"intersect": intersect}
    config = replace(scene.config, threads=threads)
    report = scene.run(config, **kw)
    ts = np.linspace(*scene.motion.domain, samples)
    out = SceneCheck(name, report.certified, len(report.pairs), np.inf)
    for pr in report.pairs:
        moving = scene.moving[pr.moving_index]
        fixed = scene.fixed[pr.fixed_index]
        dist = distances_along(moving, fixed, scene.motion, ts)
        out.oracle_min = min(out.oracle_min, float(dist.min()))
        hits = ts[dist <= 0.0]
        if len(hits) and pr.certified:
            out.unsound += 1
        out.uncovered += sum(not pr.intervals.contains(t) for t in hits)
        leaves = [(lo, hi) for lo, hi, reason in pr.leaves if reason == "epsilon"]
        if not leaves:
            continue
        grid = np.linspace(*np.array(leaves).T, leaf_samples).T
        d = distances_along(moving, fixed, scene.motion, grid.ravel()).reshape(grid.shape)
        for (lo, hi), m in zip(leaves, d.min(axis=1)):
            if m > 2.0 * report.epsilon:
                out.eps_excess.append((pr.moving_index, pr.fixed_index, lo, hi, float(m)))
    return out
