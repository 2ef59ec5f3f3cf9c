"""Acceptance criteria 1-9, one test (or a pair) per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
Tolerances and sample counts are pinned in the module constants.
"""
import csv
import io
import time

import numpy as np
import pytest

from conftest import random_motion, record
from orbitccd import Displacement, curvature_ball, evaluate_many, subdivide
from orbitccd.cli import TIMING_COLUMNS, main
from orbitccd.metric import metric_coordinates
from orbitccd.scenes import load_corpus, octagon_scene, two_squares
from orbitccd.validation import check_scene, envelope_check, orbit_radius_ratios, random_mass

ORBIT_TRIPLES, ORBIT_SAMPLES = 20, 100_000
ORBIT_BAND = (0.95, 1.0 + 1e-9)
ENVELOPE_POINTS, ENVELOPE_SLACK = 10_000, 1e-6
ORACLE_SAMPLES = 10_000
MIN_CORPUS = 30
MAX_OCTAGON_DEPTH = 12
SCALING_NS = (3, 4, 5, 6)
SCALING_FACTOR = 3.0
ARC_SAMPLES, ARC_SLACK, K_TOL = 1_000, 1e-9, 1e-12
SUBDIV_MOTIONS, SUBDIV_PARAMS, SUBDIV_RTOL = 100, 50, 1e-12
THREADS = (1, 2, 8)
DETERMINISM_SCENES = ("octagon_hit", "octagon_miss", "squares_n2_hit", "lshape_miniball")


def test_orbit_radius_law():
    start = time.perf_counter()
    r = orbit_radius_ratios(ORBIT_TRIPLES, ORBIT_SAMPLES, seed=0)
    elapsed = time.perf_counter() - start
    ok = bool(np.all(r >= ORBIT_BAND[0]) and np.all(r <= ORBIT_BAND[1]) and elapsed < 60)
    record(1, ok, f"ratio range [{r.min():.4f}, {r.max():.4f}] over {len(r)} triples, "
                  f"{elapsed:.1f} s")
    assert ok


def test_envelope_containment():
    start = time.perf_counter()
    res = envelope_check(ENVELOPE_POINTS, ENVELOPE_SLACK, seed=0)
    elapsed = time.perf_counter() - start
    ok = res.points >= ENVELOPE_POINTS and res.violations == 0 and elapsed < 60
    record(2, ok, f"{res.violations} of {res.points} orbit points outside "
                  f"({res.configurations} polygons), {elapsed:.1f} s")
    assert ok


@pytest.fixture(scope="module")
def corpus_checks():
    return [check_scene(name, scene, samples=ORACLE_SAMPLES) for name, scene in load_corpus()]


def test_detector_soundness(corpus_checks):
    names = {c.name for c in corpus_checks}
    certified = [c for c in corpus_checks if c.certified]
    bad = [c.name for c in certified if not c.oracle_min > 0 or c.unsound]
    enough = (len(corpus_checks) >= MIN_CORPUS and {"octagon_hit", "octagon_miss"} <= names
              and any(n.startswith("grazing") for n in names))
    # the CLI exit code agrees with the verdict the oracle confirmed
    exit_ok = all((main(["check", f"bundled:{c.name}"], io.StringIO()) == 0) == c.certified
                  for c in corpus_checks)
    ok = enough and not bad and exit_ok
    record(3, ok, f"{len(certified)} certified of {len(corpus_checks)} scenes, "
                  f"violations {bad or 0}")
    assert ok


def test_completeness(corpus_checks):
    uncovered = sum(c.uncovered for c in corpus_checks)
    excess = [(c.name, e) for c in corpus_checks for e in c.eps_excess]
    leaves = sum(1 for c in corpus_checks if not c.certified)
    ok = uncovered == 0 and not excess
    record(4, ok, f"uncovered samples {uncovered}, epsilon leaves above 2 eps: {len(excess)} "
                  f"({leaves} suspect scenes)")
    assert ok


def test_octagon_reproduction():
    miss = octagon_scene(collide=False).run()
    hit_scene = octagon_scene(collide=True)
    hit = hit_scene.run()
    diam = hit_scene.moving[0].diameter
    ok = (miss.certified and miss.max_depth <= MAX_OCTAGON_DEPTH and not hit.certified
          and hit.epsilon == pytest.approx(0.01 * diam))
    record(5, ok, f"miss certified at depth {miss.max_depth} with "
                  f"{miss.intersection_calls} calls; hit intervals "
                  f"{list(hit.pairs[0].intervals)}")
    assert ok


@pytest.fixture(scope="module")
def scaling():
    start = time.perf_counter()
    runs = {}
    for n in SCALING_NS:
        for case, strategy in (("miss", "per_polygon"), ("hit", "per_polygon"),
                               ("hit", "global")):
            runs[n, case, strategy] = two_squares(n, case, strategy).run()
    return runs, time.perf_counter() - start


def test_scaling_linear_in_pairs(scaling):
    runs, elapsed = scaling
    per = {n: runs[n, "miss", "per_polygon"].intersection_calls / n ** 4 for n in SCALING_NS}
    factor = max(per[3], per[6]) / min(per[3], per[6])
    ok = factor < SCALING_FACTOR and elapsed < 600
    record("6a", ok, f"miss calls/n^4 {per}, ratio n=3 vs n=6 {factor:.2f}, {elapsed:.1f} s")
    assert ok


@pytest.mark.xfail(strict=True, reason="not reproduced on the reconstructed two-squares scene: "
                   "per-polygon and global call counts are a near tie (see decisions ledger)")
def test_per_polygon_not_more_work(scaling):
    runs, _ = scaling
    pairs = {n: (runs[n, "hit", "per_polygon"].intersection_calls,
                 runs[n, "hit", "global"].intersection_calls) for n in SCALING_NS}
    ok = all(p <= g for p, g in pairs.values())
    record("6b", ok, "hit calls (per_polygon, global) " + ", ".join(
        f"n={n}: {p}/{g}" for n, (p, g) in pairs.items()))
    assert ok


def test_curvature_ball_arc():
    md = random_mass(np.random.default_rng(3))
    # orthonormal pair of translation directions in the metric
    e = np.zeros((2, 12))
    e[0, 9], e[1, 10] = 1.0, 1.0
    z = metric_coordinates(e, md)
    e[1] -= (z[0] @ z[1]) / (z[0] @ z[0]) * e[0]
    e /= np.linalg.norm(metric_coordinates(e, md), axis=1)[:, None]
    start = Displacement.identity().as_vector()
    ball = curvature_ball(Displacement.identity(), e[0], 1.0, 1.0, md)
    s = np.linspace(0.0, 1.0, ARC_SAMPLES)
    # unit circle through the start point, tangent e0, curving toward e1
    arc = start + np.sin(s)[:, None] * e[0] + (1 - np.cos(s))[:, None] * e[1]
    dist = np.linalg.norm(metric_coordinates(arc - ball.center.as_vector(), md), axis=1)
    k_err = abs(curvature_ball(Displacement.identity(), e[0], 1.0, 1.0, md).radius
                - np.tan(0.5))
    ok = bool(np.all(dist <= ball.radius * (1 + ARC_SLACK)) and k_err <= K_TOL)
    record(7, ok, f"max arc distance / radius {dist.max() / ball.radius:.12f}, "
                  f"|k - tan(1/2)| = {k_err:.1e}")
    assert ok


def test_subdivision_identity():
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(SUBDIV_MOTIONS):
        m = random_motion(rng, 8)
        left, right = subdivide(m)
        for child in (left, right):
            ts = np.sort(rng.uniform(*child.domain, SUBDIV_PARAMS))
            a, b = evaluate_many(child, ts), evaluate_many(m, ts)
            scale = np.maximum(np.abs(b), 1.0)
            worst = max(worst, float(np.max(np.abs(a - b) / scale)))
    ok = worst <= SUBDIV_RTOL
    record(8, ok, f"max relative deviation {worst:.1e} over {SUBDIV_MOTIONS} motions")
    assert ok


def _strip_timing(text):
    rows = list(csv.reader(io.StringIO(text)))
    keep = [i for i, h in enumerate(rows[0]) if h not in TIMING_COLUMNS]
    return [[r[i] for i in keep] for r in rows]


def test_determinism_across_threads():
    outputs = {}
    for threads in THREADS:
        out = []
        for name in DETERMINISM_SCENES:
            for fmt in ("text", "csv"):
                buf = io.StringIO()
                main(["check", f"bundled:{name}", "--format", fmt, "--threads", str(threads)], buf)
                out.append(buf.getvalue())
        buf = io.StringIO()
        main(["bench", "--n", "1-3", "--reps", "1", "--threads", str(threads)], buf)
        out.append(_strip_timing(buf.getvalue()))
        outputs[threads] = out
    ok = all(outputs[t] == outputs[THREADS[0]] for t in THREADS)
    record(9, ok, f"check and bench output identical for threads {THREADS}")
    assert ok
