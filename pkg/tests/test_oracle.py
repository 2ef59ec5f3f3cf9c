import numpy as np
import pytest

from conftest import square
from orbitccd import (Displacement, Polygon3, RationalMotion,
                      constant_motion, displacement_distance2)
from orbitccd.oracle import (orbit_radius_probe, polygon_distance, random_boundary_displacement,
                             sample_polygon, sampled_min_distance)
from orbitccd.validation import orbit_radius_ratios


def brute_distance(P, Q, rng, count=1000):
    a = sample_polygon(P, count, rng)
    b = sample_polygon(Q, count, rng)
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=-1)
    return d.min()


@pytest.mark.parametrize("Q, expected", [
    (square(), 0.0),
    (square((0.0, 0.0, 3.0)), 3.0),
    (Polygon3([[-0.3, 0, -1], [0.3, 0, -1], [0.3, 0, 1], [-0.3, 0, 1]]), 0.0),
    (square((3.0, 0.0, 0.0)), 2.0),
    (square((2.0, 2.0, 1.0)), np.sqrt(3.0)),
])
def test_polygon_distance(Q, expected):
    P = square()
    assert polygon_distance(P, Q) == pytest.approx(expected, abs=1e-12)
    assert polygon_distance(Q, P) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_polygon_distance_brute_force(seed):
    rng = np.random.default_rng(seed)
    from orbitccd.scenes import random_convex_polygon
    P = random_convex_polygon(rng, 5, 1.0, rng.standard_normal(3), rng.standard_normal(3))
    Q = random_convex_polygon(rng, 4, 1.0, rng.standard_normal(3) * 3, rng.standard_normal(3))
    exact = polygon_distance(P, Q)
    assert exact == pytest.approx(polygon_distance(Q, P), abs=1e-12)
    # the sampled clouds only overestimate
    assert exact <= brute_distance(P, Q, rng) + 1e-12


def test_sampled_static_equals_exact():
    P, Q = square(), square((0.5, 0.0, 2.0))
    res = sampled_min_distance(P, Q, constant_motion(Displacement.identity()), 50)
    assert res.min_distance == pytest.approx(polygon_distance(P, Q))
    assert res.samples == 50


def test_sampled_crossing():
    motion = RationalMotion([Displacement.from_translation([0, 0, -2]),
                             Displacement.from_translation([0, 0, 2])])
    res = sampled_min_distance(square(), square(), motion, 101)
    assert res.min_distance == 0.0
    assert res.worst_parameter == pytest.approx(0.5)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_more_samples_never_increase_minimum(k):
    motion = RationalMotion([Displacement.from_translation([0, 0.3, 1]),
                             Displacement.from_translation([1, -0.2, 0.1]),
                             Displacement.from_translation([2, 0.5, 1.5])])
    P, Q = square(), square((1.0, 0.0, -0.5))
    coarse = sampled_min_distance(P, Q, motion, 10 * 2 ** (k - 1) + 1).min_distance
    fine = sampled_min_distance(P, Q, motion, 10 * 2 ** k + 1).min_distance
    assert fine <= coarse


def test_sampled_min_needs_two_samples():
    with pytest.raises(ValueError):
        sampled_min_distance(square(), square(), constant_motion(Displacement.identity()), 1)


@pytest.mark.parametrize("R", [1e-3, 0.5, 4.0])
def test_boundary_displacement_on_sphere(octa, R):
    d = random_boundary_displacement(octa, R, seed=3)
    assert displacement_distance2(d, Displacement.identity(), octa) == pytest.approx(R * R,
                                                                                     rel=1e-10)


def test_boundary_displacement_seeds(octa):
    a = random_boundary_displacement(octa, 0.1, seed=1)
    b = random_boundary_displacement(octa, 0.1, seed=1)
    c = random_boundary_displacement(octa, 0.1, seed=2)
    assert a == b
    assert a != c


def test_orbit_radius_probe_octahedron(octa):
    r = orbit_radius_probe(octa, np.array([1.0, 0, 0]), 0.1, samples=20_000)
    bound = 0.1 * np.sqrt(2 / 3)
    assert 0.9 * bound <= r <= bound * (1 + 1e-9)


def test_orbit_radius_ratios_small():
    r = orbit_radius_ratios(triples=3, samples=20_000, seed=5)
    assert np.all(r <= 1 + 1e-9)
    assert np.all(r >= 0.9)


def test_sample_polygon_inside(rng):
    P = Polygon3([[0, 0, 1], [2, 0, 1], [2, 1, 1], [0, 1, 1]])
    pts = sample_polygon(P, 500, rng)
    assert np.allclose(pts[:, 2], 1)
    assert pts[:, 0].min() >= 0 and pts[:, 0].max() <= 2
    assert pts[:, 1].min() >= 0 and pts[:, 1].max() <= 1
