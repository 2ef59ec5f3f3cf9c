import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import OCTAHEDRON
from orbitccd import (DegenerateMass, Displacement, NonPositiveWeight,
                      build_mass_distribution, displacement_distance2, displacement_inner,
                      distortion_rate, distortion_rate2, equivalent_vertex_masses,
                      line_metric_data, metric_coordinates, plane_metric_data)
from orbitccd.metric import max_distortion_over_polygon


def random_displacement(rng):
    return Displacement(rng.standard_normal((3, 3)), rng.standard_normal(3))


def brute_distance2(a, b, md):
    diff = a.apply(md.points) - b.apply(md.points)
    return float(np.sum(md.weights * np.sum(diff ** 2, axis=1)))


def test_octahedron_mass(octa):
    assert octa.total_mass == 6
    np.testing.assert_allclose(octa.barycenter, 0, atol=1e-15)
    np.testing.assert_allclose(octa.eigenvalues, [2, 2, 2])
    R = octa.rotation
    np.testing.assert_allclose(R @ R.T, np.eye(3), atol=1e-14)
    assert np.linalg.det(R) == pytest.approx(1.0)


@pytest.mark.parametrize("points", [
    np.ones((5, 3)),
    [[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0], [2, 3, 0]],
    [[0, 0, 0], [1, 1, 1], [2, 2, 2], [3, 3, 3]],
])
def test_degenerate_mass(points):
    with pytest.raises(DegenerateMass):
        build_mass_distribution(points)


@pytest.mark.parametrize("w", [0.0, -1.0, np.nan])
def test_nonpositive_weight(w):
    weights = np.ones(6)
    weights[2] = w
    with pytest.raises(NonPositiveWeight):
        build_mass_distribution(OCTAHEDRON, weights)


def test_translation_invariance(rng):
    pts = rng.standard_normal((7, 3))
    w = rng.uniform(0.5, 2, 7)
    v = np.array([3.0, -1.0, 2.5])
    a = build_mass_distribution(pts, w)
    b = build_mass_distribution(pts + v, w)
    np.testing.assert_allclose(b.barycenter, a.barycenter + v, atol=1e-12)
    np.testing.assert_allclose(b.eigenvalues, a.eigenvalues, rtol=1e-10)


def test_distance_identity_and_translation(octa):
    ident = Displacement.identity()
    assert displacement_distance2(ident, ident, octa) == 0
    d = np.array([0.3, -2.0, 1.0])
    assert displacement_distance2(ident, Displacement.from_translation(d), octa) == \
        pytest.approx(6 * d @ d)


def test_inner_products(octa):
    zero = Displacement(np.zeros((3, 3)), np.zeros(3))
    assert displacement_inner(zero, zero, octa) == 0
    ident = Displacement.identity()
    assert displacement_inner(ident, ident, octa) == pytest.approx(6.0)


def test_distance_matches_brute_force(rng):
    md = build_mass_distribution(rng.standard_normal((8, 3)), rng.uniform(0.1, 3, 8))
    for _ in range(50):
        a, b = random_displacement(rng), random_displacement(rng)
        assert displacement_distance2(a, b, md) == pytest.approx(brute_distance2(a, b, md),
                                                                 rel=1e-10)


def test_metric_coordinates_norm(rng):
    md = build_mass_distribution(rng.standard_normal((6, 3)), rng.uniform(0.1, 3, 6))
    v = random_displacement(rng)
    z = metric_coordinates(v.as_vector(), md)
    assert z @ z == pytest.approx(displacement_inner(v, v, md), rel=1e-12)


@pytest.mark.parametrize("x, expected", [
    ([0, 0, 0], 1 / 6),
    ([1, 0, 0], 2 / 3),
    ([0, 0, -1], 2 / 3),
    ([1, 1, 1], 1 / 6 + 3 / 2),
])
def test_distortion_rate_octahedron(octa, x, expected):
    assert distortion_rate2(np.array(x, float), octa) == pytest.approx(expected, rel=1e-14)


def test_distortion_constant_on_inertia_ellipsoid(rng):
    md = build_mass_distribution(rng.standard_normal((9, 3)) * [3, 1, 0.4])
    u = rng.standard_normal((200, 3))
    u /= np.linalg.norm(u, axis=1)[:, None]
    # xi_i^2 / mu_i = 1 in principal coordinates
    x = md.barycenter + (u * np.sqrt(md.eigenvalues)) @ md.rotation.T
    vals = distortion_rate2(x, md)
    np.testing.assert_allclose(vals, 1 / md.total_mass + 1.0, rtol=1e-9)


@pytest.mark.parametrize("point, rho0_sq", [([0, 0, 0], 1 / 6), ([0, 1, 0], 2 / 3)])
def test_line_metric_data(octa, point, rho0_sq):
    data = line_metric_data(np.array(point, float) + [3, 0, 0], [2, 0, 0], octa)
    np.testing.assert_allclose(data.anchor, point, atol=1e-14)
    assert data.rho0 ** 2 == pytest.approx(rho0_sq)
    assert data.lam == pytest.approx(np.sqrt(2))


@pytest.mark.parametrize("z, rho0_sq", [(0.0, 1 / 6), (1.0, 2 / 3)])
def test_plane_metric_data(octa, z, rho0_sq):
    data = plane_metric_data([0.4, -0.2, z], [1, 0, 0], [0, 1, 0], octa)
    np.testing.assert_allclose(data.anchor, [0, 0, z], atol=1e-14)
    assert data.rho0 ** 2 == pytest.approx(rho0_sq)
    assert data.lam1 == pytest.approx(np.sqrt(2))
    assert data.lam2 == pytest.approx(np.sqrt(2))
    np.testing.assert_allclose(data.normal, [0, 0, 1], atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_plane_data_reproduces_rate(seed):
    rng = np.random.default_rng(seed)
    md = build_mass_distribution(rng.standard_normal((6, 3)) * rng.uniform(0.3, 3, 3))
    p, s1, s2 = rng.standard_normal((3, 3))
    data = plane_metric_data(p, s1, s2, md)
    st_ = rng.standard_normal((20, 2))
    x = data.anchor + st_[:, :1] * data.basis1 + st_[:, 1:] * data.basis2
    expected = data.rho0 ** 2 + st_[:, 0] ** 2 / data.lam1 ** 2 + st_[:, 1] ** 2 / data.lam2 ** 2
    np.testing.assert_allclose(distortion_rate2(x, md), expected, rtol=1e-9)
    assert data.lam1 <= data.lam2


def test_equivalent_vertex_masses(octa, rng):
    eq = equivalent_vertex_masses(octa)
    assert eq.total_mass == pytest.approx(6)
    np.testing.assert_allclose(eq.barycenter, octa.barycenter, atol=1e-14)
    np.testing.assert_allclose(eq.central_inertia, octa.central_inertia, atol=1e-12)
    for _ in range(100):
        a, b = random_displacement(rng), random_displacement(rng)
        assert displacement_distance2(a, b, eq) == pytest.approx(
            displacement_distance2(a, b, octa), rel=1e-9)


def test_equivalent_masses_anisotropic():
    # principal moments in ratio 4 : 1 : 1
    pts = np.array([[2, 0, 0], [-2, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]], float)
    md = build_mass_distribution(pts)
    np.testing.assert_allclose(md.eigenvalues, [8, 2, 2])
    eq = equivalent_vertex_masses(md)
    np.testing.assert_allclose(eq.central_inertia, md.central_inertia, atol=1e-12)
    offsets = np.abs((eq.points - eq.barycenter) @ md.rotation)
    np.testing.assert_allclose(offsets.max(axis=0), np.sqrt(3 * md.eigenvalues / 6))


def test_max_distortion_unit_square(octa, unit_square):
    expected = np.sqrt(1 / 6 + 0.25)
    assert max_distortion_over_polygon(unit_square, octa) == pytest.approx(expected)
    assert expected == pytest.approx(0.6455, abs=1e-4)
    grid = np.stack(np.meshgrid(np.linspace(-.5, .5, 41), np.linspace(-.5, .5, 41)), -1)
    pts = np.concatenate([grid.reshape(-1, 2), np.zeros((41 * 41, 1))], axis=1)
    assert distortion_rate(pts, octa).max() <= expected + 1e-15


def test_max_distortion_single_vertex(octa):
    assert max_distortion_over_polygon(np.array([[1.0, 0, 0]]), octa) == pytest.approx(
        np.sqrt(2 / 3))
