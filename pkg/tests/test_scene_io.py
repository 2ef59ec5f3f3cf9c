import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbitccd import (DetectorConfig, NonSimplePolygon, ParseError, ValidationError, decompose,
                      parse_scene, serialize_scene)
from orbitccd.geometry import is_convex2d, polygon_area2d
from orbitccd.scene_io import MassSpec, load_scene, save_scene
from orbitccd.scenes import build_corpus, corpus_names, load_corpus, regular_polygon

TRI = [[0, 0, 0], [1, 0, 0], [0, 1, 0]]
IDENT = [1, 0, 0, 0, 1, 0, 0, 0, 1]


def minimal(**overrides):
    doc = {
        "fixed": [TRI],
        "moving": [[[0, 0, 1], [1, 0, 1], [0, 1, 1]]],
        "motion": {"controls": [
            {"matrix": IDENT, "translation": [0, 0, 0], "weight": 1},
            {"matrix": IDENT, "translation": [1, 0, 0], "weight": 2},
        ]},
    }
    doc.update(overrides)
    return json.loads(json.dumps(doc))


def area3(vertices):
    v = np.asarray(vertices, float)
    return 0.5 * np.linalg.norm(np.cross(v, np.roll(v, -1, axis=0)).sum(axis=0))


def test_minimal_scene_defaults():
    scene = parse_scene(json.dumps(minimal()))
    assert len(scene.fixed) == len(scene.moving) == 1
    assert scene.mass == "auto"
    assert scene.config == DetectorConfig()
    assert scene.motion.degree == 1
    np.testing.assert_array_equal(scene.motion.weights, [1, 2])
    assert scene.meta == {}


def test_zero_weight_rejected():
    doc = minimal()
    doc["motion"]["controls"][1]["weight"] = 0
    with pytest.raises(ValidationError):
        parse_scene(json.dumps(doc))


def test_empty_motion_rejected():
    with pytest.raises(ValidationError):
        parse_scene(json.dumps(minimal(motion={"controls": []})))


@pytest.mark.parametrize("text, position", [
    ('{"fixed": [', "1:12"),
    ("{\n  \"fixed\": 1,,\n}", "2:14"),
])
def test_syntax_error_position(text, position):
    with pytest.raises(ParseError) as info:
        parse_scene(text)
    assert info.value.position == position


@pytest.mark.parametrize("mutate, position", [
    (lambda d: d["motion"]["controls"][1].update(weight="heavy"), "motion.controls[1].weight"),
    (lambda d: d["motion"]["controls"][0].update(matrix=[1, 2]), "motion.controls[0].matrix"),
    (lambda d: d["fixed"][0].__setitem__(1, [1, 0]), "fixed[0][1]"),
    (lambda d: d.update(extra=1), "$"),
    (lambda d: d.pop("moving"), "$"),
    (lambda d: d.update(config={"eps": 1}), "config"),
    (lambda d: d.update(mass=[1, 2]), "mass"),
])
def test_structure_errors(mutate, position):
    doc = minimal()
    mutate(doc)
    with pytest.raises(ParseError) as info:
        parse_scene(json.dumps(doc))
    assert info.value.position == position


def test_quaternion_controls():
    doc = minimal()
    doc["motion"]["controls"][1] = {"quat": [0, 0, 0, 2], "translation": [0, 0, 0]}
    scene = parse_scene(json.dumps(doc))
    np.testing.assert_allclose(scene.motion.controls[1, :9], [-1, 0, 0, 0, -1, 0, 0, 0, 1],
                               atol=1e-15)


def test_curvature_strategy_not_allowed_in_files():
    with pytest.raises(ValidationError):
        parse_scene(json.dumps(minimal(config={"ball_strategy": "curvature"})))


def test_explicit_mass():
    pts = [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]]
    scene = parse_scene(json.dumps(minimal(mass={"points": pts, "weights": [2] * 6})))
    assert isinstance(scene.mass, MassSpec)
    assert scene.mass_distribution().total_mass == 12
    with pytest.raises(ValidationError):
        parse_scene(json.dumps(minimal(mass={"points": pts[:3]})))


def test_round_trip_identical(tmp_path):
    doc = minimal(config={"epsilon": 0.1 + 0.2, "max_depth": 9}, meta={"note": "x"})
    doc["motion"]["controls"][0]["translation"] = [1 / 3, 2 ** -30, 1e300]
    scene = parse_scene(json.dumps(doc))
    text = serialize_scene(scene)
    again = parse_scene(text)
    assert again == scene
    assert serialize_scene(again) == text
    save_scene(scene, tmp_path / "s.json")
    assert load_scene(tmp_path / "s.json") == scene


def test_convex_passes_through():
    pent = regular_polygon(5, 2.0, (1.0, 2.0, 3.0))
    (piece,) = decompose(pent.vertices)
    np.testing.assert_array_equal(piece.vertices, pent.vertices)


L_SHAPE = [[0, 0, 0], [2, 0, 0], [2, 1, 0], [1, 1, 0], [1, 2, 0], [0, 2, 0]]


@pytest.mark.parametrize("tilt", [0.0, 0.7])
def test_l_shape(tilt):
    c, s = np.cos(tilt), np.sin(tilt)
    rot = np.array([[1, 0, 0], [0, c, -s], [0, s, c]])
    verts = np.array(L_SHAPE, float) @ rot.T + [0.3, -1, 2]
    pieces = decompose(verts)
    assert len(pieces) >= 2
    total = sum(p.area() for p in pieces)
    assert total == pytest.approx(area3(verts), rel=1e-9)
    for p in pieces:
        assert is_convex2d(p.to_2d(p.vertices))


def test_bowtie():
    with pytest.raises(NonSimplePolygon):
        decompose([[0, 0, 0], [1, 1, 0], [1, 0, 0], [0, 1, 0]])


def test_non_planar():
    with pytest.raises(ValidationError):
        decompose([[0, 0, 0], [1, 0, 0], [1, 1, 0.5], [0, 1, 0]])


def star(k, inner, seed):
    rng = np.random.default_rng(seed)
    a = np.sort(rng.uniform(0, 2 * np.pi, 2 * k))
    r = np.where(np.arange(2 * k) % 2 == 0, 1.0, inner)
    return np.column_stack([r * np.cos(a), r * np.sin(a), np.zeros(2 * k)])


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 9), st.floats(0.2, 0.9), st.integers(0, 10 ** 6))
def test_star_decomposition(k, inner, seed):
    verts = star(k, inner, seed)
    try:
        pieces = decompose(verts)
    except ValidationError:
        # random angles can produce slivers that fail the vertex checks
        return
    total = sum(p.area() for p in pieces)
    assert total == pytest.approx(polygon_area2d(verts[:, :2]), rel=1e-9)
    for p in pieces:
        assert is_convex2d(p.to_2d(p.vertices))


@pytest.mark.slow
def test_bundled_corpus_matches_builder():
    names = corpus_names()
    assert len(names) >= 30
    assert {"octagon_hit", "octagon_miss"} <= set(names)
    assert sum(n.startswith("grazing") for n in names) >= 3
    built = dict(build_corpus())
    for name, scene in load_corpus():
        assert built[name] == scene
