import numpy as np
import pytest

from orbitccd import Polygon3, build_mass_distribution

OCTAHEDRON = np.array([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]],
                      dtype=float)


@pytest.fixture
def octa():
    return build_mass_distribution(OCTAHEDRON)


@pytest.fixture
def unit_square():
    """Unit square centered at the origin in z = 0."""
    return Polygon3([[-0.5, -0.5, 0], [0.5, -0.5, 0], [0.5, 0.5, 0], [-0.5, 0.5, 0]])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def square(center=(0.0, 0.0, 0.0), size=1.0):
    c = np.asarray(center, dtype=float)
    h = 0.5 * size
    return Polygon3(c + [[-h, -h, 0], [h, -h, 0], [h, h, 0], [-h, h, 0]])


def random_motion(rng, degree=8):
    from orbitccd import RationalMotion
    ctrl = np.concatenate([np.eye(3).ravel() + 0.3 * rng.standard_normal((degree + 1, 9)),
                           rng.standard_normal((degree + 1, 3))], axis=1)
    return RationalMotion(ctrl, rng.uniform(0.2, 3.0, degree + 1), (0.0, 1.0))


# one line per acceptance criterion, printed after the run
ACCEPTANCE = {}


def record(criterion, ok, detail):
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[criterion] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE, key=str):
            terminalreporter.write_line(ACCEPTANCE[key])
