import numpy as np
import pytest

from torsion_elastica import surfaces as S
from torsion_elastica.curves import expression_curve, reparameterize_arclength

ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, title, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {k}. {title}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def helix():
    """Pitch pi/4 helix on the unit cylinder, outward normal, length 4."""
    return expression_curve(S.cylinder(), "s/sqrt(2)", "s/sqrt(2)", 4.0)


@pytest.fixture(scope="session")
def equator():
    return expression_curve(S.sphere(), "pi/2", "s", np.pi)


@pytest.fixture(scope="session")
def torus_curve():
    return reparameterize_arclength(
        expression_curve(S.torus(), "s/sqrt(2)", "s/sqrt(2)", 2.0, parameter="general")
    )


@pytest.fixture(scope="session")
def sphere_circle():
    """Latitude circle at colatitude pi/3 (a small, planar circle)."""
    return expression_curve(S.sphere(), "pi/3", "s/sin(pi/3)", 2.0)


@pytest.fixture(scope="session")
def plane_circle():
    return expression_curve(S.plane(), "cos(s)", "sin(s)", 2.0)
