import pytest

from folss.fixtures import circle, hopf_model, torus_bundle, torus_point_foliation
from folss.relative import relative_pages, torus_cover as make_torus_cover

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def hopf():
    return hopf_model()


@pytest.fixture(scope="session")
def torus():
    return torus_bundle()


@pytest.fixture(scope="session")
def circle3():
    return circle(3)


@pytest.fixture(scope="session")
def t2_points():
    return torus_point_foliation(2)


@pytest.fixture(scope="session")
def torus_cover():
    return make_torus_cover()


@pytest.fixture(scope="session")
def torus_cover_pages(torus_cover):
    return {W: relative_pages(torus_cover, W) for W in ("U", "V", "M")}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
