import pytest

from oball import parse_orlicz


@pytest.fixture(scope="session")
def v2():
    return parse_orlicz("x^2")


@pytest.fixture(scope="session")
def v4():
    return parse_orlicz("x^4")


@pytest.fixture(scope="session")
def vmix():
    return parse_orlicz("x^4 + x^2")


@pytest.fixture(scope="session")
def vabs():
    return parse_orlicz("|x|^1")


@pytest.fixture(scope="session")
def vhalf():
    return parse_orlicz("|x|^0.5", allow_generalized=True)
