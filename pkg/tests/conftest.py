import pytest

from osdlat.codecsim import build_ebch


@pytest.fixture(scope="session")
def code84():
    return build_ebch(8, 4)


@pytest.fixture(scope="session")
def code3216():
    return build_ebch(32, 16)


@pytest.fixture(scope="session")
def code6436():
    return build_ebch(64, 36)


@pytest.fixture(scope="session")
def code12864():
    return build_ebch(128, 64)
