import pytest

from epikit import fixtures
from epikit.syntax import parse_atoms


@pytest.fixture(scope="session")
def dl():
    return fixtures.theory("dl")


@pytest.fixture(scope="session")
def lat():
    return fixtures.theory("lat")


@pytest.fixture(scope="session")
def ba():
    return fixtures.theory("ba")


@pytest.fixture(scope="session")
def square(dl):
    return fixtures.structure("two_squared", dl.signature)


@pytest.fixture(scope="session")
def m3(dl):
    return fixtures.structure("m3", dl.signature)


@pytest.fixture(scope="session")
def complements(dl):
    """The four premises saying z and w both complement x."""
    return parse_atoms("meet(x,z) = bot(), join(x,z) = top(), meet(x,w) = bot(), join(x,w) = top()", dl.signature)


@pytest.fixture(scope="session")
def imp():
    return fixtures.system("imp")
