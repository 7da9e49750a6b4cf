import pytest

from opspan.operads import builtin_operad


@pytest.fixture(scope="session")
def assoc3():
    return builtin_operad("associative", 3)


@pytest.fixture(scope="session")
def assoc4():
    return builtin_operad("associative", 4)


@pytest.fixture(scope="session")
def assoc5():
    return builtin_operad("associative", 5)


@pytest.fixture(scope="session")
def assoc6():
    return builtin_operad("associative", 6)


@pytest.fixture(scope="session")
def commut3():
    return builtin_operad("commutative", 3)


@pytest.fixture(scope="session")
def commut4():
    return builtin_operad("commutative", 4)


@pytest.fixture(scope="session")
def commut5():
    return builtin_operad("commutative", 5)


@pytest.fixture(scope="session")
def commut6():
    return builtin_operad("commutative", 6)
