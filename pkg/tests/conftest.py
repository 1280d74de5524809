import pytest

from ftp_sdmm.fields import make_base_field, make_tower


@pytest.fixture(scope="session")
def f4():
    return make_base_field(2, 2)


@pytest.fixture(scope="session")
def f5():
    return make_base_field(5, 1)


@pytest.fixture(scope="session")
def f11():
    return make_base_field(11, 1)


@pytest.fixture(scope="session")
def tower16(f4):
    """F_16 as a one-step tower over F_4."""
    return make_tower(f4, (2,))


@pytest.fixture(scope="session")
def tower11_6(f11):
    """F_{11^6} = F_11(a_1, a_2) with degrees 2 and 3."""
    return make_tower(f11, (2, 3))
