import pytest

from fluctlab import GridSpec, UnitSystem


@pytest.fixture
def units():
    return UnitSystem()


@pytest.fixture
def grid():
    return GridSpec(-12.0, 12.0, 1024)
