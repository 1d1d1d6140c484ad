import pytest

from rowpade import Context


@pytest.fixture(scope="session")
def exact_ctx():
    return Context("exact", 256)


@pytest.fixture(scope="session")
def float_ctx():
    return Context("float", 256)
