import pytest
from hypothesis import settings

from streamcode.fixtures import fixture_path

settings.register_profile("suite", max_examples=60, deadline=None)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def moby_path():
    return fixture_path("moby_dick.txt")


@pytest.fixture(scope="session")
def pride_path():
    return fixture_path("pride_and_prejudice.txt")


@pytest.fixture(scope="session")
def synthetic_trace_path():
    return fixture_path("synthetic.trace")


@pytest.fixture(scope="session")
def synthetic_text_path():
    return fixture_path("synthetic.txt")
