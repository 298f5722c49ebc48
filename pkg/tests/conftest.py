import pytest

from ovmrbac.fixture import build_example_model, build_example_policy


@pytest.fixture(scope="session")
def example_model():
    return build_example_model()


@pytest.fixture(scope="session")
def example_policy():
    return build_example_policy()
