import pytest

from rislink import build_los, design_proposed

from helpers import make_config


@pytest.fixture(scope="session")
def default_config():
    return make_config()


@pytest.fixture(scope="session")
def default_los(default_config):
    return build_los(default_config)


@pytest.fixture(scope="session")
def proposed(default_config):
    return design_proposed(default_config)
