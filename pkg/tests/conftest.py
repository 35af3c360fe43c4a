import numpy as np
import pytest

from ypqlab import chart, forms, geometry
from ypqlab.cli import _stackels

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def params():
    return chart.validate_params(0.5, 1)


@pytest.fixture(scope="session")
def domain(params):
    return chart.compute_domain(params)


@pytest.fixture(scope="session")
def provider(params):
    return geometry.ypq_provider(params)


@pytest.fixture(scope="session")
def cone(params):
    return geometry.cone_provider(params)


@pytest.fixture(scope="session")
def catalog(params):
    return forms.build_catalog(params)


@pytest.fixture(scope="session")
def stackels(provider, catalog):
    return _stackels(provider, catalog)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
