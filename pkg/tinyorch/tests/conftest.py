import pytest

from ..workloads import load_fixture


@pytest.fixture
def workload1():
    yield load_fixture("workload1")


@pytest.fixture
def workload2():
    yield load_fixture("workload2")


@pytest.fixture
def small():
    """One ten-layer pipeline on three devices."""
    from .common import chain_model
    from .common import make_devices
    from .common import make_pipeline

    yield make_pipeline(chain_model(10)), make_devices(3)
