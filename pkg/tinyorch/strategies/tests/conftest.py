import pytest

from ...tests.common import chain_model
from ...tests.common import make_device
from ...tests.common import make_devices
from ...tests.common import make_pipeline


@pytest.fixture
def small():
    """One ten-layer pipeline on three devices."""
    yield [make_pipeline(chain_model(10))], make_devices(3)


@pytest.fixture
def tight():
    """Two six-layer pipelines; one device holds only one of the models."""
    pipelines = [make_pipeline(chain_model(6, name=f"m{i}"), f"p{i}") for i in (1, 2)]
    yield pipelines, make_devices(2, weight_capacity=1_000)


@pytest.fixture
def three():
    """Three three-layer pipelines that cannot share one device."""
    pipelines = [make_pipeline(chain_model(3, name=f"m{i}"), f"p{i}") for i in (1, 2, 3)]
    devices = [
        make_device("d0", weight_capacity=800),
        make_device("d1", weight_capacity=800, clock_hz=100_000_000, radio_bandwidth_bps=2_000_000),
    ]
    yield pipelines, devices
