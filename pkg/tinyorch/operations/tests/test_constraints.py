import pytest

from ...tests.common import chain_model
from ...tests.common import make_devices
from ...tests.common import make_pipeline
from ..constraints import AcceleratorConstraints
from ..constraints import CapacityConstraint
from ..constraints import ConstraintBase
from ..constraints import Violation
from ..constraints import is_runnable
from ..misc import ConfigurationError
from ..model import Footprint
from ..plan import ExecutionPlan
from ..plan import HolisticPlan


def test_raises():
    with pytest.raises(TypeError) as excuse:
        ConstraintBase()
    assert "Can't instantiate abstract class" in str(excuse)

    with pytest.raises(ConfigurationError) as excuse:
        CapacityConstraint(1, 1, 1)
    assert "Must provide a value" in str(excuse)


@pytest.mark.parametrize(
    "footprint, violated",
    [
        [Footprint(0, 0, 0), []],
        [Footprint(1000, 10, 4), []],  # limits are inclusive
        [Footprint(1001, 10, 4), ["weight"]],
        [Footprint(1000, 11, 4), ["bias"]],
        [Footprint(1000, 10, 5), ["layers"]],
        [Footprint(2000, 20, 8), ["weight", "bias", "layers"]],
    ],
)
def test_CapacityConstraint(footprint, violated):
    c = CapacityConstraint(1000, 10, 4, label="dev")
    assert " <= " in repr(c)
    found = c.violations(footprint)
    assert [v.dimension for v in found] == violated
    assert c.valid(footprint) == (violated == [])


def test_AcceleratorConstraints():
    devices = make_devices(2, weight_capacity=1000)
    constraints = AcceleratorConstraints(devices)
    assert sorted(constraints) == ["d0", "d1"]

    usage = {"d0": Footprint(500, 0, 1), "d1": Footprint(1500, 0, 1)}
    assert constraints.violations(usage) == [Violation("d1", "weight", 1500, 1000)]
    assert not constraints.valid(usage)

    constraints["d1"].weight_capacity = 2000
    assert constraints.valid(usage)

    with pytest.raises(ConfigurationError) as excuse:
        constraints.violations({"nowhere": Footprint()})
    assert "Pick one of" in str(excuse)


def test_is_runnable():
    devices = make_devices(2, max_layers=6)
    first = make_pipeline(chain_model(4), "p1")
    second = make_pipeline(chain_model(4, name="other"), "p2")

    alone = HolisticPlan([ExecutionPlan(first, "d0", [("d0", 0, 4)], "d0")])
    assert is_runnable(alone, devices)
    assert is_runnable(HolisticPlan(), devices).runnable

    # 8 layers on one 6-layer accelerator
    crowded = alone.extended(ExecutionPlan(second, "d0", [("d0", 0, 4)], "d0"))
    report = is_runnable(crowded, devices)
    assert not report
    assert report.usage["d0"] == Footprint(1152, 32, 8)
    assert report.violations == [Violation("d0", "layers", 8, 6)]

    spread = alone.extended(ExecutionPlan(second, "d0", [("d0", 0, 2), ("d1", 2, 4)], "d0"))
    assert is_runnable(spread, devices)
