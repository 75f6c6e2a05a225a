from contextlib import nullcontext as does_not_raise

import pytest

from ... import TinyorchError
from ...strategies.base import StrategyBase
from ...strategies.progressive import SynergyStrategy
from .. import misc
from ..misc import ConfigurationError
from ..misc import SearchBudgetExceeded
from ..misc import StrategyError
from ..misc import check_value_in_list
from ..misc import get_strategy
from ..misc import load_json_file
from ..misc import strategies
from ..misc import strategy_factory


@pytest.mark.parametrize(
    "value, examples, blank_ok, context",
    [
        ["sequential", ["sequential", "inter-run"], False, does_not_raise()],
        ["", ["sequential"], True, does_not_raise()],
        ["", ["sequential"], False, pytest.raises(ValueError)],
        ["parallel", ["sequential", "inter-run"], False, pytest.raises(ValueError)],
    ],
)
def test_check_value_in_list(value, examples, blank_ok, context):
    with context as excuse:
        check_value_in_list("Mode", value, examples, blank_ok=blank_ok)
    if excuse is not None:
        assert "Pick one of" in str(excuse)


def test_exceptions():
    for name in dir(misc):
        item = getattr(misc, name)
        if isinstance(item, type) and issubclass(item, Exception) and item.__module__ == misc.__name__:
            assert issubclass(item, TinyorchError), f"{name}"

    excuse = SearchBudgetExceeded(90_190_202_571, 10**8)
    assert excuse.product == 90_190_202_571
    assert "exceeds the budget of 100000000" in str(excuse)


def test_load_json_file(tmp_path):
    with pytest.raises(ConfigurationError) as excuse:
        load_json_file(tmp_path / "missing.json")
    assert "does not exist" in str(excuse)

    path = tmp_path / "broken.json"
    path.write_text("{devices: ")
    with pytest.raises(ConfigurationError) as excuse:
        load_json_file(path)
    assert "cannot be parsed" in str(excuse)

    path.write_text('{"devices": []}')
    assert load_json_file(path) == {"devices": []}


def test_strategies():
    available = strategies()
    # fmt: off
    for name in "synergy oracle mindev maxdev primindev primaxdev indmodel jointmodel indbest".split():
        assert name in available, f"{name=}"
    # fmt: on
    assert get_strategy("synergy") is SynergyStrategy

    strategy = strategy_factory("oracle", objective="latency", budget=1000)
    assert isinstance(strategy, StrategyBase)
    assert strategy.name == "oracle"
    assert strategy.budget == 1000
    assert strategy.objective.value == "latency"
    assert "objective=" in repr(strategy)

    with pytest.raises(StrategyError) as excuse:
        get_strategy("no-such-strategy")
    assert "Pick one of" in str(excuse)
