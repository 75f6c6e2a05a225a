"""
Miscellaneous Support.

.. rubric: Functions
.. autosummary::

    ~check_value_in_list
    ~get_strategy
    ~load_json_file
    ~load_yaml
    ~load_yaml_file
    ~strategies
    ~strategy_factory

.. rubric: Symbols
.. autosummary::

    ~NS_PER_S
    ~STRATEGY_ENTRYPOINT_GROUP

.. rubric: Custom Exceptions
.. autosummary::

    ~ConfigurationError
    ~CyclicPlan
    ~DeadlockDetected
    ~EmptyPlan
    ~EstimateError
    ~FixtureDrift
    ~FixtureError
    ~InvalidCut
    ~InvalidModel
    ~InvalidProfile
    ~InvalidWindow
    ~NoEligibleDevice
    ~NoRunnablePlan
    ~PlannerError
    ~SearchBudgetExceeded
    ~SimulatorError
    ~StrategyError
    ~TraceViolation
    ~UnknownFixture
    ~UnknownInterface
    ~UnknownSensor
"""

import json
import logging
import pathlib
from importlib.metadata import EntryPoint
from importlib.metadata import entry_points

import yaml

from .. import TinyorchError

logger = logging.getLogger(__name__)

NS_PER_S = 1_000_000_000
"""Nanoseconds per second.  Simulated time is kept in integer nanoseconds."""

STRATEGY_ENTRYPOINT_GROUP = "tinyorch.strategy"
"""Name by which |tinyorch| plan selection strategy classes are grouped."""

BUILTIN_STRATEGIES = {
    "synergy": "tinyorch.strategies.progressive:SynergyStrategy",
    "oracle": "tinyorch.strategies.oracle:OracleStrategy",
    "mindev": "tinyorch.strategies.progressive:MinDevStrategy",
    "maxdev": "tinyorch.strategies.progressive:MaxDevStrategy",
    "primindev": "tinyorch.strategies.progressive:PriMinDevStrategy",
    "primaxdev": "tinyorch.strategies.progressive:PriMaxDevStrategy",
    "indmodel": "tinyorch.strategies.independent:IndModelStrategy",
    "jointmodel": "tinyorch.strategies.progressive:JointModelStrategy",
    "indbest": "tinyorch.strategies.independent:IndBestStrategy",
}
"""Strategies shipped with the package (also declared as entry points)."""

# Custom exceptions


class ConfigurationError(TinyorchError):
    """Custom exceptions from :mod:`tinyorch.operations.configure` and file parsing."""


class InvalidProfile(ConfigurationError):
    """A device profile violates one of its invariants."""

    def __init__(self, field, message=""):
        self.field = field
        super().__init__(f"Invalid device profile field {field!r}. {message}".strip())


class InvalidModel(ConfigurationError):
    """A model descriptor violates one of its invariants."""

    def __init__(self, layer_index, message=""):
        self.layer_index = layer_index
        super().__init__(f"Invalid model at layer {layer_index}. {message}".strip())


class InvalidCut(TinyorchError):
    """Cut points do not split the model into nonempty contiguous chunks."""


class UnknownSensor(TinyorchError):
    """A source requirement cannot be matched by a sensor on the device."""


class UnknownInterface(TinyorchError):
    """A target requirement cannot be matched by an interface on the device."""


class NoEligibleDevice(TinyorchError):
    """No device satisfies a pipeline's source or target requirement."""


class EstimateError(TinyorchError):
    """Custom exceptions from :mod:`tinyorch.estimate`."""


class EmptyPlan(EstimateError):
    """A holistic plan without any execution plan has no latency."""


class CyclicPlan(EstimateError):
    """The task graph of a holistic plan is not acyclic."""


class PlannerError(TinyorchError):
    """Custom exceptions from :mod:`tinyorch.planner`."""


class NoRunnablePlan(PlannerError):
    """No runnable combination exists for some pipeline."""


class SearchBudgetExceeded(PlannerError):
    """The exhaustive search would evaluate more combinations than allowed."""

    def __init__(self, product, budget):
        self.product = product
        self.budget = budget
        super().__init__(f"Search space of {product} plan combinations exceeds the budget of {budget}.")


class StrategyError(TinyorchError):
    """Custom exceptions from a plan selection |strategy|."""


class SimulatorError(TinyorchError):
    """Custom exceptions from :mod:`tinyorch.simulator`."""


class DeadlockDetected(SimulatorError):
    """No task can make progress while some runs are incomplete."""


class InvalidWindow(SimulatorError):
    """The simulation window (runs, warmup, in-flight) is not usable."""


class TraceViolation(SimulatorError):
    """An event trace breaks exclusivity, precedence or FIFO order."""

    def __init__(self, event, message):
        self.event = event
        super().__init__(f"{message}: {event!r}")


class FixtureError(TinyorchError):
    """Custom exceptions from :mod:`tinyorch.workloads`."""


class UnknownFixture(FixtureError):
    """No fixture is shipped with this name."""


class FixtureDrift(FixtureError):
    """Shipped fixtures no longer agree with the published workload table."""

    def __init__(self, deviations):
        self.deviations = list(deviations)
        super().__init__("Fixture drift: " + "; ".join(self.deviations))


# Functions


def check_value_in_list(title, value, examples, blank_ok=False):
    """Raise ValueError exception if value is not in the list of examples."""
    examples = list(examples)
    if blank_ok:
        examples.append("")
    if value not in examples:
        msg = f"{title} {value!r} unknown. Pick one of: {examples!r}"
        raise ValueError(msg)


def load_json_file(file):
    """Load a JSON document, raise ConfigurationError if it cannot be parsed."""
    path = pathlib.Path(file)
    if not path.exists():
        raise ConfigurationError(f"JSON file '{path}' does not exist.")
    try:
        with open(path, "r") as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"JSON file '{path}' cannot be parsed: {exc}") from exc


def load_yaml(text: str):
    """Load YAML from text."""
    return yaml.load(text, yaml.SafeLoader)


def load_yaml_file(file):
    path = pathlib.Path(file)
    if not path.exists():
        raise FileExistsError(f"YAML file '{path}' does not exist.")
    with open(path, "r") as f:
        return load_yaml(f.read())


def get_strategy(strategy_name):
    """
    Load a plan selection strategy class by name.

    ::

        import tinyorch
        StrategyClass = tinyorch.get_strategy("synergy")
    """
    available = strategies()
    if strategy_name not in available:
        raise StrategyError(f"{strategy_name=!r} unknown.  Pick one of: {sorted(available)!r}")
    entry = EntryPoint(name=strategy_name, value=available[strategy_name], group=STRATEGY_ENTRYPOINT_GROUP)
    return entry.load()


def strategies():
    """
    Dictionary of available strategy classes, mapped by entry point name.

    Installed entry points extend (or replace) the built-in strategies.
    """
    # fmt: off
    entries = dict(BUILTIN_STRATEGIES)
    entries.update({
        ep.name: ep.value
        for ep in entry_points(group=STRATEGY_ENTRYPOINT_GROUP)
    })
    # fmt: on
    return entries


def strategy_factory(strategy_name: str, **kwargs):
    """Create a strategy object, passing ``kwargs`` to its constructor."""
    strategy_class = get_strategy(strategy_name)
    return strategy_class(**kwargs)
