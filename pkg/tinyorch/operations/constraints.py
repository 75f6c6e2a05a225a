"""
Accelerator capacity limits that decide whether a holistic plan is runnable.

.. autosummary::

    ~AcceleratorConstraints
    ~CapacityConstraint
    ~ConstraintBase
    ~is_runnable
    ~RunnableReport
    ~Violation

Only inference chunks use accelerator memory.  Sensing, interaction and
radio tasks do not count against the capacities.
"""

import logging
import typing
from abc import ABC
from abc import abstractmethod

from .misc import ConfigurationError
from .model import Footprint

logger = logging.getLogger(__name__)
UNDEFINED_LABEL = "undefined"
DIMENSIONS = ("weight", "bias", "layers")


class Violation(typing.NamedTuple):
    """One exceeded capacity."""

    device: str
    dimension: str
    used: int
    capacity: int


class ConstraintBase(ABC):
    """
    Base class for all constraints on accelerator usage.

    .. autosummary::

        ~valid
        ~violations
    """

    label: str = UNDEFINED_LABEL

    @abstractmethod
    def violations(self, footprint: Footprint) -> list:
        """List of :class:`Violation` for the given usage."""

    def valid(self, footprint: Footprint) -> bool:
        """Is this constraint satisfied by the given usage?"""
        return len(self.violations(footprint)) == 0


class CapacityConstraint(ConstraintBase):
    """
    Weight memory, bias memory and layer count of one accelerator.

    Limits are inclusive: usage equal to a capacity is allowed.

    .. rubric:: Parameters

    * ``weight_capacity`` (int): bytes
    * ``bias_capacity`` (int): bytes
    * ``max_layers`` (int): layers
    * ``label`` (str): Device id.
    """

    def __init__(self, weight_capacity, bias_capacity, max_layers, label=None):
        if label is None:
            raise ConfigurationError("Must provide a value for 'label'.")
        self.label = label
        self.weight_capacity = weight_capacity
        self.bias_capacity = bias_capacity
        self.max_layers = max_layers

    def __repr__(self) -> str:
        return (
            f"{self.label}: weight <= {self.weight_capacity},"
            f" bias <= {self.bias_capacity}, layers <= {self.max_layers}"
        )

    @property
    def capacities(self):
        return Footprint(self.weight_capacity, self.bias_capacity, self.max_layers)

    def violations(self, footprint: Footprint) -> list:
        return [
            Violation(self.label, dimension, used, limit)
            for dimension, used, limit in zip(DIMENSIONS, footprint, self.capacities)
            if used > limit
        ]


class AcceleratorConstraints(dict):
    """
    Capacity constraints for every device, keyed by device id.
    """

    def __init__(self, devices):
        for device in devices:
            self[device.id] = CapacityConstraint(*device.capacities, label=device.id)

    def violations(self, usage: dict) -> list:
        """All violations for per-device usage totals."""
        found = []
        for device, footprint in sorted(usage.items()):
            if device not in self:
                raise ConfigurationError(f"Device {device!r} unknown. Pick one of: {sorted(self)!r}")
            found.extend(self[device].violations(footprint))
        return found

    def valid(self, usage: dict) -> bool:
        """Are all constraints satisfied?"""
        return len(self.violations(usage)) == 0


class RunnableReport(typing.NamedTuple):
    """Outcome of :func:`is_runnable`: flag, per-device usage and violations."""

    runnable: bool
    usage: dict
    violations: list

    def __bool__(self) -> bool:
        return self.runnable


def is_runnable(holistic, devices) -> RunnableReport:
    """
    Check a holistic plan against every accelerator's capacities.

    Usage sums all pipelines' chunks on each device.  An empty plan is
    runnable.
    """
    usage = holistic.usage()
    violations = AcceleratorConstraints(devices).violations(usage)
    logger.debug("usage=%r violations=%r", usage, violations)
    return RunnableReport(len(violations) == 0, usage, violations)
