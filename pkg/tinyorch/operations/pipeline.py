"""
Device-agnostic declaration of an app pipeline: sensing, model, interaction.

.. autosummary::

    ~PipelineSpec
    ~SourceRequirement
    ~TargetRequirement
"""

import dataclasses
import logging
import typing

from .misc import ConfigurationError
from .misc import NoEligibleDevice
from .model import ModelDescriptor

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class SourceRequirement:
    """Where the sensing task may run: a designated device, a sensor type, or both."""

    device: typing.Optional[str] = None
    sensor_type: typing.Optional[str] = None

    def __post_init__(self):
        if not (self.device or self.sensor_type):
            raise ConfigurationError("A source requirement needs a device or a sensor_type.")

    def allows(self, device) -> bool:
        if self.device is not None and device.id != self.device:
            return False
        return self.sensor_type is None or device.has_sensor(self.sensor_type)

    def _asdict(self):
        return {k: v for k, v in dataclasses.asdict(self).items() if v is not None}


@dataclasses.dataclass(frozen=True)
class TargetRequirement:
    """Where the interaction task may run: a designated device, an interface type, or both."""

    device: typing.Optional[str] = None
    interface_type: typing.Optional[str] = None

    def __post_init__(self):
        if not (self.device or self.interface_type):
            raise ConfigurationError("A target requirement needs a device or an interface_type.")

    def allows(self, device) -> bool:
        if self.device is not None and device.id != self.device:
            return False
        return self.interface_type is None or device.has_interface(self.interface_type)

    def _asdict(self):
        return {k: v for k, v in dataclasses.asdict(self).items() if v is not None}


@dataclasses.dataclass(frozen=True)
class PipelineSpec:
    """
    An app's end-to-end chain: source requirement, model, target requirement.

    .. rubric:: Parameters

    * ``id`` (str): Unique name of the pipeline.
    * ``source`` (SourceRequirement): Where sensing happens.
    * ``model`` (ModelDescriptor): The AI model.
    * ``target`` (TargetRequirement): Where interaction happens.

    .. autosummary::

        ~_asdict
        ~_fromdict
        ~eligible_sources
        ~eligible_targets
    """

    id: str
    source: SourceRequirement
    model: ModelDescriptor
    target: TargetRequirement

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(id={self.id!r}, model={self.model.name!r})"

    def eligible_sources(self, devices) -> list:
        """Devices (in the given order) allowed to run the sensing task."""
        found = [d for d in devices if self.source.allows(d)]
        if len(found) == 0:
            raise NoEligibleDevice(f"Pipeline {self.id!r}: no device satisfies {self.source!r}.")
        return found

    def eligible_targets(self, devices) -> list:
        """Devices (in the given order) allowed to run the interaction task."""
        found = [d for d in devices if self.target.allows(d)]
        if len(found) == 0:
            raise NoEligibleDevice(f"Pipeline {self.id!r}: no device satisfies {self.target!r}.")
        return found

    def _asdict(self):
        return {
            "id": self.id,
            "source": self.source._asdict(),
            "model": self.model.name,
            "target": self.target._asdict(),
        }

    @classmethod
    def _fromdict(cls, config: dict, models: dict):
        """
        Create a pipeline from a (JSON) dictionary.

        ``models`` maps model names to :class:`ModelDescriptor` objects.
        """
        try:
            pipeline_id = config["id"]
            model_name = config["model"]
            source = SourceRequirement(**config["source"])
            target = TargetRequirement(**config["target"])
        except (KeyError, TypeError) as exc:
            raise ConfigurationError(f"Cannot parse pipeline {config!r}: {exc}") from exc
        if model_name not in models:
            raise ConfigurationError(
                f"Pipeline {pipeline_id!r}: model {model_name!r} unknown. Pick one of: {sorted(models)!r}"
            )
        return cls(id=pipeline_id, source=source, model=models[model_name], target=target)
