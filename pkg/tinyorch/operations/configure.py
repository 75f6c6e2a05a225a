"""
Run settings of the command line, and the metadata of files it writes.

.. autosummary::

    ~RunConfig
    ~export_header
    ~ORACLE_BUDGET_ENV

.. seealso:: # https://pyyaml.org/wiki/PyYAMLDocumentation
"""

import dataclasses
import datetime
import logging
import os
import pathlib
import typing

import yaml

from .misc import ConfigurationError
from .misc import check_value_in_list
from .misc import load_yaml_file

logger = logging.getLogger(__name__)

ORACLE_BUDGET_ENV = "SYNERGY_ORACLE_BUDGET"
"""Environment variable that overrides the oracle search budget."""

OBJECTIVES = ["throughput", "latency", "power"]
MODES = ["sequential", "inter-pipeline", "inter-run"]
PRIORITIZATIONS = [
    "data-intensity-desc",
    "data-intensity-asc",
    "model-size-desc",
    "model-size-asc",
    "num-layers-desc",
    "num-layers-asc",
    "sequential",
]


@dataclasses.dataclass
class RunConfig:
    """
    Settings of one command-line run.

    Workload and devices come from a named ``fixture``, or from the
    ``devices``, ``models`` and ``workload`` files (a file given next to a
    fixture replaces that part of the fixture).  Everything is
    deterministic; there is no seed.

    .. autosummary::

        ~_asdict
        ~_fromdict
        ~from_file
        ~load
        ~update
        ~validate
    """

    fixture: typing.Optional[str] = None
    devices: typing.Optional[str] = None
    models: typing.Optional[str] = None
    workload: typing.Optional[str] = None
    strategy: str = "synergy"
    prioritization: str = "data-intensity-desc"
    objective: str = "throughput"
    mode: str = "inter-run"
    runs: int = 20
    warmup: int = 2
    window: int = 4
    budget: int = 10**8
    max_chunks: typing.Optional[int] = None
    output: typing.Optional[str] = None
    trace: typing.Optional[str] = None
    comment: str = ""

    def __post_init__(self):
        budget = os.environ.get(ORACLE_BUDGET_ENV)
        if budget is not None:
            try:
                self.budget = int(budget)
            except ValueError as exc:
                raise ConfigurationError(f"{ORACLE_BUDGET_ENV}={budget!r} is not an integer.") from exc
            logger.debug("oracle budget=%d from %s", self.budget, ORACLE_BUDGET_ENV)

    def _asdict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def _fromdict(cls, config: dict):
        """Settings from a dictionary; unknown keys raise ConfigurationError."""
        known = [f.name for f in dataclasses.fields(cls)]
        unknown = sorted(set(config) - set(known))
        if unknown:
            raise ConfigurationError(f"Unknown run settings {unknown!r}.  Pick from: {known!r}")
        return cls(**config)

    @classmethod
    def from_file(cls, file):
        """Settings from a YAML file."""
        try:
            config = load_yaml_file(file) or {}
        except yaml.YAMLError as exc:
            raise ConfigurationError(f"Run settings in '{file}' cannot be parsed: {exc}") from exc
        if not isinstance(config, dict):
            raise ConfigurationError(f"Run settings in '{file}' must be a mapping.")
        config.pop("_header", None)
        return cls._fromdict(config)

    def update(self, **overrides):
        """Replace settings; ``None`` values leave a setting unchanged."""
        for key, value in overrides.items():
            if value is not None:
                if not hasattr(self, key):
                    raise ConfigurationError(f"Unknown run setting {key!r}.")
                setattr(self, key, value)
        # environment has the last word on the budget
        self.__post_init__()
        return self

    def validate(self):
        """Raise if a setting is out of range or a referenced file is missing."""
        check_value_in_list("Objective", self.objective, OBJECTIVES)
        check_value_in_list("Simulation mode", self.mode, MODES)
        check_value_in_list("Prioritization", self.prioritization, PRIORITIZATIONS)
        if self.fixture is None and (self.devices is None or self.workload is None):
            raise ConfigurationError("Need a fixture, or both a devices and a workload file.")
        for name in ("devices", "models", "workload"):
            path = getattr(self, name)
            if path is not None and not pathlib.Path(path).exists():
                raise ConfigurationError(f"{name} file '{path}' does not exist.")
        if self.runs < 1:
            raise ConfigurationError(f"runs must be positive, received {self.runs}.")
        if not 0 <= self.warmup < self.runs:
            raise ConfigurationError(f"Need 0 <= warmup < runs, received warmup={self.warmup}, runs={self.runs}.")
        if self.window < 1:
            raise ConfigurationError(f"window must be positive, received {self.window}.")
        if self.budget < 1:
            raise ConfigurationError(f"budget must be positive, received {self.budget}.")

    def load(self):
        """Models, devices and pipelines named by these settings."""
        from ..workloads import FixtureSet
        from ..workloads import load_devices
        from ..workloads import load_fixture
        from ..workloads import load_models
        from ..workloads import load_pipelines

        if self.fixture is not None:
            models, devices, pipelines = load_fixture(self.fixture)[1:]
        else:
            models, devices, pipelines = load_models(), [], []
        if self.models is not None:
            models = load_models(self.models)
        if self.devices is not None:
            devices = load_devices(self.devices)
        if self.workload is not None:
            pipelines = load_pipelines(self.workload, models)
        return FixtureSet(self.fixture or str(self.workload), models, devices, pipelines)


def export_header(output, command: str, comment: str = "", python_class: str = "") -> pathlib.Path:
    """
    Write the metadata sidecar ``<output>.meta.yml`` of a data file.

    Data files carry no timestamps; the run information is kept here.
    """
    from .. import __version__

    path = pathlib.Path(output)
    sidecar = path.with_name(path.name + ".meta.yml")
    config = {
        "_header": {
            "datetime": str(datetime.datetime.now()),
            "tinyorch_version": __version__,
            "python_class": python_class,
            "command": command,
            "file": str(path),
            "comment": str(comment),
        },
    }
    dump = yaml.dump(config, indent=2, default_flow_style=False, sort_keys=False)
    with open(sidecar, "w") as y:
        y.write("#tinyorch metadata file\n\n")
        y.write(dump)
    return sidecar
