"""
Shipped workloads: models, devices and pipelines as JSON fixtures.

.. autosummary::

    ~accelerator_class
    ~ACCELERATOR_CLASSES
    ~fixture_selfcheck
    ~fixtures
    ~FixtureSet
    ~load_devices
    ~load_fixture
    ~load_models
    ~load_pipelines
    ~PUBLISHED_MODELS
"""

import logging
import pathlib
import typing
from fractions import Fraction

from .operations.device import MAX78000_DEFAULTS
from .operations.device import MAX78002_DEFAULTS
from .operations.device import DeviceProfile
from .operations.misc import ConfigurationError
from .operations.misc import FixtureDrift
from .operations.misc import UnknownFixture
from .operations.misc import load_json_file
from .operations.model import ModelDescriptor
from .operations.pipeline import PipelineSpec

logger = logging.getLogger(__name__)
FIXTURE_DIR = pathlib.Path(__file__).parent / "fixtures"
MODELS_FILE = FIXTURE_DIR / "models.json"
AVG_OUT_TOLERANCE = Fraction(5, 100)


class PublishedModel(typing.NamedTuple):
    """Published size, input shape, average output size and (if stated) layer count."""

    size_bytes: int
    input_shape: tuple
    avg_out_bytes: int
    layers: typing.Optional[int] = None


# fmt: off
PUBLISHED_MODELS = {
    "ConvNet5":       PublishedModel(71158, (28, 28, 1), 14031),
    "ResSimpleNet":   PublishedModel(381792, (32, 32, 3), 11217),
    "UNet":           PublishedModel(279084, (48, 48, 48), 74547, 19),
    "KWS":            PublishedModel(169472, (128, 128, 1), 7976, 9),
    "SimpleNet":      PublishedModel(166448, (32, 32, 3), 9237, 14),
    "WideNet":        PublishedModel(313700, (32, 32, 3), 10091),
    "EfficientNetV2": PublishedModel(627220, (32, 32, 3), 66468, 29),
    "MobileNetV2":    PublishedModel(821164, (32, 32, 3), 296318),
}
# fmt: on
"""Model table the shipped fixtures must agree with."""

ACCELERATOR_CLASSES = {"MAX78000": MAX78000_DEFAULTS, "MAX78002": MAX78002_DEFAULTS}
"""Accelerator classes a shipped device may carry."""

# name: (workload file, devices file)
FIXTURES = {
    "workload1": ("workload1.json", "wearables.json"),
    "workload1-any": ("workload1-any.json", "wearables.json"),
    "workload1-overlapped": ("workload1-overlapped.json", "wearables.json"),
    "workload2": ("workload2.json", "wearables.json"),
    "workload3": ("workload3.json", "wearables.json"),
    "workload4": ("workload4.json", "wearables.json"),
    "workload4-hetero": ("workload4.json", "hetero.json"),
    "workload1-hetero": ("workload1.json", "hetero.json"),
    "pipelines8": ("pipelines8.json", "max78000x2.json"),
}


class FixtureSet(typing.NamedTuple):
    """Models, devices and pipelines of one fixture."""

    name: str
    models: dict
    devices: list
    pipelines: list


def load_models(file=MODELS_FILE) -> dict:
    """Validated models of a models document, by name (file order)."""
    config = load_json_file(file)
    models = {}
    for entry in config.get("models", []):
        model = ModelDescriptor._fromdict(entry)
        if model.name in models:
            raise ConfigurationError(f"Duplicate model name {model.name!r} in '{file}'.")
        models[model.name] = model
    return models


def load_devices(file) -> list:
    """Validated device profiles of a devices document (file order)."""
    config = load_json_file(file)
    devices = [DeviceProfile._fromdict(entry) for entry in config.get("devices", [])]
    ids = [d.id for d in devices]
    if len(set(ids)) != len(ids):
        raise ConfigurationError(f"Device ids must be unique in '{file}', received {ids!r}.")
    return devices


def load_pipelines(file, models: dict) -> list:
    """Pipelines of a workload document, in registration (file) order."""
    config = load_json_file(file)
    pipelines = [PipelineSpec._fromdict(entry, models) for entry in config.get("pipelines", [])]
    ids = [p.id for p in pipelines]
    if len(set(ids)) != len(ids):
        raise ConfigurationError(f"Pipeline ids must be unique in '{file}', received {ids!r}.")
    return pipelines


def fixtures() -> list:
    """Names accepted by :func:`load_fixture`."""
    return sorted(FIXTURES) + sorted(name.lower() for name in PUBLISHED_MODELS)


def load_fixture(name: str) -> FixtureSet:
    """
    Load a shipped fixture.

    Workload fixtures carry their pipelines; a model name (lower case,
    e.g. ``"mobilenetv2"``) gives just that model on the wearables.
    """
    models = load_models()
    if name in FIXTURES:
        workload, device_file = FIXTURES[name]
        pipelines = load_pipelines(FIXTURE_DIR / workload, models)
        return FixtureSet(name, models, load_devices(FIXTURE_DIR / device_file), pipelines)
    by_lower = {k.lower(): k for k in models}
    if name in by_lower:
        model = models[by_lower[name]]
        return FixtureSet(name, {model.name: model}, load_devices(FIXTURE_DIR / "wearables.json"), [])
    raise UnknownFixture(f"Fixture {name!r} unknown.  Pick one of: {fixtures()!r}")


def accelerator_class(device: DeviceProfile) -> typing.Optional[str]:
    """Name of the accelerator class whose capacities ``device`` has, or ``None``."""
    for name, defaults in ACCELERATOR_CLASSES.items():
        if device.capacities == (defaults["weight_capacity"], defaults["bias_capacity"], defaults["max_layers"]):
            return name
    return None


def fixture_selfcheck(strict: bool = True) -> list:
    """
    Compare the shipped models with the published model table.

    Weight sums must equal the published sizes, input sizes the published
    shapes, stated layer counts must match, and the mean of input and
    layer output sizes must be within 5% of the published average.
    Every workload fixture must load, and every shipped device must have
    the capacities of one of the :data:`ACCELERATOR_CLASSES`.  Returns the
    deviations; raises :class:`FixtureDrift` with all of them when
    ``strict``.
    """
    deviations = []
    models = load_models()
    for name, published in PUBLISHED_MODELS.items():
        model = models.get(name)
        if model is None:
            deviations.append(f"{name}: missing")
            continue
        if model.weight_bytes != published.size_bytes:
            deviations.append(f"{name}: weights sum to {model.weight_bytes}, expected {published.size_bytes}")
        h, w, c = published.input_shape
        if model.input_bytes != h * w * c:
            deviations.append(f"{name}: input is {model.input_bytes} bytes, expected {h * w * c}")
        if published.layers is not None and model.num_layers != published.layers:
            deviations.append(f"{name}: {model.num_layers} layers, expected {published.layers}")
        average = model.data_intensity
        if abs(average - published.avg_out_bytes) > AVG_OUT_TOLERANCE * published.avg_out_bytes:
            deviations.append(
                f"{name}: average output {float(average):.1f} bytes,"
                f" expected {published.avg_out_bytes} within 5%"
            )
    for name in FIXTURES:
        try:
            load_fixture(name)
        except ConfigurationError as exc:
            deviations.append(f"{name}: {exc}")
    for device_file in sorted({device_file for _, device_file in FIXTURES.values()}):
        try:
            devices = load_devices(FIXTURE_DIR / device_file)
        except ConfigurationError as exc:
            deviations.append(f"{device_file}: {exc}")
            continue
        for device in devices:
            if accelerator_class(device) is None:
                deviations.append(
                    f"{device_file}: {device.id} has capacities {device.capacities} of no known class"
                )
    logger.debug("fixture deviations=%r", deviations)
    if strict and deviations:
        raise FixtureDrift(deviations)
    return deviations
