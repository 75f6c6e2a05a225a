"""Small devices, models and pipelines shared by the tests."""

from ..operations.device import MAX78000_DEFAULTS
from ..operations.device import DeviceProfile
from ..operations.device import SensorSpec
from ..operations.model import LayerKind
from ..operations.model import LayerSpec
from ..operations.model import ModelDescriptor
from ..operations.pipeline import PipelineSpec
from ..operations.pipeline import SourceRequirement
from ..operations.pipeline import TargetRequirement

CAMERA = ("camera", 3072, 2_000_000)
MICROPHONE = ("microphone", 16384, 16_000_000)


def make_device(device_id, sensors=(CAMERA, MICROPHONE), interfaces=("display",), **overrides):
    """A MAX78000-class device."""
    config = dict(MAX78000_DEFAULTS, **overrides)
    return DeviceProfile(
        id=device_id,
        sensors=tuple(SensorSpec(*s) for s in sensors),
        interfaces=tuple(interfaces),
        **config,
    )


def make_devices(count, **overrides):
    """``count`` identical devices named ``d0``, ``d1``, ..."""
    return [make_device(f"d{i}", **overrides) for i in range(count)]


def conv_layer(channels=4, size=8, k=3):
    """A same-shape convolution, one byte per weight and per bias."""
    return LayerSpec(
        kind=LayerKind.CONV,
        k=k,
        in_shape=(size, size, channels),
        out_shape=(size, size, channels),
        weight_bytes=k * k * channels * channels,
        bias_bytes=channels,
        out_bytes=size * size * channels,
    )


def chain_model(num_layers, name="chain", channels=4, size=8):
    """A model of ``num_layers`` identical convolutions."""
    return ModelDescriptor(
        name=name,
        input_bytes=size * size * channels,
        layers=tuple(conv_layer(channels, size) for _ in range(num_layers)),
    )


def make_pipeline(model, pipeline_id="p1", source=None, target=None):
    """Camera to display pipeline, optionally pinned to devices."""
    return PipelineSpec(
        id=pipeline_id,
        source=SourceRequirement(device=source, sensor_type="camera"),
        model=model,
        target=TargetRequirement(device=target, interface_type="display"),
    )


def make_tables(pipelines, devices):
    """Candidate tables of ``pipelines``, sources and targets unconstrained."""
    from ..candidates import CandidateTable

    return [CandidateTable(p, devices) for p in pipelines]


def holistic_of(tables, rows):
    """Holistic plan of one chosen row per table."""
    from ..operations.plan import HolisticPlan

    return HolisticPlan(t.plan(r) for t, r in zip(tables, rows))
