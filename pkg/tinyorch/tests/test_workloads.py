import json
from contextlib import nullcontext as does_not_raise

import pytest

from .. import workloads
from ..operations.misc import ConfigurationError
from ..operations.misc import FixtureDrift
from ..operations.misc import UnknownFixture
from ..workloads import FIXTURES
from ..workloads import PUBLISHED_MODELS
from ..workloads import PublishedModel
from ..workloads import accelerator_class
from ..workloads import fixture_selfcheck
from ..workloads import fixtures
from ..workloads import load_devices
from ..workloads import load_fixture
from ..workloads import load_models
from ..workloads import load_pipelines
from .common import make_device


def test_selfcheck():
    assert fixture_selfcheck() == []


def test_selfcheck_reports_drift(monkeypatch):
    drifted = dict(PUBLISHED_MODELS)
    drifted["UNet"] = PublishedModel(279_085, (48, 48, 48), 90_000, 20)
    monkeypatch.setattr(workloads, "PUBLISHED_MODELS", drifted)

    deviations = fixture_selfcheck(strict=False)
    assert len(deviations) == 3
    assert all(d.startswith("UNet:") for d in deviations)

    with pytest.raises(FixtureDrift) as excuse:
        fixture_selfcheck()
    assert excuse.value.deviations == deviations
    assert "weights sum to 279084" in str(excuse)


@pytest.mark.parametrize(
    "name, layers",
    [
        ["KWS", 9],
        ["SimpleNet", 14],
        ["UNet", 19],
        ["EfficientNetV2", 29],
        ["MobileNetV2", 53],
    ],
)
def test_model_layers(name, layers):
    model = load_models()[name]
    assert model.num_layers == layers
    assert model.weight_bytes == PUBLISHED_MODELS[name].size_bytes


@pytest.mark.parametrize(
    "name, pipelines, models",
    [
        ["workload1", ["p1", "p2", "p3"], ["ConvNet5", "ResSimpleNet", "UNet"]],
        ["workload2", ["p1", "p2", "p3"], ["KWS", "SimpleNet", "WideNet"]],
        ["workload3", ["p1"], ["EfficientNetV2"]],
        ["workload4", ["p1"], ["MobileNetV2"]],
        ["pipelines8", [f"p{i}" for i in range(1, 9)], None],
    ],
)
def test_load_fixture(name, pipelines, models):
    fixture = load_fixture(name)
    assert fixture.name == name
    assert [p.id for p in fixture.pipelines] == pipelines
    if models is not None:
        assert [p.model.name for p in fixture.pipelines] == models
    assert len(fixture.models) == 8


def test_workload2_mapping():
    fixture = load_fixture("workload2")
    p1, p2, p3 = fixture.pipelines
    assert (p1.source.device, p1.source.sensor_type, p1.target.device) == ("earbud", "microphone", "ring")
    assert (p2.source.device, p2.target.device) == ("watch", "earbud")
    assert (p3.source.device, p3.target.device) == ("glasses", "watch")
    assert [p.model.weight_bytes for p in fixture.pipelines] == [169_472, 166_448, 313_700]


def test_devices():
    fixture = load_fixture("workload1")
    assert [d.id for d in fixture.devices] == ["earbud", "glasses", "ring", "watch"]
    assert all(d.capacities == (442_000, 2_000, 32) for d in fixture.devices)

    hetero = {d.id: d for d in load_fixture("workload4-hetero").devices}
    assert hetero["glasses"].capacities == (2_000_000, 8_000, 128)
    assert hetero["ring"].capacities == (442_000, 2_000, 32)


def test_accelerator_class(monkeypatch):
    hetero = {d.id: d for d in load_fixture("workload4-hetero").devices}
    assert accelerator_class(hetero["glasses"]) == "MAX78002"
    assert accelerator_class(hetero["ring"]) == "MAX78000"
    assert accelerator_class(make_device("odd", max_layers=16)) is None

    monkeypatch.setattr(workloads, "load_devices", lambda file: [make_device("odd", max_layers=16)])
    deviations = fixture_selfcheck(strict=False)
    # one per devices file
    assert len(deviations) == len({device_file for _, device_file in FIXTURES.values()})
    assert all("odd has capacities (442000, 2000, 16)" in d for d in deviations)


def test_model_fixture():
    fixture = load_fixture("mobilenetv2")
    assert list(fixture.models) == ["MobileNetV2"]
    assert fixture.models["MobileNetV2"].input_bytes == 32 * 32 * 3
    assert fixture.models["MobileNetV2"].weight_bytes == 821_164
    assert fixture.pipelines == []


@pytest.mark.parametrize(
    "name, context",
    [
        ["workload1", does_not_raise()],
        ["unet", does_not_raise()],
        ["UNet", pytest.raises(UnknownFixture)],
        ["workload5", pytest.raises(UnknownFixture)],
    ],
)
def test_fixture_names(name, context):
    with context as excuse:
        load_fixture(name)
    if excuse is not None:
        assert "Pick one of" in str(excuse)
    assert set(FIXTURES) < set(fixtures())


def test_duplicate_ids(tmp_path):
    base = load_fixture("workload2")

    path = tmp_path / "devices.json"
    device = base.devices[0]._asdict()
    path.write_text(json.dumps({"devices": [device, device]}))
    with pytest.raises(ConfigurationError) as excuse:
        load_devices(path)
    assert "must be unique" in str(excuse)

    path = tmp_path / "workload.json"
    pipeline = base.pipelines[0]._asdict()
    path.write_text(json.dumps({"pipelines": [pipeline, pipeline]}))
    with pytest.raises(ConfigurationError) as excuse:
        load_pipelines(path, base.models)
    assert "must be unique" in str(excuse)

    path = tmp_path / "models.json"
    model = base.models["KWS"]._asdict()
    path.write_text(json.dumps({"models": [model, model]}))
    with pytest.raises(ConfigurationError) as excuse:
        load_models(path)
    assert "Duplicate model name" in str(excuse)
