import pathlib
from contextlib import nullcontext as does_not_raise

import pytest

from ... import __version__
from ..configure import ORACLE_BUDGET_ENV
from ..configure import RunConfig
from ..configure import export_header
from ..misc import ConfigurationError
from ..misc import load_yaml_file

FIXTURES = pathlib.Path(__file__).parent.parent.parent / "fixtures"


@pytest.fixture(autouse=True)
def no_budget_override(monkeypatch):
    monkeypatch.delenv(ORACLE_BUDGET_ENV, raising=False)


def test_defaults():
    config = RunConfig(fixture="workload1")
    config.validate()
    assert config.strategy == "synergy"
    assert config.objective == "throughput"
    assert config.prioritization == "data-intensity-desc"
    assert config.budget == 10**8
    assert RunConfig._fromdict(config._asdict()) == config


@pytest.mark.parametrize(
    "changes, context, expected",
    [
        [{}, does_not_raise(), None],
        [{"objective": "speed"}, pytest.raises(ValueError), "Pick one of"],
        [{"mode": "parallel"}, pytest.raises(ValueError), "Pick one of"],
        [{"prioritization": "random"}, pytest.raises(ValueError), "Pick one of"],
        [{"fixture": None}, pytest.raises(ConfigurationError), "Need a fixture"],
        [{"devices": "no-such-file.json"}, pytest.raises(ConfigurationError), "does not exist"],
        [{"runs": 0}, pytest.raises(ConfigurationError), "runs must be positive"],
        [{"runs": 2, "warmup": 2}, pytest.raises(ConfigurationError), "warmup < runs"],
        [{"runs": 1, "warmup": 0}, does_not_raise(), None],
        [{"window": 0}, pytest.raises(ConfigurationError), "window must be positive"],
        [{"budget": 0}, pytest.raises(ConfigurationError), "budget must be positive"],
    ],
)
def test_validate(changes, context, expected):
    config = RunConfig(fixture="workload1")
    for key, value in changes.items():
        setattr(config, key, value)
    with context as excuse:
        config.validate()
    if expected is not None:
        assert expected in str(excuse)


def test_budget_from_environment(monkeypatch):
    monkeypatch.setenv(ORACLE_BUDGET_ENV, "1000")
    config = RunConfig(budget=5)
    assert config.budget == 1000
    config.update(budget=7)
    assert config.budget == 1000

    monkeypatch.setenv(ORACLE_BUDGET_ENV, "lots")
    with pytest.raises(ConfigurationError) as excuse:
        RunConfig()
    assert "is not an integer" in str(excuse)


def test_update():
    config = RunConfig().update(strategy="oracle", runs=None, comment="trial")
    assert config.strategy == "oracle"
    assert config.runs == 20
    assert config.comment == "trial"
    with pytest.raises(ConfigurationError) as excuse:
        config.update(color="blue")
    assert "Unknown run setting" in str(excuse)


def test_from_file(tmp_path):
    path = tmp_path / "run.yml"
    path.write_text("_header:\n  comment: ignored\nfixture: workload2\nmode: sequential\nruns: 5\nwarmup: 1\n")
    config = RunConfig.from_file(path)
    assert config.fixture == "workload2"
    assert config.mode == "sequential"
    assert (config.runs, config.warmup) == (5, 1)

    path.write_text("fixture: workload2\nseed: 7\n")
    with pytest.raises(ConfigurationError) as excuse:
        RunConfig.from_file(path)
    assert "Unknown run settings ['seed']" in str(excuse)

    path.write_text("- just\n- a list\n")
    with pytest.raises(ConfigurationError) as excuse:
        RunConfig.from_file(path)
    assert "must be a mapping" in str(excuse)

    path.write_text("fixture: [unclosed\n")
    with pytest.raises(ConfigurationError) as excuse:
        RunConfig.from_file(path)
    assert "cannot be parsed" in str(excuse)

    with pytest.raises(FileExistsError):
        RunConfig.from_file(tmp_path / "missing.yml")


def test_load():
    fixture = RunConfig(fixture="workload1").load()
    assert [p.id for p in fixture.pipelines] == ["p1", "p2", "p3"]
    assert [d.id for d in fixture.devices] == ["earbud", "glasses", "ring", "watch"]

    # a devices file replaces the fixture's devices
    fixture = RunConfig(fixture="workload1", devices=str(FIXTURES / "hetero.json")).load()
    assert max(d.weight_capacity for d in fixture.devices) == 2_000_000

    config = RunConfig(devices=str(FIXTURES / "max78000x2.json"), workload=str(FIXTURES / "pipelines8.json"))
    fixture = config.load()
    assert len(fixture.pipelines) == 8
    assert len(fixture.devices) == 2


@pytest.mark.parametrize(
    "keypath, value",
    [
        ["_header.datetime", None],
        ["_header.tinyorch_version", __version__],
        ["_header.python_class", "Selection"],
        ["_header.command", "plan"],
        ["_header.comment", "example"],
    ],
)
def test_export_header(keypath, value, tmp_path):
    output = tmp_path / "plan.json"
    sidecar = export_header(output, "plan", comment="example", python_class="Selection")
    assert sidecar.name == "plan.json.meta.yml"
    assert sidecar.read_text().startswith("#tinyorch metadata file")

    config = load_yaml_file(sidecar)
    for key in keypath.split("."):
        assert key in config, f"{key=!r}"
        config = config[key]
    if value is not None:
        assert config == value, f"{keypath=!r}"
