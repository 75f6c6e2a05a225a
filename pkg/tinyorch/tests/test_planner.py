import math
from contextlib import nullcontext as does_not_raise
from fractions import Fraction

import numpy as np
import pytest

from ..estimate import ObjectiveKind
from ..operations.constraints import is_runnable
from ..operations.misc import ConfigurationError
from ..operations.misc import NoEligibleDevice
from ..operations.misc import NoRunnablePlan
from ..operations.misc import PlannerError
from ..operations.misc import SearchBudgetExceeded
from ..operations.misc import StrategyError
from ..planner import BASELINES
from ..planner import Planner
from ..planner import Prioritization
from ..planner import compare
from ..planner import data_intensity
from ..planner import prioritize
from ..workloads import load_fixture
from ..workloads import load_models
from .common import chain_model
from .common import make_devices
from .common import make_pipeline

ACCUMULATING = ["synergy", "mindev", "maxdev", "primindev", "primaxdev", "jointmodel"]


@pytest.fixture
def kws_simplenet_unet():
    models = load_models()
    yield [make_pipeline(models[name], f"p{i}") for i, name in enumerate(("KWS", "SimpleNet", "UNet"), start=1)]


def test_search_space(kws_simplenet_unet):
    planner = Planner(make_devices(3), kws_simplenet_unet)
    space = planner.search_space(respect_requirements=False)
    assert space.counts == {"p1": 1_971, "p2": 4_941, "p3": 9_261}
    assert space.total == 16_173
    assert space.product == 90_190_202_571
    assert space.reduction == pytest.approx(90_190_202_571 / 16_173)
    assert space._asdict()["sum"] == 16_173

    selection = planner.select("synergy")
    assert selection.status == "ok"
    assert selection.evaluated <= space.total * len(kws_simplenet_unet)

    with pytest.raises(SearchBudgetExceeded) as excuse:
        planner.select_oracle()
    assert excuse.value.product == 90_190_202_571


def test_progressive_near_oracle(kws_simplenet_unet):
    planner = Planner(make_devices(2), kws_simplenet_unet)
    oracle = planner.select_oracle()
    progressive = planner.select_progressive()
    assert oracle.status == progressive.status == "ok"
    assert progressive.estimate.throughput >= 0.9 * oracle.estimate.throughput
    assert progressive.estimate.throughput <= oracle.estimate.throughput * (1 + 1e-9)


@pytest.mark.parametrize("objective", ["throughput", "latency", "power"])
def test_single_pipeline_progressive_is_oracle(objective):
    planner = Planner(make_devices(3), [make_pipeline(chain_model(8))], objective=objective)
    assert planner.select_progressive().holistic == planner.select_oracle().holistic


def test_power_objective_is_minimal():
    planner = Planner(make_devices(3), [make_pipeline(chain_model(6))], objective="power")
    selection = planner.select("synergy")
    chosen = Fraction(selection.estimate.energy_nj, selection.estimate.latency_ns)
    table = planner.tables["p1"]
    powers = [Fraction(int(e), int(t)) for e, t in zip(table.energy_nj, table.latency_ns)]
    assert chosen == min(powers)


def test_workload1_out_of_resource(workload1):
    planner = Planner(workload1.devices, workload1.pipelines)
    selection = planner.select_baseline("indmodel")
    assert selection.status == "oor"
    assert not selection.report
    assert len(selection._asdict()["violations"]) > 0

    for strategy in ACCUMULATING:
        selection = planner.select(strategy)
        assert selection.status == "ok", f"{strategy=}"
        assert is_runnable(selection.holistic, workload1.devices)
        assert "violations" not in selection._asdict()

    estimate = planner.select_progressive().estimate
    assert 0 < estimate.throughput < math.inf
    assert estimate.energy_nj > 0


def test_selection_follows_registration_order(workload1):
    planner = Planner(workload1.devices, workload1.pipelines, prioritization="data-intensity-asc")
    selection = planner.select()
    assert selection.holistic.pipeline_ids == ["p1", "p2", "p3"]
    assert selection.prioritization == Prioritization.DATA_INTENSITY_ASC
    assert selection.objective == ObjectiveKind.THROUGHPUT_MAX
    config = selection._asdict()
    assert config["strategy"] == "synergy"
    assert config["prioritization"] == "data-intensity-asc"
    assert [p["pipeline"] for p in config["plan"]["plans"]] == ["p1", "p2", "p3"]


@pytest.mark.parametrize(
    "prioritization, expected",
    [
        ["data-intensity-desc", ["p3", "p1", "p2"]],
        ["data-intensity-asc", ["p2", "p1", "p3"]],
        ["model-size-desc", ["p2", "p3", "p1"]],
        ["model-size-asc", ["p1", "p3", "p2"]],
        ["num-layers-desc", ["p3", "p2", "p1"]],
        ["num-layers-asc", ["p1", "p2", "p3"]],
        ["sequential", ["p1", "p2", "p3"]],
    ],
)
def test_prioritize(prioritization, expected, workload1):
    assert [p.id for p in prioritize(workload1.pipelines, prioritization)] == expected


def test_data_intensity(workload1):
    p1 = workload1.pipelines[0]
    layers = p1.model.layers
    expected = Fraction(p1.model.input_bytes + sum(layer.out_bytes for layer in layers), len(layers) + 1)
    assert data_intensity(p1) == expected


@pytest.mark.parametrize(
    "pipelines, context, expected",
    [
        [[], pytest.raises(ConfigurationError), "at least one pipeline"],
        [
            [make_pipeline(chain_model(3)), make_pipeline(chain_model(3))],
            pytest.raises(ConfigurationError),
            "unique",
        ],
        [[make_pipeline(chain_model(3))], does_not_raise(), None],
    ],
)
def test_planner_arguments(pipelines, context, expected):
    with context as excuse:
        Planner(make_devices(2), pipelines)
    if expected is not None:
        assert expected in str(excuse)


def test_planner_objective_checked():
    with pytest.raises(ValueError):
        Planner(make_devices(2), [make_pipeline(chain_model(3))], objective="speed")
    with pytest.raises(ValueError):
        Planner(make_devices(2), [make_pipeline(chain_model(3))], prioritization="random")


def test_select_baseline():
    planner = Planner(make_devices(2), [make_pipeline(chain_model(3))])
    for strategy in BASELINES:
        assert planner.select_baseline(strategy).strategy == strategy
    with pytest.raises(StrategyError) as excuse:
        planner.select_baseline("synergy")
    assert "Pick one of" in str(excuse)


def test_infeasible():
    pipelines = [make_pipeline(chain_model(3, name=f"m{i}"), f"p{i}") for i in (1, 2)]
    planner = Planner(make_devices(1, weight_capacity=500), pipelines)
    with pytest.raises(NoRunnablePlan):
        planner.select_progressive()
    with pytest.raises(NoRunnablePlan):
        planner.select_oracle()
    assert planner.select("indbest").status == "oor"


def test_compare(workload1):
    rows = compare(workload1.devices, workload1.pipelines, strategies=("synergy", "oracle", "indmodel"))
    statuses = {row.strategy: row.status for row in rows}
    assert statuses == {"synergy": "ok", "oracle": "budget", "indmodel": "oor"}
    assert all(row.ratio is None for row in rows)
    assert rows[0].estimate.throughput > 0
    assert rows[0].holistic.pipeline_ids == ["p1", "p2", "p3"]


def test_compare_keeps_going_after_strategy_errors(monkeypatch, workload1):
    select = Planner.select

    def failing(self, strategy="synergy", **kwargs):
        if strategy == "mindev":
            raise NoEligibleDevice("No device has a 'thermal' sensor.")
        if strategy == "maxdev":
            raise PlannerError("maxdev selected an out-of-resource plan")
        return select(self, strategy, **kwargs)

    monkeypatch.setattr(Planner, "select", failing)
    rows = compare(workload1.devices, workload1.pipelines, strategies=("mindev", "maxdev", "synergy"))
    assert [(row.strategy, row.status) for row in rows] == [
        ("mindev", "infeasible"),
        ("maxdev", "error"),
        ("synergy", "ok"),
    ]
    assert rows[1].estimate is None
    assert rows[1].holistic is None


def test_compare_prioritizations(workload2):
    rows = compare(
        workload2.devices,
        workload2.pipelines,
        strategies=("synergy", "indbest"),
        prioritizations=("data-intensity-desc", "sequential"),
        objectives=("throughput", "latency"),
    )
    # order-free strategies run once per objective
    assert [(r.strategy, r.prioritization, r.objective) for r in rows] == [
        ("synergy", "data-intensity-desc", "throughput"),
        ("synergy", "sequential", "throughput"),
        ("indbest", "-", "throughput"),
        ("synergy", "data-intensity-desc", "latency"),
        ("synergy", "sequential", "latency"),
        ("indbest", "-", "latency"),
    ]


def test_progressive_against_oracle_on_triples():
    fixture = load_fixture("pipelines8")
    rows = compare(fixture.devices, fixture.pipelines, strategies=("oracle", "synergy"), group_size=3)
    synergy = [row for row in rows if row.strategy == "synergy"]
    assert len(synergy) == math.comb(8, 3) == 56
    assert all(row.status == "ok" for row in rows)
    ratios = np.array([row.ratio for row in synergy])
    assert np.all(ratios <= 1.0 + 1e-9)
    assert ratios.mean() >= 0.90
    assert all(row.ratio == pytest.approx(1.0) for row in rows if row.strategy == "oracle")
