import numpy as np
import pytest

from ..candidates import CandidateTable
from ..enumeration import EnumerationConfig
from ..enumeration import enumerate_execution_plans
from ..estimate import estimate
from ..operations.constraints import is_runnable
from ..operations.misc import ConfigurationError
from ..operations.plan import HolisticPlan
from .common import chain_model
from .common import make_device
from .common import make_pipeline


@pytest.fixture
def mixed_devices():
    """Three devices that differ in clock, radio and memory bus."""
    yield [
        make_device("d0"),
        make_device("d1", clock_hz=100_000_000, parallel_processors=16),
        make_device("d2", radio_bandwidth_bps=2_000_000, radio_overhead_ns=1_000),
    ]


def test_rows_match_enumeration(mixed_devices):
    pipeline = make_pipeline(chain_model(6))
    table = CandidateTable(pipeline, mixed_devices)
    plans = list(enumerate_execution_plans(pipeline, mixed_devices))
    assert len(table) == len(plans) == (3 + 6 * 5 + 6 * 10) * 9
    assert table.mappings == 9

    for row, expected in enumerate(plans):
        plan = table.plan(row)
        assert plan.index == row
        assert plan.key == expected.key, f"{row=}"
        result = estimate(HolisticPlan([plan]), mixed_devices)
        assert table.latency_ns[row] == result.latency_ns, f"{row=} {plan=}"
        assert table.energy_nj[row] == result.energy_nj, f"{row=} {plan=}"
        assert table.transfer_bytes[row] == plan.transfer_bytes(), f"{row=}"
        assert table.n_chunks[row] == len(plan.chunks)
        usage = plan.footprints()
        for position, device in enumerate(table.devices):
            assert tuple(table.usage([row])[0, position]) == tuple(usage.get(device.id, (0, 0, 0)))


def test_model_latency(small):
    pipeline, devices = small
    table = CandidateTable(pipeline, devices)
    # same core, different (source, target): same model latency
    assert np.all(np.ptp(table.model_latency_ns.reshape(-1, table.mappings), axis=1) == 0)
    assert np.all(table.model_latency_ns < table.latency_ns)
    assert np.all(table.core_of(range(9)) == 0)
    # whole model on d0, sensing and interaction on d0: nothing sent
    assert table.transfer_bytes[0] == 0
    assert table.plan(0).devices == ("d0",)


def test_capacity_sum(small):
    pipeline, devices = small
    table = CandidateTable(pipeline, devices)
    assert set(np.unique(table.capacity_sum).tolist()) == {442_000, 2 * 442_000, 3 * 442_000}
    assert np.all(table.capacity_sum == table.n_chunks * 442_000)


def test_decode_out_of_range(small):
    table = CandidateTable(*small)
    for row in (-1, len(table)):
        with pytest.raises(IndexError):
            table.plan(row)


def test_respect_requirements():
    devices = [make_device("a"), make_device("b", sensors=()), make_device("c", interfaces=())]
    pipeline = make_pipeline(chain_model(4))
    table = CandidateTable(pipeline, devices, EnumerationConfig(respect_requirements=True))
    assert table.source_ids == ["a", "c"]
    assert table.target_ids == ["a", "b"]
    assert table.mappings == 4
    plans = list(enumerate_execution_plans(pipeline, devices, EnumerationConfig(respect_requirements=True)))
    assert [p.key for p in table.plans()] == [p.key for p in plans]


def test_no_devices():
    with pytest.raises(ConfigurationError):
        CandidateTable(make_pipeline(chain_model(4)), [])


def test_runnable_mask_matches_capacity_check():
    # ten layers of 144 weight bytes: at most six layers fit a device
    devices = [make_device(f"d{i}", weight_capacity=1_000, max_layers=8) for i in range(3)]
    first = make_pipeline(chain_model(10, name="first"), "p1")
    second = make_pipeline(chain_model(7, name="second"), "p2")
    table = CandidateTable(second, devices)
    other = CandidateTable(first, devices)

    rng = np.random.default_rng(7)
    placed = rng.choice(np.flatnonzero(other.alone), size=25, replace=False)
    for row in placed.tolist():
        holder = other.plan(row)
        occupied = other.usage([row])[0]
        mask = table.runnable(occupied)
        sample = rng.choice(len(table), size=200, replace=False)
        for candidate in sample.tolist():
            holistic = HolisticPlan([holder, table.plan(candidate)])
            assert mask[candidate] == bool(is_runnable(holistic, devices)), f"{holder=} {candidate=}"

    alone = table.alone
    for candidate in range(0, len(table), 7):
        assert alone[candidate] == bool(is_runnable(HolisticPlan([table.plan(candidate)]), devices))


def test_random_holistic_plans(workload1):
    from ..planner import Planner

    planner = Planner(workload1.devices, workload1.pipelines)
    tables = list(planner.tables.values())
    capacity = {d.id: d.capacities for d in workload1.devices}
    rng = np.random.default_rng(10_000)
    runnable = 0
    for _ in range(10_000):
        rows = [int(rng.integers(len(t))) for t in tables]
        holistic = HolisticPlan(t.plan(r) for t, r in zip(tables, rows))

        totals = {}
        for plan in holistic:
            for chunk in plan.chunks:
                layers = plan.model.layers[chunk.start : chunk.stop]
                used = totals.setdefault(chunk.device, [0, 0, 0])
                used[0] += sum(layer.weight_bytes for layer in layers)
                used[1] += sum(layer.bias_bytes for layer in layers)
                used[2] += len(layers)
        expected = all(u <= c for device, used in totals.items() for u, c in zip(used, capacity[device]))

        occupied = sum(t.usage([r])[0] for t, r in zip(tables[:-1], rows[:-1]))
        assert bool(is_runnable(holistic, workload1.devices)) == expected, f"{rows=}"
        assert bool(tables[-1].runnable(occupied)[rows[-1]]) == expected, f"{rows=}"
        runnable += expected
    assert 0 < runnable < 10_000
