"""
Cost tables over every execution plan of one pipeline.

A :class:`CandidateTable` holds, in enumeration order, the end-to-end
latency, energy, model-path latency, transferred bytes, chunk count and
accelerator usage of every plan that :func:`~tinyorch.enumeration.enumerate_execution_plans`
yields.  Plan selection works on these arrays; :class:`~tinyorch.operations.plan.ExecutionPlan`
objects are built only for the rows that get selected.

Rows are grouped in *cores*: one core per (device sequence, split points).
Each core covers ``S * T`` consecutive rows, one per (source, target) pair,
so ``row = (core * S + source) * T + target``.

.. autosummary::

    ~CandidateTable
"""

import functools
import itertools
import logging

import numpy as np

from .cost_model import comm_latency
from .cost_model import cycles_accelerated
from .cost_model import energy_nj
from .enumeration import EnumerationConfig
from .enumeration import _endpoints
from .enumeration import sorted_devices
from .operations.device import ComputationUnitKind
from .operations.misc import NS_PER_S
from .operations.misc import ConfigurationError
from .operations.plan import Chunk
from .operations.plan import ExecutionPlan

logger = logging.getLogger(__name__)

CPU = ComputationUnitKind.CPU
ACCEL = ComputationUnitKind.ACCELERATOR
RADIO = ComputationUnitKind.RADIO


def _rint(values) -> np.ndarray:
    """Round half to even, as the builtin ``round()`` does."""
    return np.rint(values).astype(np.int64)


class _DeviceCosts:
    """Per-layer-index cost vectors of one pipeline's model on one device."""

    def __init__(self, model, device):
        L = model.num_layers
        into = [model.bytes_into(i) for i in range(L + 1)]
        cycles = [cycles_accelerated(layer, device.parallel_processors) for layer in model.layers]
        self.clock_hz = device.clock_hz
        self.cycles = np.array([0, *itertools.accumulate(cycles)], dtype=np.int64)
        # memory transfers: load of the data into layer i, unload of the output of layer i
        self.load_ns = np.array([device.load_cost.latency_ns(into[i]) for i in range(L)], dtype=np.int64)
        self.unload_ns = np.array([device.unload_cost.latency_ns(into[i + 1]) for i in range(L)], dtype=np.int64)
        cpu = device.power_w(CPU)
        self.load_nj = np.array([energy_nj(cpu, t) for t in self.load_ns.tolist()], dtype=np.int64)
        self.unload_nj = np.array([energy_nj(cpu, t) for t in self.unload_ns.tolist()], dtype=np.int64)
        # radio sends of the data into layer i (i == L is the model output)
        self.comm_ns = np.array([comm_latency(into[i], device) for i in range(L + 1)], dtype=np.int64)
        self.tx_nj = np.array(
            [
                energy_nj(device.power_w(RADIO), t) + int(round(device.radio_energy_nj_per_byte * n))
                for t, n in zip(self.comm_ns.tolist(), into)
            ],
            dtype=np.int64,
        )
        self.accel_w = device.power_w(ACCEL)
        self.radio_w = device.power_w(RADIO)
        self.cpu_w = cpu

    def inference_ns(self, start, stop):
        cycles = self.cycles[stop] - self.cycles[start]
        return (2 * cycles * NS_PER_S + self.clock_hz) // (2 * self.clock_hz)


class CandidateTable:
    """
    Latency, energy and usage of every execution plan of one pipeline.

    .. rubric:: Parameters

    * ``pipeline`` (PipelineSpec): The pipeline.
    * ``devices`` ([DeviceProfile]): Available devices (any order).
    * ``config`` (EnumerationConfig): Same meaning as for enumeration.

    .. rubric:: Row arrays (length ``len(table)``)

    * ``latency_ns``: end-to-end chain latency (longest path of the plan alone)
    * ``energy_nj``: energy of one execution of the plan
    * ``model_latency_ns``: chunks plus transfers between chunks only
    * ``transfer_bytes``: bytes sent over radios
    * ``n_chunks``: number of model chunks
    * ``capacity_sum``: summed weight capacity of the chunk devices

    .. autosummary::

        ~core_of
        ~plan
        ~plans
        ~runnable
        ~usage
    """

    def __init__(self, pipeline, devices, config: EnumerationConfig = None):
        self.pipeline = pipeline
        self.config = config or EnumerationConfig()
        self.devices = sorted_devices(devices)
        if len(self.devices) == 0:
            raise ConfigurationError("Need at least one device.")
        sources, targets = _endpoints(pipeline, self.devices, self.config)
        position = {d.id: i for i, d in enumerate(self.devices)}
        self.source_ids = [d.id for d in sources]
        self.target_ids = [d.id for d in targets]
        self._src = np.array([position[i] for i in self.source_ids], dtype=np.int64)
        self._tgt = np.array([position[i] for i in self.target_ids], dtype=np.int64)
        self.capacities = np.array([d.capacities for d in self.devices], dtype=np.int64)
        self._build(sources, targets)

    def __len__(self) -> int:
        return self.num_cores * self.mappings

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(pipeline={self.pipeline.id!r}, rows={len(self)})"

    @property
    def mappings(self) -> int:
        """Number of (source, target) pairs per core."""
        return len(self.source_ids) * len(self.target_ids)

    def _build(self, sources, targets):
        model = self.pipeline.model
        L = model.num_layers
        D = len(self.devices)
        costs = [_DeviceCosts(model, d) for d in self.devices]
        weights, biases = (np.array(p, dtype=np.int64) for p in model._prefix)
        out_bytes = model.layers[-1].out_bytes
        into = np.array([model.bytes_into(i) for i in range(L + 1)], dtype=np.int64)

        blocks, latency, energy, transfer, usage = [], [], [], [], []
        first, last = [], []
        n_cores = 0
        for d in range(1, self.config.chunk_limit(D) + 1):
            cuts = np.array(list(itertools.combinations(range(1, L), d - 1)), dtype=np.int64)
            if cuts.size == 0 and d > 1:
                continue  # more chunks than layers
            m = max(len(cuts), 1)
            cuts = cuts.reshape(m, d - 1)
            bounds = np.hstack(
                [np.zeros((m, 1), dtype=np.int64), cuts, np.full((m, 1), L, dtype=np.int64)]
            )
            for sequence in itertools.permutations(range(D), d):
                block_lat = np.zeros(m, dtype=np.int64)
                block_nj = np.zeros(m, dtype=np.int64)
                block_bytes = np.zeros(m, dtype=np.int64)
                block_usage = np.zeros((m, D, 3), dtype=np.int64)
                for j, dev in enumerate(sequence):
                    c = costs[dev]
                    start, stop = bounds[:, j], bounds[:, j + 1]
                    inference = c.inference_ns(start, stop)
                    block_lat += c.load_ns[start] + inference + c.unload_ns[stop - 1]
                    block_nj += c.load_nj[start] + _rint(c.accel_w * inference) + c.unload_nj[stop - 1]
                    block_usage[:, dev, 0] = weights[stop] - weights[start]
                    block_usage[:, dev, 1] = biases[stop] - biases[start]
                    block_usage[:, dev, 2] = stop - start
                    if j > 0:
                        sender = costs[sequence[j - 1]]
                        link = sender.comm_ns[start]
                        block_lat += link
                        block_nj += sender.tx_nj[start] + _rint(c.radio_w * link)
                        block_bytes += into[start]
                blocks.append((n_cores, sequence, cuts))
                latency.append(block_lat)
                energy.append(block_nj)
                transfer.append(block_bytes)
                usage.append(block_usage)
                first.append(np.full(m, sequence[0], dtype=np.int64))
                last.append(np.full(m, sequence[-1], dtype=np.int64))
                n_cores += m

        self.num_cores = n_cores
        self._blocks = blocks
        self._block_starts = np.array([b[0] for b in blocks], dtype=np.int64)
        core_lat = np.concatenate(latency)
        core_nj = np.concatenate(energy)
        core_bytes = np.concatenate(transfer)
        self.core_usage = np.concatenate(usage)
        first = np.concatenate(first)
        last = np.concatenate(last)
        self.core_chunks = np.concatenate([np.full(len(b[2]), len(b[1]), dtype=np.int64) for b in blocks])
        weight_caps = self.capacities[:, 0]
        self.core_capacity_sum = np.concatenate(
            [np.full(len(b[2]), weight_caps[list(b[1])].sum(), dtype=np.int64) for b in blocks]
        )

        # source hop: sensing on s, then a transfer to the first chunk device unless s hosts it
        sense_ns, sense_nj = [], []
        for device in sources:
            sensor = device.sensor(self.pipeline.source.sensor_type)
            sense_ns.append(sensor.latency_ns)
            sense_nj.append(energy_nj(device.power_w(CPU), sensor.latency_ns))
        sense_ns = np.array(sense_ns, dtype=np.int64)
        sense_nj = np.array(sense_nj, dtype=np.int64)
        radio_w = np.array([c.radio_w for c in costs])
        src_comm = np.array([costs[s].comm_ns[0] for s in self._src], dtype=np.int64)
        src_tx = np.array([costs[s].tx_nj[0] for s in self._src], dtype=np.int64)
        hop = self._src[None, :] != first[:, None]
        src_lat = sense_ns[None, :] + np.where(hop, src_comm[None, :], 0)
        src_nj = sense_nj[None, :] + np.where(
            hop, src_tx[None, :] + _rint(radio_w[first][:, None] * src_comm[None, :]), 0
        )
        src_bytes = np.where(hop, model.input_bytes, 0)

        # target hop: a transfer from the last chunk device unless t hosts it, then interaction
        act_ns, act_nj = [], []
        for device in targets:
            device.check_interface(self.pipeline.target.interface_type)
            act_ns.append(device.interaction_latency_ns)
            act_nj.append(energy_nj(device.power_w(CPU), device.interaction_latency_ns))
        act_ns = np.array(act_ns, dtype=np.int64)
        act_nj = np.array(act_nj, dtype=np.int64)
        out_comm = np.array([c.comm_ns[L] for c in costs], dtype=np.int64)
        out_tx = np.array([c.tx_nj[L] for c in costs], dtype=np.int64)
        hop = self._tgt[None, :] != last[:, None]
        tgt_lat = act_ns[None, :] + np.where(hop, out_comm[last][:, None], 0)
        tgt_nj = act_nj[None, :] + np.where(
            hop, out_tx[last][:, None] + _rint(radio_w[self._tgt][None, :] * out_comm[last][:, None]), 0
        )
        tgt_bytes = np.where(hop, out_bytes, 0)

        def rows(core, src, tgt):
            return (core[:, None, None] + src[:, :, None] + tgt[:, None, :]).reshape(-1)

        self.latency_ns = rows(core_lat, src_lat, tgt_lat)
        self.energy_nj = rows(core_nj, src_nj, tgt_nj)
        self.transfer_bytes = rows(core_bytes, src_bytes, tgt_bytes)
        self.model_latency_ns = np.repeat(core_lat, self.mappings)
        self.n_chunks = np.repeat(self.core_chunks, self.mappings)
        self.capacity_sum = np.repeat(self.core_capacity_sum, self.mappings)
        logger.debug("%r cores=%d mappings=%d", self, self.num_cores, self.mappings)

    def core_of(self, rows):
        """Core index of each row."""
        return np.asarray(rows) // self.mappings

    def usage(self, rows) -> np.ndarray:
        """Accelerator usage ``(rows, devices, [weight, bias, layers])``."""
        return self.core_usage[self.core_of(rows)]

    @functools.cached_property
    def alone(self) -> np.ndarray:
        """Rows whose plan fits the accelerators with no other pipeline placed."""
        return self.runnable()

    def runnable(self, occupied=None) -> np.ndarray:
        """
        Boolean row mask: plan fits on top of ``occupied`` usage.

        ``occupied`` is an array ``(devices, 3)`` of usage already placed.
        """
        free = self.capacities if occupied is None else self.capacities - occupied
        fits = np.all(self.core_usage <= free[None, :, :], axis=(1, 2))
        return np.repeat(fits, self.mappings)

    def decode(self, row: int):
        """(device sequence, cuts, source id, target id) of ``row``."""
        if not 0 <= row < len(self):
            raise IndexError(f"Row {row} outside [0, {len(self)}).")
        core, mapping = divmod(int(row), self.mappings)
        s, t = divmod(mapping, len(self.target_ids))
        b = int(np.searchsorted(self._block_starts, core, side="right")) - 1
        offset, sequence, cuts = self._blocks[b]
        ids = [self.devices[i].id for i in sequence]
        return ids, [int(c) for c in cuts[core - offset]], self.source_ids[s], self.target_ids[t]

    def plan(self, row: int) -> ExecutionPlan:
        """The :class:`ExecutionPlan` of ``row``, with ``index=row``."""
        ids, cuts, source, target = self.decode(row)
        bounds = (0, *cuts, self.pipeline.model.num_layers)
        chunks = [Chunk(dev, a, b) for dev, (a, b) in zip(ids, itertools.pairwise(bounds))]
        return ExecutionPlan(self.pipeline, source, chunks, target, int(row))

    def plans(self, rows=None):
        """Yield plans for ``rows`` (default: all rows, in order)."""
        rows = range(len(self)) if rows is None else rows
        for row in rows:
            yield self.plan(row)
