"""
Latency and energy of every task kind.

Clock cycles are exact integers.  Latencies are integer nanoseconds and
energies integer nanojoules, so sums do not depend on evaluation order.

.. autosummary::

    ~accel_latency
    ~comm_latency
    ~cycles_accelerated
    ~cycles_sequential
    ~inference_latency
    ~memory_latency
    ~task_cost
    ~TaskCost
    ~UNIT_OF_TASK
"""

import logging
import typing

from .operations.device import ComputationUnitKind
from .operations.device import DeviceProfile
from .operations.device import LinearCost
from .operations.misc import NS_PER_S
from .operations.misc import ConfigurationError
from .operations.model import LayerKind
from .operations.model import LayerSpec
from .operations.plan import TaskKind

logger = logging.getLogger(__name__)

UNIT_OF_TASK = {
    TaskKind.SENSING: ComputationUnitKind.CPU,
    TaskKind.LOAD: ComputationUnitKind.CPU,
    TaskKind.INFERENCE: ComputationUnitKind.ACCELERATOR,
    TaskKind.UNLOAD: ComputationUnitKind.CPU,
    TaskKind.TX: ComputationUnitKind.RADIO,
    TaskKind.RX: ComputationUnitKind.RADIO,
    TaskKind.INTERACTION: ComputationUnitKind.CPU,
}
"""Computation unit occupied by each task kind."""


class TaskCost(typing.NamedTuple):
    """Latency (ns) and energy (nJ) of one task on its computation unit."""

    latency_ns: int
    energy_nj: int
    unit: ComputationUnitKind

    @property
    def latency(self) -> float:
        """Latency, seconds."""
        return self.latency_ns / NS_PER_S

    @property
    def energy(self) -> float:
        """Energy, joules."""
        return self.energy_nj / NS_PER_S


def cycles_sequential(layer: LayerSpec) -> int:
    """Clock cycles of ``layer`` on a sequential processor."""
    h_in, w_in, c_in = layer.in_shape
    _h_out, w_out, c_out = layer.out_shape
    if layer.kind == LayerKind.FC:
        return h_in * w_in * c_in * c_out
    if layer.kind == LayerKind.CONV:
        return layer.k**2 * h_in * w_out * c_in * c_out
    return 0


def cycles_accelerated(layer: LayerSpec, P: int) -> int:
    """
    Clock cycles of ``layer`` on an accelerator with ``P`` parallel processors.

    Input channels are spread over the processors and a convolution engine
    handles one kernel window per clock cycle.
    """
    if P < 1:
        raise ValueError(f"Need at least one parallel processor, received {P=}.")
    h_in, w_in, c_in = layer.in_shape
    _h_out, w_out, c_out = layer.out_shape
    if layer.kind == LayerKind.FC:
        return h_in * w_in * -(-c_in // P) * c_out
    if layer.kind == LayerKind.CONV:
        return h_in * w_out * -(-c_in // P) * c_out
    return 0


def cycles_to_ns(cycles: int, clock_hz: int) -> int:
    """
    Duration of ``cycles`` clock cycles, rounded to the nearest nanosecond.

    Rounding happens once, on the total.  When ``clock_hz`` does not divide
    1e9 the result is not linear in ``cycles``: at 60 MHz one cycle gives
    17 ns but two give 33 ns.
    """
    return (2 * cycles * NS_PER_S + clock_hz) // (2 * clock_hz)


def inference_latency(layers, device: DeviceProfile) -> int:
    """
    Latency (ns) of running ``layers`` (nonempty) on the accelerator of ``device``.

    The cycles of all layers are summed before one conversion to nanoseconds,
    so a chunk rounds once, not once per layer.
    """
    layers = list(layers)
    if len(layers) == 0:
        raise ValueError("Need at least one layer.")
    cycles = sum(cycles_accelerated(layer, device.parallel_processors) for layer in layers)
    return cycles_to_ns(cycles, device.clock_hz)


def memory_latency(nbytes: int, cost: LinearCost) -> int:
    """Latency (ns) of moving ``nbytes`` between processor and accelerator."""
    if nbytes < 0:
        raise ValueError(f"Byte count must not be negative, received {nbytes=}.")
    return cost.latency_ns(nbytes)


def accel_latency(model, start: int, stop: int, device: DeviceProfile) -> int:
    """
    Latency (ns) of layers ``[start, stop)`` of ``model`` on ``device``.

    Load of the chunk input, inference, and unload of the chunk output.
    """
    in_bytes = model.bytes_into(start)
    out_bytes = model.layers[stop - 1].out_bytes
    return (
        memory_latency(in_bytes, device.load_cost)
        + inference_latency(model.layers[start:stop], device)
        + memory_latency(out_bytes, device.unload_cost)
    )


def comm_latency(nbytes: int, sender: DeviceProfile) -> int:
    """Latency (ns) of sending ``nbytes`` over the radio of ``sender``."""
    if nbytes < 0:
        raise ValueError(f"Byte count must not be negative, received {nbytes=}.")
    bandwidth = sender.radio_bandwidth_bps
    variable = (2 * 8 * nbytes * NS_PER_S + bandwidth) // (2 * bandwidth)
    return variable + sender.radio_overhead_ns


def energy_nj(power_w: float, latency_ns: int) -> int:
    """Energy (nJ) drawn at ``power_w`` watts for ``latency_ns`` nanoseconds."""
    return int(round(power_w * latency_ns))


def _device_map(devices) -> dict:
    if isinstance(devices, dict):
        return devices
    return {d.id: d for d in devices}


def task_cost(task, plan, devices) -> TaskCost:
    """
    Latency and energy of ``task``, a member of ``plan``'s task chain.

    .. rubric:: Parameters

    * ``task`` (Task): The task.
    * ``plan`` (ExecutionPlan): Supplies the model and the requirement tags.
    * ``devices`` (dict or list): :class:`DeviceProfile` objects (by id).

    Raises UnknownSensor or UnknownInterface when the device cannot serve
    the pipeline's source or target requirement.
    """
    devices = _device_map(devices)
    if task.device not in devices:
        raise ConfigurationError(f"Device {task.device!r} unknown. Pick one of: {sorted(devices)!r}")
    device = devices[task.device]
    unit = UNIT_OF_TASK[task.kind]

    if task.kind == TaskKind.SENSING:
        latency = device.sensor(plan.pipeline.source.sensor_type).latency_ns
    elif task.kind == TaskKind.LOAD:
        latency = memory_latency(task.payload_bytes, device.load_cost)
    elif task.kind == TaskKind.INFERENCE:
        latency = inference_latency(plan.model.layers[task.layers.start : task.layers.stop], device)
    elif task.kind == TaskKind.UNLOAD:
        latency = memory_latency(task.payload_bytes, device.unload_cost)
    elif task.kind == TaskKind.TX:
        latency = comm_latency(task.payload_bytes, device)
    elif task.kind == TaskKind.RX:
        latency = comm_latency(task.payload_bytes, devices[task.peer])
    else:
        device.check_interface(plan.pipeline.target.interface_type)
        latency = device.interaction_latency_ns

    energy = energy_nj(device.power_w(unit), latency)
    if task.kind == TaskKind.TX:
        energy += int(round(device.radio_energy_nj_per_byte * task.payload_bytes))
    return TaskCost(latency, energy, unit)
