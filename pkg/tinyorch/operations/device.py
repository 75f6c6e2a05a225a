"""
Simulated wearable devices and their AI accelerators.

.. autosummary::

    ~ComputationUnitKind
    ~DeviceProfile
    ~LinearCost
    ~SensorSpec
    ~validate_device
    ~MAX78000_DEFAULTS
    ~MAX78002_DEFAULTS
"""

import dataclasses
import enum
import logging

import numpy as np

from ..units import to_canonical
from ..units import to_canonical_int
from .misc import InvalidProfile
from .misc import UnknownInterface
from .misc import UnknownSensor

logger = logging.getLogger(__name__)

DEFAULT_INTERACTION_LATENCY_NS = 1_000_000
"""Latency of an interaction task when the profile does not give one."""


class ComputationUnitKind(enum.Enum):
    """Independently schedulable hardware resource of a device."""

    CPU = "cpu"
    ACCELERATOR = "accel"
    RADIO = "radio"


@dataclasses.dataclass(frozen=True)
class LinearCost:
    """
    Memory-bus transfer latency as a linear function of the payload size.

    .. rubric:: Parameters

    * ``slope_ns_per_byte`` (float): Latency per byte, nanoseconds.
    * ``intercept_ns`` (int): Fixed latency per transfer, nanoseconds.

    .. autosummary::

        ~fit
        ~latency_ns
    """

    slope_ns_per_byte: float = 0.0
    intercept_ns: int = 0

    def latency_ns(self, nbytes: int) -> int:
        """Transfer latency of ``nbytes`` bytes, integer nanoseconds."""
        return int(round(self.slope_ns_per_byte * nbytes)) + self.intercept_ns

    @classmethod
    def fit(cls, sizes, latencies_ns):
        """
        Regress profiled (size, latency) samples with a least-squares line.

        Negative slope or intercept (from noisy samples) is clamped to zero.
        """
        sizes = np.asarray(sizes, dtype=float)
        latencies = np.asarray(latencies_ns, dtype=float)
        if sizes.size < 2 or sizes.shape != latencies.shape:
            raise ValueError("Need at least two (size, latency) samples of equal length.")
        if np.ptp(sizes) == 0:
            raise ValueError("Sample sizes must not all be equal.")
        slope, intercept = np.polyfit(sizes, latencies, 1)
        logger.debug("slope=%r intercept=%r", slope, intercept)
        return cls(max(0.0, float(slope)), max(0, int(round(intercept))))


@dataclasses.dataclass(frozen=True)
class SensorSpec:
    """A sensor and the latency of taking one sample."""

    sensor_type: str
    sample_bytes: int
    latency_ns: int

    def _asdict(self):
        return {"type": self.sensor_type, "sample_bytes": self.sample_bytes, "latency_ns": self.latency_ns}


@dataclasses.dataclass(frozen=True)
class DeviceProfile:
    """
    A simulated wearable with a tiny AI accelerator.

    .. rubric:: Parameters

    * ``id`` (str): Unique name of the device.
    * ``weight_capacity`` (int): Accelerator weight memory, bytes.
    * ``bias_capacity`` (int): Accelerator bias memory, bytes.
    * ``max_layers`` (int): Number of layers the accelerator can hold.
    * ``parallel_processors`` (int): Parallel convolution processors (P).
    * ``clock_hz`` (int): Accelerator clock frequency (F).
    * ``load_cost`` (LinearCost): Processor to accelerator transfer.
    * ``unload_cost`` (LinearCost): Accelerator to processor transfer.
    * ``radio_bandwidth_bps`` (int): Radio bandwidth, bits per second.
    * ``radio_overhead_ns`` (int): Fixed latency per radio transfer.
    * ``sensors`` (tuple): :class:`SensorSpec` objects.
    * ``interfaces`` (tuple): Interface type names (``haptic``, ...).
    * ``unit_power_w`` (dict): Power of each :class:`ComputationUnitKind`, watts.
    * ``radio_energy_nj_per_byte`` (float): Extra energy per transmitted byte.
    * ``interaction_latency_ns`` (int): Latency of an interaction task.

    .. autosummary::

        ~_asdict
        ~_fromdict
        ~has_interface
        ~sensor
    """

    id: str
    weight_capacity: int
    bias_capacity: int
    max_layers: int
    parallel_processors: int
    clock_hz: int
    load_cost: LinearCost = LinearCost()
    unload_cost: LinearCost = LinearCost()
    radio_bandwidth_bps: int = 1_000_000
    radio_overhead_ns: int = 0
    sensors: tuple = ()
    interfaces: tuple = ()
    unit_power_w: dict = dataclasses.field(default_factory=dict)
    radio_energy_nj_per_byte: float = 0.0
    interaction_latency_ns: int = DEFAULT_INTERACTION_LATENCY_NS

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(id={self.id!r})"

    @property
    def capacities(self):
        """(weight, bias, layers) capacities of the accelerator."""
        return (self.weight_capacity, self.bias_capacity, self.max_layers)

    def power_w(self, unit: ComputationUnitKind) -> float:
        """Power drawn by ``unit`` while busy, watts."""
        return self.unit_power_w.get(unit, 0.0)

    def sensor(self, sensor_type: str = None) -> SensorSpec:
        """
        Sensor used by a sensing task.

        Without ``sensor_type``, the first sensor (by type) of the device.
        """
        if sensor_type is None:
            if len(self.sensors) == 0:
                raise UnknownSensor(f"Device {self.id!r} has no sensors.")
            return sorted(self.sensors, key=lambda s: s.sensor_type)[0]
        for sensor in self.sensors:
            if sensor.sensor_type == sensor_type:
                return sensor
        raise UnknownSensor(
            f"Device {self.id!r} has no {sensor_type!r} sensor."
            f" Pick one of: {[s.sensor_type for s in self.sensors]!r}"
        )

    def has_sensor(self, sensor_type: str) -> bool:
        return sensor_type in [s.sensor_type for s in self.sensors]

    def has_interface(self, interface_type: str) -> bool:
        return interface_type in self.interfaces

    def check_interface(self, interface_type: str = None) -> None:
        """Raise UnknownInterface if ``interface_type`` is given but missing."""
        if interface_type is not None and not self.has_interface(interface_type):
            raise UnknownInterface(
                f"Device {self.id!r} has no {interface_type!r} interface."
                f" Pick one of: {list(self.interfaces)!r}"
            )

    def _asdict(self):
        """Return the profile as a dictionary with the JSON field names."""
        return {
            "id": self.id,
            "weight_capacity_bytes": self.weight_capacity,
            "bias_capacity_bytes": self.bias_capacity,
            "max_layers": self.max_layers,
            "parallel_processors": self.parallel_processors,
            "clock_hz": self.clock_hz,
            "load_slope_ns_per_byte": self.load_cost.slope_ns_per_byte,
            "load_intercept_ns": self.load_cost.intercept_ns,
            "unload_slope_ns_per_byte": self.unload_cost.slope_ns_per_byte,
            "unload_intercept_ns": self.unload_cost.intercept_ns,
            "radio_bandwidth_bps": self.radio_bandwidth_bps,
            "radio_overhead_ns": self.radio_overhead_ns,
            "unit_power_w": {k.value: v for k, v in self.unit_power_w.items()},
            "radio_energy_nj_per_byte": self.radio_energy_nj_per_byte,
            "sensors": [s._asdict() for s in self.sensors],
            "interfaces": list(self.interfaces),
            "interaction_latency_ns": self.interaction_latency_ns,
        }

    @classmethod
    def _fromdict(cls, config: dict):
        """Create a validated profile from a (JSON) dictionary."""

        def get(key, kind=None, integer=True, default=None):
            if key not in config:
                if default is not None:
                    return default
                raise InvalidProfile(key, "Missing key.")
            value = config[key]
            try:
                if kind is None:
                    return value
                if integer:
                    return to_canonical_int(value, kind)
                return float(to_canonical(value, kind))
            except ValueError as exc:
                raise InvalidProfile(key, str(exc)) from exc

        device_id = get("id")
        if not isinstance(device_id, str) or device_id == "":
            raise InvalidProfile("id", "Must be a nonempty text.")

        power = {}
        for key, watts in config.get("unit_power_w", {}).items():
            try:
                unit = ComputationUnitKind(key)
                power[unit] = float(to_canonical(watts, "power"))
            except ValueError as exc:
                raise InvalidProfile("unit_power_w", str(exc)) from exc

        sensors = []
        for entry in config.get("sensors", []):
            try:
                sensors.append(
                    SensorSpec(
                        sensor_type=entry["type"],
                        sample_bytes=to_canonical_int(entry["sample_bytes"], "bytes"),
                        latency_ns=to_canonical_int(entry["latency_ns"], "duration"),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise InvalidProfile("sensors", f"Bad sensor {entry!r}: {exc}") from exc

        interfaces = config.get("interfaces", [])
        if not isinstance(interfaces, list) or not all(isinstance(t, str) and t for t in interfaces):
            raise InvalidProfile("interfaces", "Must be a list of interface names.")

        profile = cls(
            id=device_id,
            weight_capacity=get("weight_capacity_bytes", "bytes"),
            bias_capacity=get("bias_capacity_bytes", "bytes"),
            max_layers=_count(config, "max_layers"),
            parallel_processors=_count(config, "parallel_processors"),
            clock_hz=get("clock_hz", "frequency"),
            load_cost=LinearCost(
                get("load_slope_ns_per_byte", "slope", integer=False),
                get("load_intercept_ns", "duration"),
            ),
            unload_cost=LinearCost(
                get("unload_slope_ns_per_byte", "slope", integer=False),
                get("unload_intercept_ns", "duration"),
            ),
            radio_bandwidth_bps=get("radio_bandwidth_bps", "bandwidth"),
            radio_overhead_ns=get("radio_overhead_ns", "duration"),
            sensors=tuple(sensors),
            interfaces=tuple(interfaces),
            unit_power_w=power,
            radio_energy_nj_per_byte=get(
                "radio_energy_nj_per_byte", "energy_per_byte", integer=False, default=0.0
            ),
            interaction_latency_ns=get(
                "interaction_latency_ns", "duration", default=DEFAULT_INTERACTION_LATENCY_NS
            ),
        )
        return validate_device(profile)


def _count(config, key):
    """Integer count field of a device profile."""
    if key not in config:
        raise InvalidProfile(key, "Missing key.")
    value = config[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise InvalidProfile(key, f"Must be an integer, received {value!r}.")
    return value


def validate_device(profile: DeviceProfile) -> DeviceProfile:
    """
    Return ``profile`` if all invariants hold.

    Raises :class:`~tinyorch.operations.misc.InvalidProfile` naming the
    first violated field.
    """
    # fmt: off
    checks = [
        ("weight_capacity_bytes", profile.weight_capacity > 0),
        ("bias_capacity_bytes", profile.bias_capacity > 0),
        ("max_layers", profile.max_layers >= 1),
        ("parallel_processors", profile.parallel_processors >= 1),
        ("clock_hz", profile.clock_hz > 0),
        ("radio_bandwidth_bps", profile.radio_bandwidth_bps > 0),
        ("radio_overhead_ns", profile.radio_overhead_ns >= 0),
        ("load_slope_ns_per_byte", profile.load_cost.slope_ns_per_byte >= 0),
        ("load_intercept_ns", profile.load_cost.intercept_ns >= 0),
        ("unload_slope_ns_per_byte", profile.unload_cost.slope_ns_per_byte >= 0),
        ("unload_intercept_ns", profile.unload_cost.intercept_ns >= 0),
        ("unit_power_w", all(w >= 0 for w in profile.unit_power_w.values())),
        ("radio_energy_nj_per_byte", profile.radio_energy_nj_per_byte >= 0),
        ("sensors", all(s.sample_bytes > 0 and s.latency_ns >= 0 for s in profile.sensors)),
        ("interaction_latency_ns", profile.interaction_latency_ns >= 0),
    ]
    # fmt: on
    for field, ok in checks:
        if not ok:
            raise InvalidProfile(field, f"Device {profile.id!r}.")
    logger.debug("valid device %r", profile.id)
    return profile


MAX78000_DEFAULTS = dict(
    weight_capacity=442_000,
    bias_capacity=2_000,
    max_layers=32,
    parallel_processors=64,
    clock_hz=50_000_000,
    load_cost=LinearCost(40, 20_000),
    unload_cost=LinearCost(40, 20_000),
    radio_bandwidth_bps=1_000_000,
    radio_overhead_ns=0,
    unit_power_w={
        ComputationUnitKind.CPU: 0.012,
        ComputationUnitKind.ACCELERATOR: 0.02,
        ComputationUnitKind.RADIO: 0.25,
    },
    radio_energy_nj_per_byte=50.0,
)
"""Profile defaults of a MAX78000-class device."""

MAX78002_DEFAULTS = dict(MAX78000_DEFAULTS, weight_capacity=2_000_000, bias_capacity=8_000, max_layers=128)
"""Profile defaults of a MAX78002-class device."""
