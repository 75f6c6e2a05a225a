"""
Execution plans: task-to-device assignments of pipelines.

An :class:`ExecutionPlan` places one pipeline: its sensing task, the chunks
of its split model (each on a distinct device), and its interaction task.
A :class:`HolisticPlan` combines one execution plan per concurrent pipeline.

.. autosummary::

    ~Chunk
    ~ExecutionPlan
    ~HolisticPlan
    ~Task
    ~TaskKind
"""

import enum
import functools
import logging
import typing

from .misc import ConfigurationError
from .misc import InvalidCut
from .model import Footprint
from .model import LayerRange
from .pipeline import PipelineSpec

logger = logging.getLogger(__name__)


class TaskKind(enum.Enum):
    """The seven kinds of tasks in a pipeline."""

    SENSING = "sensing"
    LOAD = "load"
    INFERENCE = "inference"
    UNLOAD = "unload"
    TX = "tx"
    RX = "rx"
    INTERACTION = "interaction"


class Task(typing.NamedTuple):
    """
    One task of an execution plan.

    ``layers`` is the chunk a Load, Inference or Unload task works on.
    ``peer`` is the destination of a Tx or the origin of an Rx.
    """

    kind: TaskKind
    device: str
    payload_bytes: int
    layers: typing.Optional[LayerRange] = None
    peer: typing.Optional[str] = None

    def describe(self):
        config = {"kind": self.kind.value, "device": self.device, "payload_bytes": self.payload_bytes}
        if self.layers is not None:
            config["layers"] = list(self.layers)
        if self.peer is not None:
            config["peer"] = self.peer
        return config


class Chunk(typing.NamedTuple):
    """Contiguous layers ``[start, stop)`` of a model placed on one device."""

    device: str
    start: int
    stop: int

    @property
    def layers(self):
        return LayerRange(self.start, self.stop)


class ExecutionPlan:
    """
    Placement of one pipeline on the devices.

    .. rubric:: Parameters

    * ``pipeline`` (PipelineSpec): The pipeline placed by this plan.
    * ``source`` (str): Device running the sensing task.
    * ``chunks`` ([Chunk]): Model chunks, in layer order.
    * ``target`` (str): Device running the interaction task.
    * ``index`` (int): Position in the enumeration order (optional).

    .. autosummary::

        ~_asdict
        ~_fromdict
        ~footprints
        ~predecessors
        ~tasks
        ~transfer_bytes
    """

    def __init__(self, pipeline: PipelineSpec, source: str, chunks, target: str, index: int = None):
        self.pipeline = pipeline
        self.source = source
        self.chunks = tuple(Chunk(*c) for c in chunks)
        self.target = target
        self.index = index
        self._validate()

    def __repr__(self) -> str:
        chunks = ", ".join(f"{c.device}[{c.start}:{c.stop})" for c in self.chunks)
        return (
            f"{self.__class__.__name__}(pipeline={self.pipeline_id!r},"
            f" source={self.source!r}, chunks=[{chunks}], target={self.target!r},"
            f" index={self.index!r})"
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExecutionPlan):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    @property
    def key(self):
        """Identity of the placement (enumeration index excluded)."""
        return (self.pipeline_id, self.source, self.chunks, self.target)

    @property
    def pipeline_id(self) -> str:
        return self.pipeline.id

    @property
    def model(self):
        return self.pipeline.model

    @property
    def devices(self) -> tuple:
        """Devices of the model chunks, in layer order."""
        return tuple(c.device for c in self.chunks)

    def _validate(self):
        L = self.model.num_layers
        if len(self.chunks) == 0:
            raise InvalidCut(f"Pipeline {self.pipeline_id!r}: plan has no model chunks.")
        position = 0
        for chunk in self.chunks:
            if chunk.start != position or chunk.stop <= chunk.start:
                raise InvalidCut(
                    f"Pipeline {self.pipeline_id!r}: chunks {self.chunks!r} do not partition [0, {L})."
                )
            position = chunk.stop
        if position != L:
            raise InvalidCut(f"Pipeline {self.pipeline_id!r}: chunks {self.chunks!r} do not partition [0, {L}).")
        if len(set(self.devices)) != len(self.chunks):
            raise InvalidCut(f"Pipeline {self.pipeline_id!r}: a device hosts more than one chunk.")

    @functools.cached_property
    def tasks(self) -> tuple:
        """
        The canonical task chain of this plan.

        Sensing, then per chunk Load, Inference and Unload, then
        Interaction.  A Tx/Rx pair bridges every change of device.
        """
        model = self.model
        tasks = [Task(TaskKind.SENSING, self.source, model.input_bytes)]

        def bridge(sender, receiver, nbytes):
            if sender != receiver:
                tasks.append(Task(TaskKind.TX, sender, nbytes, peer=receiver))
                tasks.append(Task(TaskKind.RX, receiver, nbytes, peer=sender))

        previous = self.source
        for chunk in self.chunks:
            in_bytes = model.bytes_into(chunk.start)
            out_bytes = model.layers[chunk.stop - 1].out_bytes
            bridge(previous, chunk.device, in_bytes)
            tasks.append(Task(TaskKind.LOAD, chunk.device, in_bytes, chunk.layers))
            tasks.append(Task(TaskKind.INFERENCE, chunk.device, out_bytes, chunk.layers))
            tasks.append(Task(TaskKind.UNLOAD, chunk.device, out_bytes, chunk.layers))
            previous = chunk.device
        output_bytes = model.layers[-1].out_bytes
        bridge(previous, self.target, output_bytes)
        tasks.append(Task(TaskKind.INTERACTION, self.target, output_bytes))
        return tuple(tasks)

    @functools.cached_property
    def predecessors(self) -> tuple:
        """
        Within-run predecessors of each task (by task index).

        An Rx shares the predecessor of its Tx; the task after a transfer
        waits for both Tx and Rx.
        """
        preds = []
        for i, task in enumerate(self.tasks):
            if i == 0:
                preds.append(())
            elif task.kind == TaskKind.RX:
                preds.append(preds[i - 1])
            elif self.tasks[i - 1].kind == TaskKind.RX:
                preds.append((i - 2, i - 1))
            else:
                preds.append((i - 1,))
        return tuple(preds)

    def footprints(self) -> dict:
        """Accelerator memory used on each chunk device."""
        return {c.device: self.model.footprint(c.start, c.stop) for c in self.chunks}

    def transfer_bytes(self) -> int:
        """Total bytes sent over radios by this plan."""
        return sum(t.payload_bytes for t in self.tasks if t.kind == TaskKind.TX)

    def _asdict(self):
        config = {
            "pipeline": self.pipeline_id,
            "model": self.model.name,
            "source": self.source,
            "chunks": [{"device": c.device, "start": c.start, "stop": c.stop} for c in self.chunks],
            "target": self.target,
        }
        if self.index is not None:
            config["index"] = self.index
        config["tasks"] = [t.describe() for t in self.tasks]
        return config

    @classmethod
    def _fromdict(cls, config: dict, pipelines: dict):
        """
        Recreate a plan from a (JSON) dictionary.

        ``pipelines`` maps pipeline ids to :class:`PipelineSpec` objects.
        """
        try:
            pipeline = pipelines[config["pipeline"]]
            chunks = [Chunk(c["device"], c["start"], c["stop"]) for c in config["chunks"]]
            return cls(pipeline, config["source"], chunks, config["target"], config.get("index"))
        except KeyError as exc:
            raise ConfigurationError(f"Cannot parse execution plan {config!r}: missing {exc}.") from exc


class HolisticPlan:
    """
    One execution plan per registered pipeline, evaluated jointly.

    .. rubric:: Parameters

    * ``plans`` ([ExecutionPlan]): In pipeline registration order.

    .. autosummary::

        ~_asdict
        ~_fromdict
        ~index
        ~usage
    """

    def __init__(self, plans=()):
        self.plans = tuple(plans)
        ids = [p.pipeline_id for p in self.plans]
        if len(set(ids)) != len(ids):
            raise ConfigurationError(f"Exactly one execution plan per pipeline, received {ids!r}.")

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(plans={list(self.plans)!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, HolisticPlan):
            return NotImplemented
        return self.plans == other.plans

    def __len__(self) -> int:
        return len(self.plans)

    def __iter__(self):
        return iter(self.plans)

    @property
    def index(self) -> tuple:
        """Enumeration indices of the member plans."""
        return tuple(p.index for p in self.plans)

    @property
    def pipeline_ids(self) -> list:
        return [p.pipeline_id for p in self.plans]

    def extended(self, plan: ExecutionPlan):
        """New holistic plan with ``plan`` appended."""
        return HolisticPlan((*self.plans, plan))

    def usage(self) -> dict:
        """Per-device totals of (weight bytes, bias bytes, layers) over all chunks."""
        totals = {}
        for plan in self.plans:
            for device, footprint in plan.footprints().items():
                totals[device] = totals.get(device, Footprint()) + footprint
        return totals

    def _asdict(self):
        return {
            "plans": [p._asdict() for p in self.plans],
            "usage": {k: v._asdict() for k, v in sorted(self.usage().items())},
        }

    @classmethod
    def _fromdict(cls, config: dict, pipelines: dict):
        plans = [ExecutionPlan._fromdict(p, pipelines) for p in config.get("plans", [])]
        order = {pid: i for i, pid in enumerate(pipelines)}
        return cls(sorted(plans, key=lambda p: order.get(p.pipeline_id, len(order))))
