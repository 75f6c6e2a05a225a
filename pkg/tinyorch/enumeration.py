"""
Execution plans of a pipeline: closed-form count and lazy enumeration.

A plan picks ``d`` distinct devices in order, ``d - 1`` split points, a
source device and a target device.  For ``L`` layers and ``D`` devices the
number of plans is

    N_p = sum(P(D, d) * C(L - 1, d - 1) for d in 1..D) * |S| * |T|

where ``|S| = |T| = D`` when any device may host the source and target.

.. autosummary::

    ~count_execution_plans
    ~enumerate_execution_plans
    ~EnumerationConfig
    ~plan_count
"""

import dataclasses
import itertools
import logging
import math
import typing

from .operations.misc import ConfigurationError
from .operations.plan import Chunk
from .operations.plan import ExecutionPlan

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class EnumerationConfig:
    """
    How execution plans are enumerated.

    .. rubric:: Parameters

    * ``respect_requirements`` (bool): When ``False`` (default), any device
      may host the source and target tasks (the unconstrained count).
      When ``True``, only devices satisfying the pipeline's requirements.
    * ``max_chunks`` (int): Optional cap on the number of model chunks.
    """

    respect_requirements: bool = False
    max_chunks: typing.Optional[int] = None

    def chunk_limit(self, num_devices: int) -> int:
        if self.max_chunks is None:
            return num_devices
        if not 1 <= self.max_chunks <= num_devices:
            raise ConfigurationError(f"max_chunks={self.max_chunks} must be in 1..{num_devices}.")
        return self.max_chunks


def count_execution_plans(L: int, D: int, sources: int = None, targets: int = None, max_chunks: int = None) -> int:
    """
    Number of execution plans for a model of ``L`` layers on ``D`` devices.

    ``sources`` and ``targets`` are the numbers of devices allowed to host
    the source and target tasks (default: ``D`` each).
    """
    if L < 1 or D < 1:
        raise ValueError(f"Need L >= 1 and D >= 1, received {L=}, {D=}.")
    sources = D if sources is None else sources
    targets = D if targets is None else targets
    top = D if max_chunks is None else min(D, max_chunks)
    splits = sum(math.perm(D, d) * math.comb(L - 1, d - 1) for d in range(1, top + 1))
    return splits * sources * targets


def _endpoints(pipeline, devices, config):
    if config.respect_requirements:
        return pipeline.eligible_sources(devices), pipeline.eligible_targets(devices)
    return devices, devices


def sorted_devices(devices) -> list:
    """Devices in enumeration order (by id)."""
    return sorted(devices, key=lambda d: d.id)


def plan_count(pipeline, devices, config: EnumerationConfig = None) -> int:
    """Length of the :func:`enumerate_execution_plans` stream, in closed form."""
    config = config or EnumerationConfig()
    devices = sorted_devices(devices)
    sources, targets = _endpoints(pipeline, devices, config)
    return count_execution_plans(
        pipeline.model.num_layers,
        len(devices),
        len(sources),
        len(targets),
        config.chunk_limit(len(devices)),
    )


def enumerate_execution_plans(pipeline, devices, config: EnumerationConfig = None):
    """
    Yield every execution plan of ``pipeline``, each with its dense index.

    Order: chunk count ascending, device sequences lexicographic by id,
    split points lexicographic, then source and target devices by id.
    """
    config = config or EnumerationConfig()
    if len(devices) == 0:
        raise ConfigurationError("Need at least one device.")
    devices = sorted_devices(devices)
    sources, targets = _endpoints(pipeline, devices, config)
    ids = [d.id for d in devices]
    L = pipeline.model.num_layers

    index = 0
    for d in range(1, config.chunk_limit(len(devices)) + 1):
        for sequence in itertools.permutations(ids, d):
            for cuts in itertools.combinations(range(1, L), d - 1):
                bounds = (0, *cuts, L)
                chunks = [Chunk(dev, a, b) for dev, (a, b) in zip(sequence, itertools.pairwise(bounds))]
                for source in sources:
                    for target in targets:
                        yield ExecutionPlan(pipeline, source.id, chunks, target.id, index)
                        index += 1
    logger.debug("pipeline=%r plans=%d", pipeline.id, index)
