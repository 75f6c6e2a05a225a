"""
Latency, throughput and energy estimates of holistic plans.

The tasks of all pipelines form one DAG (a disjoint union of chains, Rx
tasks being siblings of their Tx).  The end-to-end latency is the longest
path from any source task to any target task, weighted by task latency.

.. autosummary::

    ~estimate
    ~estimate_latency
    ~objective_value
    ~ObjectiveKind
    ~PlanEstimate
    ~task_graph
"""

import dataclasses
import enum
import logging
from fractions import Fraction

import networkx as nx

from .cost_model import _device_map
from .cost_model import task_cost
from .operations.misc import NS_PER_S
from .operations.misc import CyclicPlan
from .operations.misc import EmptyPlan
from .operations.plan import TaskKind

logger = logging.getLogger(__name__)


class ObjectiveKind(enum.Enum):
    """What plan selection optimizes."""

    THROUGHPUT_MAX = "throughput"
    LATENCY_MIN = "latency"
    POWER_MIN = "power"


@dataclasses.dataclass(frozen=True)
class PlanEstimate:
    """
    Estimated behavior of a holistic plan.

    ``pipeline_latencies_ns`` are the chain latencies of the member plans,
    in plan order.
    """

    latency_ns: int
    energy_nj: int
    pipelines: int
    pipeline_latencies_ns: tuple = ()

    @property
    def latency(self) -> float:
        """End-to-end latency, seconds."""
        return self.latency_ns / NS_PER_S

    @property
    def throughput(self) -> float:
        """Pipelines completed per second."""
        return self.pipelines * NS_PER_S / self.latency_ns

    @property
    def average_throughput(self) -> float:
        """Throughput per pipeline."""
        return self.throughput / self.pipelines

    @property
    def energy(self) -> float:
        """Energy of one execution of every pipeline, joules."""
        return self.energy_nj / NS_PER_S

    @property
    def avg_power_w(self) -> float:
        """Energy per execution divided by the end-to-end latency, watts."""
        return self.energy_nj / self.latency_ns

    def _asdict(self):
        return {
            "latency_s": self.latency,
            "throughput": self.throughput,
            "average_throughput": self.average_throughput,
            "energy_j": self.energy,
            "avg_power_w": self.avg_power_w,
        }


def task_graph(holistic, devices, serialized: bool = False) -> nx.DiGraph:
    """
    Task DAG of a holistic plan.

    Nodes are ``(pipeline_id, task_index)`` with attributes ``task``,
    ``latency_ns`` and ``energy_nj``.  With ``serialized``, the last task
    of each pipeline precedes the first task of the next one.
    """
    devices = _device_map(devices)
    graph = nx.DiGraph()
    previous_exit = None
    for plan in holistic:
        pid = plan.pipeline_id
        for i, (task, preds) in enumerate(zip(plan.tasks, plan.predecessors)):
            cost = task_cost(task, plan, devices)
            graph.add_node((pid, i), task=task, latency_ns=cost.latency_ns, energy_nj=cost.energy_nj)
            for p in preds:
                graph.add_edge((pid, p), (pid, i))
        if serialized and previous_exit is not None:
            graph.add_edge(previous_exit, (pid, 0))
        previous_exit = (pid, len(plan.tasks) - 1)
    return graph


def longest_path_ns(graph: nx.DiGraph) -> int:
    """Largest sum of node latencies over any path of ``graph``."""
    finish = {}
    try:
        for node in nx.topological_sort(graph):
            start = max((finish[p] for p in graph.predecessors(node)), default=0)
            finish[node] = start + graph.nodes[node]["latency_ns"]
    except nx.NetworkXUnfeasible as exc:
        raise CyclicPlan(f"Task graph has a cycle: {exc}") from exc
    return max(finish.values(), default=0)


def estimate_latency(holistic, devices, serialized: bool = False) -> int:
    """
    End-to-end latency (ns): longest path through the holistic task DAG.

    With ``serialized``, pipelines run back to back in plan order.
    """
    return longest_path_ns(task_graph(holistic, devices, serialized))


def estimate(holistic, devices) -> PlanEstimate:
    """Latency, throughput and energy of a nonempty holistic plan."""
    if len(holistic) == 0:
        raise EmptyPlan("Cannot estimate an empty holistic plan.")
    devices = _device_map(devices)
    graph = task_graph(holistic, devices)
    chains = []
    for plan in holistic:
        chains.append(sum(graph.nodes[(plan.pipeline_id, i)]["latency_ns"] for i, _ in _chain(plan)))
    energy = sum(data["energy_nj"] for _, data in graph.nodes(data=True))
    result = PlanEstimate(longest_path_ns(graph), energy, len(holistic), tuple(chains))
    logger.debug("estimate=%r", result)
    return result


def _chain(plan):
    # Rx tasks run alongside their Tx; a chain walk skips them
    return [(i, t) for i, t in enumerate(plan.tasks) if t.kind != TaskKind.RX]


def objective_value(result: PlanEstimate, objective) -> tuple:
    """
    Comparable score of an estimate, lower is better.

    * throughput: ``(-throughput, latency, sum of pipeline latencies)``
    * latency: ``(latency, energy)``
    * power: ``(average power, latency)``

    Scores are exact (integers and fractions).
    """
    objective = ObjectiveKind(objective)
    if objective == ObjectiveKind.THROUGHPUT_MAX:
        return (
            Fraction(-result.pipelines * NS_PER_S, result.latency_ns),
            result.latency_ns,
            sum(result.pipeline_latencies_ns),
        )
    if objective == ObjectiveKind.LATENCY_MIN:
        return (result.latency_ns, result.energy_nj)
    return (Fraction(result.energy_nj, result.latency_ns), result.latency_ns)
