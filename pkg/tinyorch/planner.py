"""
Select holistic collaboration plans for concurrent pipelines.

Intermediate layer between the command line (or a notebook) and the plan
selection |strategy| classes.

.. autosummary::

    ~compare
    ~data_intensity
    ~Planner
    ~prioritize
    ~Prioritization
    ~SearchSpace
    ~Selection
    ~Strategy
"""

import dataclasses
import enum
import functools
import itertools
import logging
import math
import typing
from fractions import Fraction

from . import TinyorchError
from .candidates import CandidateTable
from .enumeration import EnumerationConfig
from .enumeration import plan_count
from .enumeration import sorted_devices
from .estimate import ObjectiveKind
from .estimate import PlanEstimate
from .estimate import estimate
from .operations.constraints import RunnableReport
from .operations.constraints import is_runnable
from .operations.misc import ConfigurationError
from .operations.misc import NoEligibleDevice
from .operations.misc import NoRunnablePlan
from .operations.misc import PlannerError
from .operations.misc import SearchBudgetExceeded
from .operations.misc import StrategyError
from .operations.misc import UnknownInterface
from .operations.misc import UnknownSensor
from .operations.misc import strategy_factory
from .operations.plan import HolisticPlan
from .strategies.oracle import DEFAULT_ORACLE_BUDGET

__all__ = ["Planner"]
logger = logging.getLogger(__name__)


class Strategy(enum.Enum):
    """Built-in plan selection strategies."""

    SYNERGY = "synergy"
    ORACLE = "oracle"
    MINDEV = "mindev"
    MAXDEV = "maxdev"
    PRIMINDEV = "primindev"
    PRIMAXDEV = "primaxdev"
    INDMODEL = "indmodel"
    JOINTMODEL = "jointmodel"
    INDBEST = "indbest"


BASELINES = [s.value for s in Strategy if s not in (Strategy.SYNERGY, Strategy.ORACLE)]


class Prioritization(enum.Enum):
    """Order in which progressive strategies fix the pipelines."""

    DATA_INTENSITY_DESC = "data-intensity-desc"
    DATA_INTENSITY_ASC = "data-intensity-asc"
    MODEL_SIZE_DESC = "model-size-desc"
    MODEL_SIZE_ASC = "model-size-asc"
    NUM_LAYERS_DESC = "num-layers-desc"
    NUM_LAYERS_ASC = "num-layers-asc"
    SEQUENTIAL = "sequential"


def data_intensity(pipeline) -> Fraction:
    """Mean size of the model input and every layer output, bytes (exact)."""
    return pipeline.model.data_intensity


_SORT_KEYS = {
    Prioritization.DATA_INTENSITY_DESC: lambda p: -data_intensity(p),
    Prioritization.DATA_INTENSITY_ASC: data_intensity,
    Prioritization.MODEL_SIZE_DESC: lambda p: -p.model.weight_bytes,
    Prioritization.MODEL_SIZE_ASC: lambda p: p.model.weight_bytes,
    Prioritization.NUM_LAYERS_DESC: lambda p: -p.model.num_layers,
    Prioritization.NUM_LAYERS_ASC: lambda p: p.model.num_layers,
    Prioritization.SEQUENTIAL: lambda p: 0,
}


def prioritize(pipelines, prioritization=Prioritization.DATA_INTENSITY_DESC) -> list:
    """Pipelines in processing order.  Ties keep registration order."""
    return sorted(pipelines, key=_SORT_KEYS[Prioritization(prioritization)])


@dataclasses.dataclass(frozen=True)
class SearchSpace:
    """Plan counts per pipeline, their sum (progressive) and product (complete search)."""

    counts: dict
    total: int
    product: int

    @property
    def reduction(self) -> float:
        """Product divided by sum."""
        return self.product / self.total

    def _asdict(self):
        return {
            "counts": dict(self.counts),
            "sum": self.total,
            "product": self.product,
            "reduction": self.reduction,
        }


@dataclasses.dataclass(frozen=True)
class Selection:
    """
    Outcome of a plan selection.

    ``status`` is ``"ok"``, or ``"oor"`` when an independent strategy's
    combined plan exceeds an accelerator's capacities.
    """

    holistic: HolisticPlan
    status: str
    strategy: str
    objective: ObjectiveKind
    prioritization: Prioritization
    estimate: PlanEstimate
    report: RunnableReport
    evaluated: int

    def _asdict(self):
        config = {
            "strategy": self.strategy,
            "objective": self.objective.value,
            "prioritization": self.prioritization.value,
            "status": self.status,
            "evaluated": self.evaluated,
            "plan": self.holistic._asdict(),
            "estimate": self.estimate._asdict(),
        }
        if self.status != "ok":
            config["violations"] = [v._asdict() for v in self.report.violations]
        return config


class Planner:
    """
    Plan concurrent pipelines on a set of devices.

    .. rubric:: Parameters

    * ``devices`` ([DeviceProfile]): Available devices.
    * ``pipelines`` ([PipelineSpec]): Pipelines, in registration order.
    * ``objective`` (str): ``throughput`` (default), ``latency`` or ``power``.
    * ``prioritization`` (str): Processing order of progressive strategies.
      (default: ``data-intensity-desc``)
    * ``budget`` (int): Largest cross-product the oracle will search.
    * ``max_chunks`` (int): Optional cap on chunks per plan.

    .. autosummary::

        ~estimate
        ~search_space
        ~select
        ~select_baseline
        ~select_oracle
        ~select_progressive
        ~tables
    """

    def __init__(
        self,
        devices,
        pipelines,
        *,
        objective="throughput",
        prioritization=Prioritization.DATA_INTENSITY_DESC,
        budget: int = DEFAULT_ORACLE_BUDGET,
        max_chunks: int = None,
    ) -> None:
        self.devices = sorted_devices(devices)
        self.pipelines = list(pipelines)
        if len(self.pipelines) == 0:
            raise ConfigurationError("Need at least one pipeline.")
        ids = [p.id for p in self.pipelines]
        if len(set(ids)) != len(ids):
            raise ConfigurationError(f"Pipeline ids must be unique, received {ids!r}.")
        self.objective = ObjectiveKind(objective)
        self.prioritization = Prioritization(prioritization)
        self.budget = budget
        self.config = EnumerationConfig(respect_requirements=True, max_chunks=max_chunks)

    def __repr__(self) -> str:
        return (
            f"{self.__class__.__name__}(devices={[d.id for d in self.devices]!r},"
            f" pipelines={[p.id for p in self.pipelines]!r}, objective={self.objective.value!r})"
        )

    @functools.cached_property
    def tables(self) -> dict:
        """Candidate table of each pipeline, by pipeline id."""
        return {p.id: CandidateTable(p, self.devices, self.config) for p in self.pipelines}

    def search_space(self, respect_requirements: bool = True) -> SearchSpace:
        """
        Plan counts of the registered pipelines, in closed form.

        With ``respect_requirements=False``, any device may host sources and
        targets.
        """
        config = EnumerationConfig(respect_requirements, self.config.max_chunks)
        counts = {p.id: plan_count(p, self.devices, config) for p in self.pipelines}
        return SearchSpace(counts, sum(counts.values()), math.prod(counts.values()))

    def estimate(self, holistic) -> PlanEstimate:
        """Estimate of a holistic plan on this planner's devices."""
        return estimate(holistic, self.devices)

    def select(self, strategy: str = "synergy", *, objective=None, prioritization=None) -> Selection:
        """
        Select a holistic plan with the named strategy.

        Raises NoRunnablePlan or SearchBudgetExceeded.  An out-of-resource
        result of an independent strategy is returned with status ``oor``.
        """
        objective = ObjectiveKind(objective or self.objective)
        prioritization = Prioritization(prioritization or self.prioritization)
        worker = strategy_factory(strategy, objective=objective, budget=self.budget)
        order = prioritize(self.pipelines, prioritization) if worker.ordered else self.pipelines
        result = worker.select([self.tables[p.id] for p in order])

        chosen = {p.id: self.tables[p.id].plan(row) for p, row in zip(order, result.rows)}
        holistic = HolisticPlan(chosen[p.id] for p in self.pipelines)
        report = is_runnable(holistic, self.devices)
        if worker.accumulates and not report.runnable:
            raise PlannerError(f"{worker.name} selected an out-of-resource plan: {report.violations!r}")
        status = "ok" if report.runnable else "oor"
        selection = Selection(
            holistic,
            status,
            worker.name,
            objective,
            prioritization,
            self.estimate(holistic),
            report,
            result.evaluated,
        )
        logger.debug("strategy=%r status=%r index=%r", worker.name, status, holistic.index)
        return selection

    def select_progressive(self, prioritization=None) -> Selection:
        """Fix pipelines one at a time in priority order (the default strategy)."""
        return self.select("synergy", prioritization=prioritization)

    def select_oracle(self) -> Selection:
        """Complete search over every combination of execution plans."""
        return self.select("oracle")

    def select_baseline(self, strategy: str, prioritization=None) -> Selection:
        """Select with one of the baseline strategies."""
        if strategy not in BASELINES:
            raise StrategyError(f"{strategy!r} is not a baseline.  Pick one of: {BASELINES!r}")
        return self.select(strategy, prioritization=prioritization)


class ComparisonRow(typing.NamedTuple):
    """One row of :func:`compare`."""

    group: tuple
    strategy: str
    prioritization: str
    objective: str
    status: str
    estimate: typing.Optional[PlanEstimate] = None
    ratio: typing.Optional[float] = None
    holistic: typing.Optional[HolisticPlan] = None


def _outcome(planner, strategy, objective, prioritization):
    try:
        selection = planner.select(strategy, objective=objective, prioritization=prioritization)
    except SearchBudgetExceeded:
        return "budget", None
    except (NoRunnablePlan, NoEligibleDevice, UnknownSensor, UnknownInterface):
        return "infeasible", None
    except TinyorchError as exc:
        logger.warning("strategy=%r failed: %s", strategy, exc)
        return "error", None
    return selection.status, selection


def compare(
    devices,
    pipelines,
    strategies=("synergy",),
    prioritizations=(Prioritization.DATA_INTENSITY_DESC,),
    objectives=(ObjectiveKind.THROUGHPUT_MAX,),
    budget: int = DEFAULT_ORACLE_BUDGET,
    group_size: int = None,
) -> list:
    """
    Run strategies over pipeline groups, one :class:`ComparisonRow` each.

    With ``group_size``, every combination of that many pipelines forms a
    group; otherwise all pipelines form one group.  Strategies that do not
    depend on the processing order run once per objective.  ``ratio`` is the
    throughput relative to the oracle of the same group and objective.

    ``status`` is ``ok``, ``oor``, ``infeasible``, ``budget`` or ``error``.
    A failing strategy gives a row with that status, never an exception.
    """
    pipelines = list(pipelines)
    groups = [tuple(pipelines)] if group_size is None else list(itertools.combinations(pipelines, group_size))
    rows = []
    for group in groups:
        planner = Planner(devices, group, budget=budget)
        names = tuple(p.id for p in group)
        for objective in objectives:
            objective = ObjectiveKind(objective)
            reference = None
            if "oracle" in strategies:
                oracle = _outcome(planner, "oracle", objective, None)
                reference = oracle[1].estimate if oracle[0] == "ok" else None
            for strategy in strategies:
                ordered = strategy_factory(strategy, objective=objective).ordered
                for prioritization in prioritizations if ordered else prioritizations[:1]:
                    prioritization = Prioritization(prioritization)
                    if strategy == "oracle":
                        status, selection = oracle
                    else:
                        status, selection = _outcome(planner, strategy, objective, prioritization)
                    result = None if selection is None else selection.estimate
                    ratio = None
                    if reference is not None and status == "ok":
                        ratio = result.throughput / reference.throughput
                    rows.append(
                        ComparisonRow(
                            names,
                            strategy,
                            prioritization.value if ordered else "-",
                            objective.value,
                            status,
                            result,
                            ratio,
                            None if selection is None else selection.holistic,
                        )
                    )
        logger.debug("group=%r rows=%d", names, len(rows))
    return rows
