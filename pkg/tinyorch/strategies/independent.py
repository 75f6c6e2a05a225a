"""
Independent selection: each pipeline is planned as if it were alone.

The chosen plans are combined without a joint capacity check, so the
result may be out of resource.

.. autosummary::

    ~IndBestStrategy
    ~IndModelStrategy
"""

import logging
from abc import abstractmethod

from ..operations.misc import NoRunnablePlan
from .base import StrategyBase
from .base import StrategyResult
from .base import argbest
from .base import objective_keys
from .progressive import model_centric

logger = logging.getLogger(__name__)


class IndependentStrategy(StrategyBase):
    """Pick each pipeline's best plan among the plans that fit on their own."""

    name = "independent"
    accumulates = False
    ordered = False

    @abstractmethod
    def choose(self, table):
        """Row of ``table`` to use, or ``None``."""

    def select(self, tables) -> StrategyResult:
        rows = []
        for table in tables:
            row = self.choose(table)
            if row is None:
                raise NoRunnablePlan(f"Pipeline {table.pipeline.id!r}: no execution plan fits on its own.")
            logger.debug("%s pipeline=%r row=%d", self.name, table.pipeline.id, row)
            rows.append(row)
        return StrategyResult(rows, sum(len(t) for t in tables))


class IndModelStrategy(IndependentStrategy):
    """Lowest model-path latency, source and target on the first eligible devices."""

    name = "indmodel"

    def choose(self, table):
        return argbest([table.model_latency_ns], table.alone & model_centric(table))


class IndBestStrategy(IndependentStrategy):
    """Best end-to-end plan for the objective, source and target included."""

    name = "indbest"

    def choose(self, table):
        keys = objective_keys(self.objective, table.latency_ns, table.latency_ns, table.energy_nj)
        return argbest(keys, table.alone)
