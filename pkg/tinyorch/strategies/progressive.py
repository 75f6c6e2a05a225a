"""
Progressive selection: fix one pipeline's execution plan at a time.

Each pipeline's candidates are scored together with the plans already
fixed for earlier pipelines.  Only candidates that still fit the
accelerators are kept, so the accumulated holistic plan is always
runnable.  Search cost is the sum, not the product, of the plan counts.

.. autosummary::

    ~JointModelStrategy
    ~MaxDevStrategy
    ~MinDevStrategy
    ~PriMaxDevStrategy
    ~PriMinDevStrategy
    ~ProgressiveStrategy
    ~SynergyStrategy
"""

import logging

import numpy as np

from ..operations.misc import NoRunnablePlan
from .base import StrategyBase
from .base import StrategyResult
from .base import argbest
from .base import objective_keys

logger = logging.getLogger(__name__)


def model_centric(table) -> np.ndarray:
    """Rows whose source and target are the first eligible devices."""
    return np.arange(len(table)) % table.mappings == 0


class ProgressiveStrategy(StrategyBase):
    """
    Accumulate execution plans in processing order.

    Subclasses change which rows are eligible (:meth:`eligible`) and which
    score columns come before the objective (:meth:`rule_keys`).

    .. autosummary::

        ~eligible
        ~rule_keys
        ~select
    """

    name = "progressive"
    use_objective = True

    def eligible(self, table) -> np.ndarray:
        return np.ones(len(table), dtype=bool)

    def rule_keys(self, table) -> list:
        return []

    def select(self, tables) -> StrategyResult:
        rows, evaluated = [], 0
        occupied = None
        latency = chains = energy = 0
        for table in tables:
            evaluated += len(table)
            mask = self.eligible(table) & table.runnable(occupied)
            keys = self.rule_keys(table)
            combined = np.maximum(latency, table.latency_ns)
            if self.use_objective:
                keys += objective_keys(
                    self.objective, combined, chains + table.latency_ns, energy + table.energy_nj
                )
            row = argbest(keys, mask)
            if row is None:
                raise NoRunnablePlan(
                    f"Pipeline {table.pipeline.id!r}: no execution plan fits"
                    f" next to the {len(rows)} plan(s) already fixed."
                )
            rows.append(row)
            usage = table.usage([row])[0]
            occupied = usage if occupied is None else occupied + usage
            latency = int(combined[row])
            chains += int(table.latency_ns[row])
            energy += int(table.energy_nj[row])
            logger.debug("%s pipeline=%r row=%d", self.name, table.pipeline.id, row)
        return StrategyResult(rows, evaluated)


class SynergyStrategy(ProgressiveStrategy):
    """Best plan for the objective at every step."""

    name = "synergy"


class MinDevStrategy(ProgressiveStrategy):
    """Fewest chunk devices that fit, then the objective."""

    name = "mindev"

    def rule_keys(self, table):
        return [table.n_chunks]


class MaxDevStrategy(ProgressiveStrategy):
    """Most chunk devices that fit, then the objective."""

    name = "maxdev"

    def rule_keys(self, table):
        return [-table.n_chunks]


class PriMinDevStrategy(ProgressiveStrategy):
    """
    Fewest chunk devices, least radio traffic, then larger accelerators.
    """

    name = "primindev"

    def rule_keys(self, table):
        return [table.n_chunks, table.transfer_bytes, -table.capacity_sum]


class PriMaxDevStrategy(ProgressiveStrategy):
    """Most chunk devices, least radio traffic, then larger accelerators."""

    name = "primaxdev"

    def rule_keys(self, table):
        return [-table.n_chunks, table.transfer_bytes, -table.capacity_sum]


class JointModelStrategy(ProgressiveStrategy):
    """
    Model-centric choice with joint capacity checks.

    Source and target stay on the first eligible devices; the model split
    with the lowest model-path latency that still fits is chosen.
    """

    name = "jointmodel"
    use_objective = False

    def eligible(self, table):
        return model_centric(table)

    def rule_keys(self, table):
        return [table.model_latency_ns]
