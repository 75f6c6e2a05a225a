"""
Complete search over the cross-product of execution plans.

.. autosummary::

    ~OracleStrategy
"""

import logging
import math

import numpy as np

from ..operations.misc import NoRunnablePlan
from ..operations.misc import SearchBudgetExceeded
from .base import StrategyBase
from .base import StrategyResult
from .base import argbest
from .base import exact_score
from .base import objective_keys

logger = logging.getLogger(__name__)

DEFAULT_ORACLE_BUDGET = 10**8
"""Largest plan cross-product the oracle will search."""

PAIR_BLOCK = 1 << 18
"""Upper bound of usage cells scored at once for the last two pipelines."""


class OracleStrategy(StrategyBase):
    """
    Objective-optimal runnable holistic plan, by exhaustive search.

    Combinations are visited in plan-index order and only a strictly better
    score replaces the incumbent, so ties go to the smallest index tuple.
    The last two pipelines are scored as one vectorized grid.

    .. rubric:: Parameters

    * ``objective`` (str or ObjectiveKind): What to optimize.
    * ``budget`` (int): Largest cross-product to search.
      (default: :data:`DEFAULT_ORACLE_BUDGET`)
    """

    name = "oracle"
    ordered = False

    def __init__(self, objective="throughput", budget: int = DEFAULT_ORACLE_BUDGET, **kwargs) -> None:
        super().__init__(objective, **kwargs)
        self.budget = int(budget)

    def select(self, tables) -> StrategyResult:
        product = math.prod(len(t) for t in tables)
        if product > self.budget:
            raise SearchBudgetExceeded(product, self.budget)
        pools = [np.flatnonzero(t.alone) for t in tables]
        for table, pool in zip(tables, pools):
            if len(pool) == 0:
                raise NoRunnablePlan(f"Pipeline {table.pipeline.id!r}: no execution plan fits on its own.")

        self._best = None
        self._search(tables, pools, [], None, 0, 0, 0)
        if self._best is None:
            raise NoRunnablePlan("No combination of execution plans fits the accelerators.")
        score, rows = self._best
        logger.debug("oracle product=%d score=%r rows=%r", product, score, rows)
        return StrategyResult(list(rows), product)

    def _offer(self, score, rows):
        if self._best is None or score < self._best[0]:
            self._best = (score, tuple(rows))

    def _search(self, tables, pools, rows, occupied, latency, chains, energy):
        depth = len(rows)
        remaining = tables[depth:]
        if len(remaining) == 1:
            self._last(remaining[0], pools[depth], rows, occupied, latency, chains, energy)
            return
        if len(remaining) == 2:
            self._last_pair(*remaining, *pools[depth:], rows, occupied, latency, chains, energy)
            return
        table, pool = tables[depth], pools[depth]
        for row in pool[table.runnable(occupied)[pool]].tolist():
            usage = table.usage([row])[0]
            self._search(
                tables,
                pools,
                rows + [row],
                usage if occupied is None else occupied + usage,
                max(latency, int(table.latency_ns[row])),
                chains + int(table.latency_ns[row]),
                energy + int(table.energy_nj[row]),
            )

    def _last(self, table, pool, rows, occupied, latency, chains, energy):
        pool = pool[table.runnable(occupied)[pool]]
        lat = table.latency_ns[pool]
        keys = objective_keys(
            self.objective, np.maximum(latency, lat), chains + lat, energy + table.energy_nj[pool]
        )
        position = argbest(keys, np.ones(len(pool), dtype=bool))
        if position is not None:
            self._offer(exact_score(keys, position), rows + [int(pool[position])])

    def _last_pair(self, first, second, pool_a, pool_b, rows, occupied, latency, chains, energy):
        pool_a = pool_a[first.runnable(occupied)[pool_a]]
        pool_b = pool_b[second.runnable(occupied)[pool_b]]
        if len(pool_a) == 0 or len(pool_b) == 0:
            return
        free = first.capacities if occupied is None else first.capacities - occupied
        usage_b = second.usage(pool_b)
        lat_b, nj_b = second.latency_ns[pool_b], second.energy_nj[pool_b]
        nb = len(pool_b)
        step = max(1, PAIR_BLOCK // (nb * usage_b[0].size))
        for lo in range(0, len(pool_a), step):
            block = pool_a[lo : lo + step]
            fits = np.all(first.usage(block)[:, None] + usage_b[None, :] <= free, axis=(2, 3))
            lat_a = first.latency_ns[block][:, None]
            keys = objective_keys(
                self.objective,
                np.maximum(np.maximum(latency, lat_a), lat_b[None, :]).reshape(-1),
                (chains + lat_a + lat_b[None, :]).reshape(-1),
                (energy + first.energy_nj[block][:, None] + nj_b[None, :]).reshape(-1),
            )
            position = argbest(keys, fits.reshape(-1))
            if position is not None:
                a, b = divmod(position, nb)
                self._offer(exact_score(keys, position), rows + [int(block[a]), int(pool_b[b])])
