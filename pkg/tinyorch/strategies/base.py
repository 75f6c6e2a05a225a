"""
Strategy: abstract base class and shared scoring.

.. autosummary::

    ~argbest
    ~exact_score
    ~objective_keys
    ~Ratio
    ~StrategyBase
    ~StrategyResult
"""

import logging
import typing
from abc import ABC
from abc import abstractmethod
from fractions import Fraction

import numpy as np

from .. import __version__
from ..estimate import ObjectiveKind

logger = logging.getLogger(__name__)

RATIO_TOLERANCE = 1e-12
"""Relative window of float ratios re-ranked with exact fractions."""


class Ratio(typing.NamedTuple):
    """A score column computed as ``numerator / denominator`` (exact on ties)."""

    numerator: np.ndarray
    denominator: np.ndarray


class StrategyResult(typing.NamedTuple):
    """Chosen row of each candidate table, and how many combinations were scored."""

    rows: list
    evaluated: int


def objective_keys(objective, latency, chains, energy) -> list:
    """
    Score columns of an objective, most significant first, lower is better.

    .. rubric:: Parameters

    * ``latency``: end-to-end latency of each combination (ns)
    * ``chains``: summed pipeline latencies of each combination (ns)
    * ``energy``: energy of each combination (nJ)
    """
    objective = ObjectiveKind(objective)
    if objective == ObjectiveKind.THROUGHPUT_MAX:
        # pipeline count is the same for every candidate
        return [latency, chains]
    if objective == ObjectiveKind.LATENCY_MIN:
        return [latency, energy]
    return [Ratio(energy, latency), latency]


def _column(key, index):
    if isinstance(key, Ratio):
        return key.numerator[index], key.denominator[index]
    return key[index]


def argbest(keys, mask) -> typing.Optional[int]:
    """
    Position of the lowest-scoring allowed candidate, ``None`` if none is.

    ``keys`` are 1-D columns compared lexicographically; the smallest
    position wins remaining ties.
    """
    candidates = np.flatnonzero(mask)
    for key in keys:
        if len(candidates) <= 1:
            break
        if isinstance(key, Ratio):
            num, den = _column(key, candidates)
            values = num / den
            near = values <= values.min() * (1 + RATIO_TOLERANCE)
            exact = [Fraction(int(n), int(d)) for n, d in zip(num[near], den[near])]
            best = min(exact)
            candidates = candidates[near][np.array([f == best for f in exact])]
        else:
            values = key[candidates]
            candidates = candidates[values == values.min()]
    if len(candidates) == 0:
        return None
    return int(candidates[0])


def exact_score(keys, position: int) -> tuple:
    """Score tuple of one candidate (integers and fractions)."""
    score = []
    for key in keys:
        if isinstance(key, Ratio):
            score.append(Fraction(int(key.numerator[position]), int(key.denominator[position])))
        else:
            score.append(int(key[position]))
    return tuple(score)


class StrategyBase(ABC):
    """
    Base class for all |tinyorch| plan selection strategies.

    A strategy receives the :class:`~tinyorch.candidates.CandidateTable` of
    each pipeline, in processing order, and picks one row of each.

    .. rubric:: Parameters

    * ``objective`` (str or ObjectiveKind): What to optimize.
      (default: ``"throughput"``)

    Example::

        import tinyorch

        class MyStrategy(tinyorch.StrategyBase):
            name = "mine"

            def select(self, tables):
                ...

    .. autosummary::

        ~select
    """

    name = "base"
    """Name of this strategy."""

    version = __version__
    """Version of this strategy."""

    accumulates = True
    """Does this strategy check capacities jointly while it selects?"""

    ordered = True
    """Does this strategy depend on the processing order of the pipelines?"""

    def __init__(self, objective=ObjectiveKind.THROUGHPUT_MAX, **kwargs) -> None:
        self.objective = ObjectiveKind(objective)
        logger.debug("objective=%r, kwargs=%r", self.objective, kwargs)

    def __repr__(self) -> str:
        # fmt: off
        args = [
            f"{s}={getattr(self, s)!r}"
            for s in "name version objective".split()
        ]
        # fmt: on
        return f"{self.__class__.__name__}({', '.join(args)})"

    @abstractmethod
    def select(self, tables) -> StrategyResult:
        """Choose one row per candidate table."""
