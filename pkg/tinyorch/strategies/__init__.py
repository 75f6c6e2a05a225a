"""
A strategy chooses one execution plan per pipeline.

A :index:`!strategy` is a Python class registered as an entry point in
group ``tinyorch.strategy``.  It receives one
:class:`~tinyorch.candidates.CandidateTable` per pipeline and returns the
chosen row of each.

.. rubric:: Built-in strategies

.. autosummary::

    ~progressive.SynergyStrategy
    ~oracle.OracleStrategy
    ~progressive.MinDevStrategy
    ~progressive.MaxDevStrategy
    ~progressive.PriMinDevStrategy
    ~progressive.PriMaxDevStrategy
    ~independent.IndModelStrategy
    ~progressive.JointModelStrategy
    ~independent.IndBestStrategy

.. rubric:: Base class for all strategies

.. autosummary::

    ~base.StrategyBase
"""

from ..operations.misc import get_strategy  # noqa: F401
from ..operations.misc import strategies  # noqa: F401
from ..operations.misc import strategy_factory  # noqa: F401
from .base import StrategyBase  # noqa: F401
from .base import StrategyResult  # noqa: F401
