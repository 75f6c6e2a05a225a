"""
Package-level initialization.
"""

# -----------------------------------------------------------------------------
# copyright (c) 2023-2024, UChicago Argonne, LLC
#
# Distributed under the terms of the
# Argonne National Laboratory Open Source License.
#
# The full license is in the file LICENSE, distributed with this software.
# -----------------------------------------------------------------------------

__settings_orgName__ = "prjemian"
__package_name__ = "tinyorch"

try:
    from setuptools_scm import get_version

    __version__ = get_version(root="..", relative_to=__file__)
    del get_version
except (LookupError, ModuleNotFoundError):
    from importlib.metadata import PackageNotFoundError
    from importlib.metadata import version

    try:
        __version__ = version(__package_name__)
    except PackageNotFoundError:
        __version__ = "0+unknown"
    del version, PackageNotFoundError


class TinyorchError(Exception):
    """Any exception from the |tinyorch| package."""


from .cost_model import task_cost  # noqa: E402, F401
from .enumeration import count_execution_plans  # noqa: E402, F401
from .enumeration import enumerate_execution_plans  # noqa: E402, F401
from .estimate import estimate  # noqa: E402, F401
from .estimate import estimate_latency  # noqa: E402, F401
from .operations.constraints import is_runnable  # noqa: E402, F401
from .operations.device import DeviceProfile  # noqa: E402, F401
from .operations.misc import STRATEGY_ENTRYPOINT_GROUP  # noqa: E402, F401
from .operations.misc import check_value_in_list  # noqa: E402, F401
from .operations.model import ModelDescriptor  # noqa: E402, F401
from .operations.pipeline import PipelineSpec  # noqa: E402, F401
from .operations.plan import ExecutionPlan  # noqa: E402, F401
from .operations.plan import HolisticPlan  # noqa: E402, F401
from .planner import Planner  # noqa: E402, F401
from .simulator import simulate  # noqa: E402, F401
from .strategies import StrategyBase  # noqa: E402, F401
from .strategies import get_strategy  # noqa: E402, F401
from .strategies import strategies  # noqa: E402, F401
from .strategies import strategy_factory  # noqa: E402, F401
from .workloads import load_fixture  # noqa: E402, F401
