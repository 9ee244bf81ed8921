from .model_fixtures import *  # noqa: F401, F403
from .scenario_fixtures import *  # noqa: F401, F403
from .signal_fixtures import *  # noqa: F401, F403
