from .logspiralMain import get_help, get_version, run_logspiral  # noqa: F401
from .utils._config import sys_info  # noqa: F401
