"""warelab: deterministic warehouse robot simulation with a replica-controller
interaction model, experiment session orchestration, timing/statistics
analysis and a WebSocket gateway for operator consoles."""

__version__ = "0.1.0"

from ._kernels import BACKEND as KERNEL_BACKEND  # noqa: F401
from .errors import WarelabError  # noqa: F401
