"""Numeric kernel backend selection.

Two interchangeable backends exist: a compiled Cython extension (_speedups)
and the pure-Python reference module. The environment variable WARELAB_KERNELS
picks one at import time:

    auto      use the compiled backend when present, else fall back (default)
    compiled  require the extension; ImportError if it was not built
    pure      force the reference implementation

BACKEND names the active choice. load_backend() returns a backend module by
name for side-by-side comparison (parity tests, benchmarks).
"""

import os

from . import reference

_KERNEL_NAMES = (
    "wrap_pi",
    "unicycle_step",
    "drone_translate",
    "yaw_integrate",
    "slew_substep",
    "agv_route_substep",
    "drone_flight_substep",
    "compose_pose",
    "relative_pose",
    "dist2",
    "dist3",
    "betainc",
)


def load_backend(name):
    """Return the kernel module for 'pure' or 'compiled'."""
    if name == "pure":
        return reference
    if name == "compiled":
        from . import _speedups

        return _speedups
    raise ValueError(f"unknown kernel backend {name!r}")


_choice = os.environ.get("WARELAB_KERNELS", "auto")
if _choice not in ("auto", "compiled", "pure"):
    raise RuntimeError(
        f"WARELAB_KERNELS must be auto, compiled or pure, got {_choice!r}"
    )

if _choice == "pure":
    _impl = reference
    BACKEND = "pure"
else:
    try:
        from . import _speedups as _impl

        BACKEND = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise
        _impl = reference
        BACKEND = "pure"

wrap_pi = _impl.wrap_pi
unicycle_step = _impl.unicycle_step
drone_translate = _impl.drone_translate
yaw_integrate = _impl.yaw_integrate
slew_substep = _impl.slew_substep
agv_route_substep = _impl.agv_route_substep
drone_flight_substep = _impl.drone_flight_substep
compose_pose = _impl.compose_pose
relative_pose = _impl.relative_pose
dist2 = _impl.dist2
dist3 = _impl.dist3
betainc = _impl.betainc

TWO_PI = reference.TWO_PI

__all__ = list(_KERNEL_NAMES) + ["BACKEND", "TWO_PI", "load_backend", "reference"]
