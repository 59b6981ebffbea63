"""Selection of the stepping kernel backend.

At import time the compiled Cython kernel is preferred when present; the
pure-Python kernel is the fallback.  Selection can be pinned with the
environment variable YDECAY_BACKEND in {auto, compiled, python} or switched
programmatically (used by the benchmark and the backend-equivalence tests).
"""

import os

from . import _stepper_py
from .exceptions import ParameterError

try:
    from . import _stepper_cy
except ImportError:
    _stepper_cy = None

STATUS_OK = _stepper_py.STATUS_OK
STATUS_POSITIVITY = _stepper_py.STATUS_POSITIVITY
STATUS_UNDERFLOW = _stepper_py.STATUS_UNDERFLOW

_BACKENDS = {"python": _stepper_py}
if _stepper_cy is not None:
    _BACKENDS["compiled"] = _stepper_cy


def _resolve(name):
    if name == "auto":
        return "compiled" if _stepper_cy is not None else "python"
    if name not in _BACKENDS:
        if name == "compiled":
            raise ParameterError("compiled stepping kernel is not available in this install")
        raise ParameterError(f"unknown backend {name!r}; expected auto, compiled, or python")
    return name


_active = _resolve(os.environ.get("YDECAY_BACKEND", "auto"))


def backend_name() -> str:
    """Name of the kernel currently in use ('compiled' or 'python')."""
    return _active


def available_backends() -> tuple:
    return tuple(sorted(_BACKENDS))


def set_backend(name: str) -> str:
    """Switch kernels ('auto', 'compiled', 'python'); returns the active name."""
    global _active
    _active = _resolve(name)
    return _active


def integrate_region(*args):
    return _BACKENDS[_active].integrate_region(*args)
