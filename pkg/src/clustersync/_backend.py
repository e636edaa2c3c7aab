"""Kernel backend selection.

The compiled extension is used when importable unless ``CLUSTERSYNC_BACKEND``
is set to ``python``. Callers can also request a backend per call through
:func:`get_kernels`.
"""
import os

from . import _pykernels

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

HAVE_COMPILED = _compiled is not None

_requested = os.environ.get("CLUSTERSYNC_BACKEND", "auto").lower()
if _requested not in ("auto", "compiled", "python"):
    raise ImportError(f"CLUSTERSYNC_BACKEND must be auto, compiled or python, got {_requested!r}")
if _requested == "compiled" and not HAVE_COMPILED:
    raise ImportError("CLUSTERSYNC_BACKEND=compiled but clustersync._kernels is not built")

DEFAULT_BACKEND = "compiled" if (HAVE_COMPILED and _requested != "python") else "python"


def available_backends():
    return ("compiled", "python") if HAVE_COMPILED else ("python",)


def resolve(backend=None):
    """Map ``None``/``"auto"`` to the default and validate explicit names."""
    if backend in (None, "auto"):
        return DEFAULT_BACKEND
    if backend not in ("compiled", "python"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "compiled" and not HAVE_COMPILED:
        raise RuntimeError("compiled backend requested but clustersync._kernels is not built")
    return backend


def get_kernels(backend=None):
    return _compiled if resolve(backend) == "compiled" else _pykernels
