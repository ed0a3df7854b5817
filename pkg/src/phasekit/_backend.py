"""Kernel backend selection: numba-jitted loops or pure numpy.

The default backend is "numba" when numba imports cleanly, otherwise
"numpy".  Set the environment variable ``PHASEKIT_BACKEND`` to ``numpy``
or ``numba`` before import to force a choice.  ``set_backend`` switches
at runtime (useful in tests and benchmarks).
"""

from __future__ import annotations

import os

try:
    import numba  # noqa: F401

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

_VALID = ("numba", "numpy")


def _resolve_default() -> str:
    choice = os.environ.get("PHASEKIT_BACKEND", "").strip().lower()
    if choice:
        if choice not in _VALID:
            raise ValueError(f"PHASEKIT_BACKEND must be one of {_VALID}, got {choice!r}")
        if choice == "numba" and not HAS_NUMBA:
            raise ImportError("PHASEKIT_BACKEND=numba requested but numba is not installed")
        return choice
    return "numba" if HAS_NUMBA else "numpy"


_ACTIVE = _resolve_default()


def active_backend() -> str:
    """Name of the backend currently used for hot kernels."""
    return _ACTIVE


def set_backend(name: str) -> str:
    """Switch the kernel backend; returns the previous one."""
    global _ACTIVE
    if name not in _VALID:
        raise ValueError(f"backend must be one of {_VALID}, got {name!r}")
    if name == "numba" and not HAS_NUMBA:
        raise ImportError("numba backend requested but numba is not installed")
    previous = _ACTIVE
    _ACTIVE = name
    return previous
