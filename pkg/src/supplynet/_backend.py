"""Kernel backend selection.

The compiled extension is preferred. Set ``SUPPLYNET_PURE_PYTHON=1`` to force
the numpy fallback (used by the test-suite to cross-check both paths).
"""

from __future__ import annotations

import logging
import os

from . import _pykernels

log = logging.getLogger(__name__)

BACKENDS = {"python": _pykernels}
try:
    from . import _ckernels
except ImportError:  # pragma: no cover - depends on build environment
    _ckernels = None
else:
    BACKENDS["cython"] = _ckernels

if os.environ.get("SUPPLYNET_PURE_PYTHON", "") not in ("", "0") or _ckernels is None:
    BACKEND = "python"
else:
    BACKEND = "cython"

kernels = BACKENDS[BACKEND]
log.debug("supplynet kernel backend: %s", BACKEND)


def get(name: str | None = None):
    """Kernel module by name; ``None`` returns the active backend."""
    return kernels if name is None else BACKENDS[name]


def use(name: str) -> None:
    """Switch the active backend for this process."""
    global kernels, BACKEND
    if name not in BACKENDS:
        raise ValueError(f"backend {name!r} is not available; have {sorted(BACKENDS)}")
    BACKEND = name
    kernels = BACKENDS[name]
