"""Kernel selection: the compiled extension when importable, else numpy.

Set ``HYPERLP_PURE_PYTHON=1`` to force the fallback.
"""
import logging
import os

from hyperlp import _fallback

log = logging.getLogger(__name__)

if os.environ.get("HYPERLP_PURE_PYTHON", "") not in ("", "0"):
    kernels = _fallback
else:
    try:
        from hyperlp import _kernels as kernels
    except ImportError:  # extension not built
        log.debug("compiled kernels unavailable; using numpy fallback")
        kernels = _fallback

BACKEND = "python" if kernels is _fallback else "cython"
