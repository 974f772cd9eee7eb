"""Kernel backend selection.

The compiled module is preferred when it was built; setting the environment
variable ``SPARSELAD_PURE_PYTHON=1`` (before import) forces the numpy
fallback. ``BACKEND`` reports which one is active.
"""

import os

BACKEND = "python"

if not os.environ.get("SPARSELAD_PURE_PYTHON"):
    try:
        from ._fast import hard_threshold, kth_smallest, trunc_l1_stats  # noqa: F401
        BACKEND = "cython"
    except ImportError:
        pass

if BACKEND == "python":
    from .fallback import hard_threshold, kth_smallest, trunc_l1_stats  # noqa: F401

__all__ = ["BACKEND", "hard_threshold", "kth_smallest", "trunc_l1_stats"]
