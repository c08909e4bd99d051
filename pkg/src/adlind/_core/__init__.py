"""Backend selection for the RK4 stepping kernel.

The compiled Cython extension is used when available; setting the
environment variable ``ADLIND_PURE_PY=1`` forces the pure-numpy fallback
(useful for debugging and for the backend benchmark).
"""

import os

if os.environ.get("ADLIND_PURE_PY"):
    from ._rk4_py import rk4_propagate

    BACKEND = "python"
else:
    try:
        from ._rk4_cy import rk4_propagate

        BACKEND = "cython"
    except ImportError:  # extension not built
        from ._rk4_py import rk4_propagate

        BACKEND = "python"

__all__ = ["rk4_propagate", "BACKEND"]
