"""Compute-backend selection.

The hot kernels ship in two functionally identical flavors: jit-compiled
(numba) and plain numpy/python.  The RMKIT_NUMBA environment variable picks
one at import time:

  RMKIT_NUMBA=1     require numba (ImportError if missing)
  RMKIT_NUMBA=0     force the pure numpy/python path
  unset / "auto"    use numba when importable, else fall back silently
"""

import os

_FLAG = os.environ.get("RMKIT_NUMBA", "auto").strip().lower()

if _FLAG in ("0", "false", "off", "no"):
    USE_NUMBA = False
elif _FLAG in ("1", "true", "on", "yes"):
    import numba  # noqa: F401

    USE_NUMBA = True
else:
    try:
        import numba  # noqa: F401

        USE_NUMBA = True
    except ImportError:
        USE_NUMBA = False


def backend_name():
    """Name of the active kernel backend: "numba" or "numpy"."""
    return "numba" if USE_NUMBA else "numpy"
