"""Select the grid-scan backend at import time.

The compiled extension is used when importable; set ``ESPROD_PURE_PYTHON=1``
to force the numpy fallback.
"""

import os

from . import _purepy

NAME = "python"
lookup_sum = _purepy.lookup_sum

if os.environ.get("ESPROD_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _core
    except ImportError:  # extension not built
        pass
    else:
        lookup_sum = _core.lookup_sum
        NAME = "cython"


def default_threads():
    return os.cpu_count() or 1
