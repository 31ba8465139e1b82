"""Select the elimination kernel at import time.

The compiled extension is used when it was built and ``DUALIS_PURE_PYTHON``
is not set to ``1``.  An int64 overflow inside the compiled kernel reruns the
same rows through the arbitrary-precision Python kernel.
"""

import os

from . import _kernels_py

try:
    if os.environ.get("DUALIS_PURE_PYTHON") == "1":
        raise ImportError("pure Python requested")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"


def echelon(rows, ncols):
    if _compiled is not None:
        try:
            return _compiled.echelon(rows, ncols)
        except OverflowError:
            pass
    return _kernels_py.echelon(rows, ncols)
