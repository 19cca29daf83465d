"""Selects the evaluation kernel at import time.

The compiled extension ``_ckernel`` is used when it was built; otherwise the
pure-Python ``_pykernel``.  Setting ``LAMSHIFT_PURE_PYTHON=1`` forces the
fallback.
"""

import os

from . import _pykernel

if os.environ.get("LAMSHIFT_PURE_PYTHON"):
    _impl = _pykernel
else:
    try:
        from . import _ckernel as _impl
    except ImportError:
        _impl = _pykernel

NAME = "cython" if _impl is not _pykernel else "python"
run = _impl.run
