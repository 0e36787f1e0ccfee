"""Select the compiled E-step kernels when built, else the numpy fallback.

Set ``SEGAUG_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

try:
    if os.environ.get("SEGAUG_PURE_PYTHON"):
        raise ImportError("pure-python kernels requested")
    from . import _emkernel as _impl
    BACKEND = "cython"
except ImportError:
    _impl = _pykernels
    BACKEND = "python"

em_accumulate = _impl.em_accumulate
loglikelihood = _impl.loglikelihood
row_argmax = _impl.row_argmax
