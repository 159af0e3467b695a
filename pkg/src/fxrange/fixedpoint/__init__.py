"""Bit-exact fixed-point twin of the OS-ELM datapath.

The hot probe loop lives in a compiled kernel when the extension built;
otherwise a pure-Python kernel with identical semantics is used.  Set
``FXRANGE_BACKEND=python`` or ``FXRANGE_BACKEND=compiled`` to force one.
"""

import os

from . import _pykernel

_choice = os.environ.get("FXRANGE_BACKEND", "auto")
if _choice == "python":
    kernel = _pykernel
elif _choice == "compiled":
    from . import _kernel as kernel
else:
    try:
        from . import _kernel as kernel
    except ImportError:
        kernel = _pykernel

BACKEND = kernel.BACKEND

from .formats import EventCounters, FxNum, fx_add, fx_div, fx_mul, fx_quantize, fx_sub  # noqa: E402,F401
from .sim import (  # noqa: E402,F401
    FormatWidthError,
    instrumented_op_counts,
    quantize_array,
    run_baseline_method,
    run_fx_training,
)
