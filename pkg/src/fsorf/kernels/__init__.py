"""Series-kernel selection: compiled extension if built, pure Python otherwise.

Set ``FSORF_PURE_PYTHON=1`` to force the fallback (used by the benchmark and
by parity tests).  ``IMPL`` names the active implementation.
"""

import os

OK = 0
NO_CONVERGENCE = 1
PREFACTOR_POLE = 2

if os.environ.get("FSORF_PURE_PYTHON", "").strip() in ("1", "true", "yes"):
    from . import _series_py as _impl
    IMPL = "python"
else:
    try:
        from . import _series_cy as _impl
        IMPL = "compiled"
    except ImportError:
        from . import _series_py as _impl
        IMPL = "python"

meijer_slater = _impl.meijer_slater
hyp2f1_series = _impl.hyp2f1_series
hyp1f1_series = _impl.hyp1f1_series
DD_EPS = _impl.DD_EPS
