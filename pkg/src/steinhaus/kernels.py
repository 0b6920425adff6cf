"""Backend selection for the hot kernels.

The compiled extension is used when importable; set ``STEINHAUS_PURE_PYTHON=1``
to force the numpy fallback. ``BACKEND`` names the active one.
"""

import os

from . import _pykernels

if os.environ.get("STEINHAUS_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels
        BACKEND = "python"
    else:
        BACKEND = "cython"

log_i0 = _impl.log_i0
bessel_ratio = _impl.bessel_ratio
rate_function = _impl.rate_function
direct_intensity = _impl.direct_intensity
log_mean_exp = _impl.log_mean_exp

__all__ = [
    "BACKEND",
    "log_i0",
    "bessel_ratio",
    "rate_function",
    "direct_intensity",
    "log_mean_exp",
]
