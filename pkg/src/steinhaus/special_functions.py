r"""Log-scale modified Bessel functions of order zero and one.

Two regimes, switched at ``x = SERIES_CUTOFF``:

* ascending series :math:`I_0(x) = \sum_k (x/2)^{2k}/(k!)^2` below the cutoff,
  with :math:`\ln I_0` taken through ``log1p`` so small arguments keep full
  relative accuracy;
* the large-argument expansion
  :math:`\ln I_0(x) = x - \tfrac12\ln(2\pi x) + \ln(1 + 1/(8x) + 9/(128x^2) + \dots)`
  above it, truncated at its smallest term.

Only :math:`\ln I_0` and :math:`I_1/I_0` are exposed; :math:`I_0` itself
overflows near ``x = 710``.
"""

from dataclasses import dataclass
import numpy as np

from . import kernels
from ._pykernels import SERIES_CUTOFF
from .errors import DomainError

__all__ = ["BesselEval", "SERIES_CUTOFF", "log_bessel_i0", "bessel_ratio", "evaluate"]


@dataclass(frozen=True)
class BesselEval:
    x: float
    log_i0: float
    ratio_i1_i0: float


def _check(x):
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise DomainError("Bessel argument must be finite")
    if np.any(arr < 0):
        raise DomainError("Bessel argument must be non-negative")
    return arr


def log_bessel_i0(x):
    """Natural log of I0(x) for x >= 0.

    Accepts a scalar or an array; scalars come back as ``float``.
    """
    arr = _check(x)
    out = kernels.log_i0(arr)
    return float(out) if arr.ndim == 0 else out


def bessel_ratio(x):
    """I1(x)/I0(x) for x >= 0, a value in [0, 1)."""
    arr = _check(x)
    out = kernels.bessel_ratio(arr)
    return float(out) if arr.ndim == 0 else out


def evaluate(x: float) -> BesselEval:
    x = float(x)
    return BesselEval(x=x, log_i0=log_bessel_i0(x), ratio_i1_i0=bessel_ratio(x))
