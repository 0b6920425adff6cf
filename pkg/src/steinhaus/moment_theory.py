r"""Ensemble average of exp(g |S_N|^2): exact quadrature and Laplace asymptotics.

With M = (2N+1)^d modes and the rate function

.. math:: f_g(u) = u - \ln I_0(2\sqrt{g u}),

the ensemble average is the one-dimensional integral

.. math:: \langle E_N(g) \rangle = M \int_0^\infty e^{-M f_g(u)}\, du .

For g < 1 the minimum of f_g sits at the boundary u = 0 and the average stays
below 1/(1-g). For g > 1 f_g has a unique interior minimum u0 with
f_g(u0) = -gamma_g < 0, and the average grows like
sqrt(2 pi / f_g''(u0)) M^{1/2} exp(gamma_g M).

Everything is carried in log scale; ``mean_gain_exact`` shifts the exponent by
its minimum before integrating so that M in the thousands does not overflow.
"""

from dataclasses import dataclass
import math
from typing import Optional

import numpy as np

from . import kernels
from .errors import DomainError
from .field_sampler import ModelParams
from .quadrature import integrate
from .special_functions import bessel_ratio

SUBCRITICAL = "subcritical"
CRITICAL = "critical"
SUPERCRITICAL = "supercritical"

TAIL_FRACTION = 1e-14

__all__ = [
    "SUBCRITICAL",
    "CRITICAL",
    "SUPERCRITICAL",
    "SaddleData",
    "MomentReport",
    "rate_function",
    "rate_function_derivative",
    "rate_function_second_derivative",
    "saddle_point",
    "mean_gain_exact",
    "mean_gain_asymptotic",
    "classify_regime",
]


@dataclass(frozen=True)
class SaddleData:
    """Interior minimum of f_g for g > 1.

    ``gamma_g = -f_g(u0)`` is the exponential growth rate of the ensemble
    average per mode, ``f2_u0`` the curvature f_g''(u0).
    """

    g: float
    u0: float
    gamma_g: float
    f2_u0: float


@dataclass(frozen=True)
class MomentReport:
    params: ModelParams
    log_mean_gain: float
    upper_bound_log: float
    asymptotic_log: Optional[float]
    regime: str
    quadrature_error: float = 0.0


def _check_g(g):
    if not (math.isfinite(g) and g > 0):
        raise DomainError(f"gain must be positive and finite, got {g}")


def rate_function(g: float, u):
    """f_g(u) = u - ln I0(2 sqrt(g u)); scalar or array ``u``."""
    _check_g(g)
    arr = np.asarray(u, dtype=np.float64)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise DomainError("u must be finite and non-negative")
    out = kernels.rate_function(float(g), arr)
    return float(out) if arr.ndim == 0 else out


def rate_function_derivative(g: float, u: float) -> float:
    """f_g'(u) = 1 - sqrt(g/u) I1/I0(2 sqrt(g u)).

    At ``u == 0`` the analytic limit ``1 - g`` is returned.
    """
    _check_g(g)
    if not (math.isfinite(u) and u >= 0):
        raise DomainError("u must be finite and non-negative")
    if u == 0.0:
        return 1.0 - g
    return 1.0 - math.sqrt(g / u) * bessel_ratio(2.0 * math.sqrt(g * u))


def rate_function_second_derivative(g: float, u: float) -> float:
    """Analytic f_g''(u) via R' = 1 - R/x - R^2 with R = I1/I0.

    Loses digits to cancellation as u -> 0, where the limit is g^2/2; used only
    to steer Newton steps and as a cross-check.
    """
    if u == 0.0:
        return 0.5 * g * g
    r = bessel_ratio(2.0 * math.sqrt(g * u))
    return math.sqrt(g) * r / u**1.5 - (g / u) * (1.0 - r * r)


def saddle_point(g: float, tol: float = 1e-14) -> SaddleData:
    """Locate the minimiser of f_g for g > 1 by bracketed Newton iteration.

    The bracket starts as (0, max(4g, 10)); f_g' is 1 - g < 0 at the left end
    and positive at the right. A Newton step that leaves the bracket is
    replaced by bisection. The curvature is a central difference of f_g' with
    step ``max(1e-6, 1e-6 * u0)`` (halved until it fits inside (0, 2 u0)).
    """
    _check_g(g)
    if g <= 1.0:
        raise DomainError(f"f_g has no interior minimum for g <= 1 (g={g})")
    if not tol >= 1e-14:
        raise DomainError("tol must be at least 1e-14")

    lo, hi = 0.0, max(4.0 * g, 10.0)
    if rate_function_derivative(g, hi) <= 0:
        raise RuntimeError(f"f_g' does not change sign on (0, {hi})")
    # small-u expansion f ~ (1-g)u + g^2 u^2/4 puts the minimum near 2(g-1)/g^2
    u = min(2.0 * (g - 1.0) / (g * g), 0.5 * hi) if g < 2.0 else g - 1.0
    for _ in range(200):
        fp = rate_function_derivative(g, u)
        if fp == 0.0:
            break
        if fp < 0:
            lo = u
        else:
            hi = u
        fpp = rate_function_second_derivative(g, u)
        nxt = u - fp / fpp if fpp > 0 else math.nan
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi) if lo == 0.0 or hi < 4.0 * lo else math.sqrt(lo * hi)
        if abs(nxt - u) <= 2e-16 * u:
            u = nxt
            break
        u = nxt
    fp = rate_function_derivative(g, u)
    if abs(fp) > tol:
        raise RuntimeError(f"saddle solve stalled at u={u!r} with f'={fp:.3g}")

    h = max(1e-6, 1e-6 * u)
    while h >= u:
        h *= 0.5
    f2 = (rate_function_derivative(g, u + h) - rate_function_derivative(g, u - h)) / (2.0 * h)
    return SaddleData(g=float(g), u0=u, gamma_g=-rate_function(g, u), f2_u0=f2)


def classify_regime(g: float) -> str:
    if g < 1.0:
        return SUBCRITICAL
    if g == 1.0:
        return CRITICAL
    return SUPERCRITICAL


def _upper_cutoff(g, M, gamma, start):
    # f_g(u) >= u - 2 sqrt(g u) >= u/2 for u >= 16 g, so the shifted
    # integrand beyond U is bounded by exp(-M (u/2 - gamma))
    U = max(16.0 * g, start, 2.0 * gamma + 2.0 * (40.0 + math.log(2.0 / M)) / M)
    return U


def _tail_bound(M, gamma, U):
    return (2.0 / M) * math.exp(-M * (0.5 * U - gamma))


def mean_gain_exact(params: ModelParams, rtol: float = 1e-10) -> MomentReport:
    """ln <E_N(g)> from the one-dimensional integral, with bounds and asymptotics.

    The integrand exp(-M (f_g(u) - min f_g)) is integrated on panels split at
    its peak (u = 0 for g <= 1, u = u0 for g > 1) and at multiples of the peak
    width, up to a cutoff whose tail is provably below ``TAIL_FRACTION`` of
    the integral.
    """
    g = float(params.g)
    M = float(params.n_modes)
    regime = classify_regime(g)

    saddle = None
    if g > 1.0:
        saddle = saddle_point(g)
        gamma, peak = saddle.gamma_g, saddle.u0
        width = 1.0 / math.sqrt(M * saddle.f2_u0)
    else:
        gamma, peak = 0.0, 0.0
        # boundary layer: linear decay rate M(1-g), quadratic M/4 at g = 1
        width = 1.0 / (M * (1.0 - g) + math.sqrt(M) / 2.0)

    def integrand(u):
        return np.exp(-M * (kernels.rate_function(g, u) + gamma))

    pts = {0.0, peak}
    for k in (1.0, 3.0, 10.0, 30.0, 100.0):
        pts.update(x for x in (peak - k * width, peak + k * width) if x > 0)

    U = _upper_cutoff(g, M, gamma, max(pts) * 2.0)
    while True:
        value, err = integrate(integrand, sorted(pts | {U}), rtol=rtol)
        if value > 0 and _tail_bound(M, gamma, U) <= TAIL_FRACTION * value:
            break
        U *= 2.0
        if U > 1e12:
            raise RuntimeError("could not bound the quadrature tail")

    log_mean = math.log(M) + M * gamma + math.log(value)
    if g < 1.0:
        upper = -math.log1p(-g)
    else:
        upper = math.inf
    asym = mean_gain_asymptotic(params, saddle) if saddle is not None else None
    return MomentReport(
        params=params,
        log_mean_gain=log_mean,
        upper_bound_log=upper,
        asymptotic_log=asym,
        regime=regime,
        quadrature_error=err / value,
    )


def mean_gain_asymptotic(params: ModelParams, saddle: SaddleData) -> float:
    """Log of the Laplace approximant sqrt(2 pi / f''(u0)) M^{1/2} exp(gamma_g M)."""
    if params.g <= 1.0:
        raise DomainError("the Laplace approximant applies only for g > 1")
    if saddle.g != params.g:
        raise DomainError(f"saddle computed for g={saddle.g}, params have g={params.g}")
    M = params.n_modes
    return (
        saddle.gamma_g * M
        + 0.5 * params.d * math.log(params.side)
        + 0.5 * math.log(2.0 * math.pi / saddle.f2_u0)
    )
