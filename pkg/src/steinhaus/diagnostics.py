"""Spatial statistics of E(x) = exp(g I(x)) on a single realization.

All spatial integrals are grid means (the torus has unit volume) and are kept
in log scale: ``log_m[p] = ln mean_x exp(g p I(x))``. Because
E(x, g)^p = E(x, g p), every moment is a first moment at a scaled gain.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import kernels
from .errors import DomainError, UsageError
from .field_sampler import (
    DEFAULT_MAX_GRID_VALUES,
    IntensityGrid,
    PhaseRealization,
    intensity_grid,
)
from .moment_theory import MomentReport

DEFAULT_P_MAX = 4
P_MAX_LIMIT = 8
REFINE_TOL = 0.01
MAX_OVERSAMPLE = 256

__all__ = [
    "SpatialMoments",
    "ChainReport",
    "spatial_moments",
    "chain_ratios",
    "ergodic_ratio_log",
    "exceedance_volume",
    "exceedance_level",
    "markov_log_bound",
    "quantile_threshold",
    "mass_concentration",
    "refinement_change",
    "resolved_grid",
    "chain_report",
]


@dataclass(frozen=True)
class SpatialMoments:
    """``log_m[p]`` for p = 0..p_max; ``log_m[0] = 0`` (mean of 1)."""

    g: float
    p_max: int
    log_m: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class ChainReport:
    N: int
    index: int
    L: np.ndarray
    log_ergodic_ratio: float
    exceedance: np.ndarray
    markov_log_bound: np.ndarray
    concentration: np.ndarray


def spatial_moments(grid: IntensityGrid, g: float, p_max: int = DEFAULT_P_MAX,
                    p_limit: int = P_MAX_LIMIT) -> SpatialMoments:
    if not 1 <= p_max <= p_limit:
        raise DomainError(f"p_max must lie in [1, {p_limit}], got {p_max}")
    log_m = np.zeros(p_max + 1)
    for p in range(1, p_max + 1):
        log_m[p] = kernels.log_mean_exp(grid.values, g * p)
    return SpatialMoments(g=float(g), p_max=p_max, log_m=log_m)


def chain_ratios(moments: SpatialMoments) -> np.ndarray:
    """L[p] = log_m[p+1]/(p+1) - log_m[p]/p for p = 1..p_max-1 (index p-1).

    Non-negative by the power-mean inequality.
    """
    p = np.arange(1, moments.p_max)
    return moments.log_m[2:] / (p + 1) - moments.log_m[1:-1] / p


def ergodic_ratio_log(moments: SpatialMoments, report: MomentReport) -> float:
    """Log of (spatial mean of E) / (ensemble mean of E)."""
    if moments.g != float(report.params.g):
        raise UsageError(f"moments use g={moments.g}, report uses g={report.params.g}")
    return float(moments.log_m[1] - report.log_mean_gain)


def exceedance_volume(grid: IntensityGrid, g: float, log_f: float) -> float:
    """Fraction of grid nodes where g I(x) > log_f, i.e. E(x) > f."""
    return float(np.count_nonzero(g * grid.values > log_f)) / grid.values.size


def markov_log_bound(moments: SpatialMoments, p: int, log_f: float) -> float:
    """Log of the Markov bound mean(E^{p-1}) / f^{p-1} on the exceedance volume."""
    return float(moments.log_m[p - 1] - (p - 1) * log_f)


def quantile_threshold(grid: IntensityGrid, g: float, level: float) -> float:
    """``level``-quantile of g I(x) over the grid nodes (a log-threshold)."""
    return float(g * np.quantile(grid.values, level))


def mass_concentration(grid: IntensityGrid, g: float, p: int, q: float) -> float:
    """Smallest volume fraction carrying a share ``q`` of the mass of E^p.

    Nodes are taken in decreasing order of intensity; weights are
    exp(g p (I - max I)) so no overflow occurs.
    """
    if not 0.0 < q < 1.0:
        raise DomainError(f"q must lie in (0, 1), got {q}")
    a = np.sort(grid.values.ravel())[::-1] * (g * p)
    w = np.exp(a - a[0])
    cum = np.cumsum(w)
    k = int(np.searchsorted(cum, q * cum[-1], side="left")) + 1
    return min(k, a.size) / a.size


def refinement_change(phases: PhaseRealization, g: float, p: int, oversample: int) -> float:
    """Relative change of mean E^p when the grid oversampling is doubled.

    E^p is not band-limited, so grid means only approximate the torus
    integral; a change above 1% signals an under-resolved grid.
    """
    coarse = kernels.log_mean_exp(intensity_grid(phases, oversample).values, g * p)
    fine = kernels.log_mean_exp(intensity_grid(phases, 2 * oversample).values, g * p)
    return abs(math.expm1(fine - coarse))


def exceedance_level(p: int) -> float:
    """Quantile level of the threshold used with order p: 1 - 10^-p."""
    return 1.0 - 10.0 ** (-p)


def resolved_grid(phases: PhaseRealization, g: float, p_max: int = DEFAULT_P_MAX,
                  oversample: int = 4, rel_tol: float = REFINE_TOL,
                  max_values: int = DEFAULT_MAX_GRID_VALUES):
    """Grid on which every mean E^p, p <= p_max, is stable to ``rel_tol``.

    Oversampling doubles from ``oversample`` until one more doubling moves no
    moment by more than ``rel_tol`` (relative), or until the next grid would
    exceed ``max_values`` or ``MAX_OVERSAMPLE``.

    Returns
    -------
    grid : IntensityGrid
        The finest grid computed.
    change : float
        Largest relative moment change at the last doubling; ``inf`` if no
        doubling fit in the budget.
    """
    side = 2 * phases.N + 1
    c = oversample
    grid = intensity_grid(phases, c, max_values)
    log_m = spatial_moments(grid, g, p_max).log_m
    change = math.inf
    while 2 * c <= MAX_OVERSAMPLE and (2 * c * side) ** phases.d <= max_values:
        c *= 2
        fine = intensity_grid(phases, c, max_values)
        fine_m = spatial_moments(fine, g, p_max).log_m
        change = float(np.max(np.abs(np.expm1(fine_m - log_m))))
        grid, log_m = fine, fine_m
        if change <= rel_tol:
            break
    return grid, change


def chain_report(grid: IntensityGrid, phases_index: int, g: float, report: MomentReport,
                 p_max: int = DEFAULT_P_MAX, q: float = 0.9) -> ChainReport:
    """Every per-realization observable used by the chain scan."""
    moments = spatial_moments(grid, g, p_max)
    orders = range(1, p_max)
    exceed, bound, conc = [], [], []
    for p in orders:
        log_f = quantile_threshold(grid, g, exceedance_level(p))
        exceed.append(exceedance_volume(grid, g, log_f))
        bound.append(markov_log_bound(moments, p, log_f))
        conc.append(mass_concentration(grid, g, p, q))
    return ChainReport(
        N=grid.N,
        index=phases_index,
        L=chain_ratios(moments),
        log_ergodic_ratio=ergodic_ratio_log(moments, report),
        exceedance=np.array(exceed),
        markov_log_bound=np.array(bound),
        concentration=np.array(conc),
    )
