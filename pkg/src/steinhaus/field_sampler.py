"""Phase realizations and intensity fields on the unit torus.

A realization is the array of (2N+1)^d i.i.d. uniform phases; the field is

    S_N(x) = (2N+1)^{-d/2} * sum_n exp(i(theta_n + 2 pi n.x)),   n in [-N, N]^d

and its intensity |S_N(x)|^2 has ensemble mean 1. Every realization is a pure
function of ``(master_seed, index)``, so realizations can be generated in any
order, on any worker, with identical results.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import kernels
from .errors import DomainError, ResourceLimitError

TWO_PI = 2.0 * math.pi
DEFAULT_OVERSAMPLE = 4
DEFAULT_MAX_GRID_VALUES = 2**26

__all__ = [
    "ModelParams",
    "PhaseRealization",
    "IntensityGrid",
    "sample_phases",
    "intensity_at",
    "intensity_grid",
    "sup_intensity",
    "appendix_bound",
]


@dataclass(frozen=True)
class ModelParams:
    """Full configuration of one experiment point.

    Attributes
    ----------
    d : int
        Torus dimension, 1 to 3.
    N : int
        Mode cutoff; modes run over [-N, N]^d.
    g : float
        Gain in exp(g |S_N|^2).
    oversample : int
        Grid points per dimension are ``oversample * (2N+1)``.
    master_seed : int
        Unsigned 64-bit seed shared by all realizations.
    """

    d: int = 1
    N: int = 0
    g: float = 0.5
    oversample: int = DEFAULT_OVERSAMPLE
    master_seed: int = 0

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise DomainError(f"d must be 1, 2 or 3, got {self.d}")
        if int(self.N) != self.N or self.N < 0:
            raise DomainError(f"N must be a non-negative integer, got {self.N}")
        if not (math.isfinite(self.g) and self.g > 0):
            raise DomainError(f"g must be a positive finite number, got {self.g}")
        if int(self.oversample) != self.oversample or self.oversample < 1:
            raise DomainError(f"oversample must be an integer >= 1, got {self.oversample}")
        if not 0 <= self.master_seed < 2**64:
            raise DomainError("master_seed must fit in an unsigned 64-bit integer")

    @property
    def side(self) -> int:
        return 2 * self.N + 1

    @property
    def n_modes(self) -> int:
        return self.side**self.d

    @property
    def m_grid(self) -> int:
        return self.oversample * self.side


@dataclass(frozen=True)
class PhaseRealization:
    d: int
    N: int
    index: int
    theta: np.ndarray = field(repr=False)

    @property
    def n_modes(self) -> int:
        return self.theta.size


@dataclass(frozen=True)
class IntensityGrid:
    d: int
    N: int
    m_grid: int
    values: np.ndarray = field(repr=False)


def _stream(master_seed: int, index: int) -> np.random.Generator:
    # SeedSequence hashes (entropy, spawn_key) into independent PCG64 states
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(index,))
    return np.random.Generator(np.random.PCG64(seq))


def sample_phases(params: ModelParams, index: int) -> PhaseRealization:
    """Draw realization ``index`` of the phases, flattened in row-major mode order."""
    if index < 0:
        raise DomainError("realization index must be non-negative")
    rng = _stream(params.master_seed, index)
    theta = TWO_PI * rng.random(params.n_modes)
    # 2*pi*u can round up to 2*pi for u within one ulp of 1
    np.minimum(theta, np.nextafter(TWO_PI, 0.0), out=theta)
    theta.flags.writeable = False
    return PhaseRealization(d=params.d, N=params.N, index=index, theta=theta)


def intensity_at(phases: PhaseRealization, x) -> float:
    """|S_N(x)|^2 by direct summation over all modes."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.size != phases.d:
        raise DomainError(f"point has {x.size} coordinates, torus has {phases.d}")
    return float(kernels.direct_intensity(phases.theta, phases.N, phases.d, x[None, :])[0])


def intensity_at_points(phases: PhaseRealization, points) -> np.ndarray:
    """Vectorised :func:`intensity_at` over the rows of ``points``."""
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    return kernels.direct_intensity(phases.theta, phases.N, phases.d, points)


def intensity_grid(
    phases: PhaseRealization,
    oversample: int = DEFAULT_OVERSAMPLE,
    max_values: int = DEFAULT_MAX_GRID_VALUES,
) -> IntensityGrid:
    """Intensity on the grid x_j = j / M_grid by a zero-padded inverse FFT.

    ``M_grid = oversample * (2N+1)`` per dimension. With ``M_grid >= 2N+1`` the
    harmonics are orthogonal on the grid and the grid mean is exactly 1.
    """
    if int(oversample) != oversample or oversample < 1:
        raise DomainError("oversample must be an integer >= 1")
    d, N = phases.d, phases.N
    side = 2 * N + 1
    m_grid = oversample * side
    if m_grid**d > max_values:
        raise ResourceLimitError(
            f"grid of {m_grid}^{d} values exceeds the budget of {max_values}"
        )
    coeffs = np.zeros((m_grid,) * d, dtype=np.complex128)
    wrap = np.arange(-N, N + 1) % m_grid
    coeffs[np.ix_(*([wrap] * d))] = np.exp(1j * phases.theta.reshape((side,) * d))
    # ifftn carries a 1/M_grid^d factor
    s = np.fft.ifftn(coeffs) * (m_grid**d / math.sqrt(side**d))
    values = s.real**2 + s.imag**2
    return IntensityGrid(d=d, N=N, m_grid=m_grid, values=values)


def sup_intensity(grid: IntensityGrid) -> float:
    """Largest grid value; a lower bound on the continuum supremum."""
    if grid.values.size == 0:
        raise DomainError("empty grid")
    return float(grid.values.max())


def appendix_bound(N: int, d: int, alpha: float) -> float:
    """Intensity threshold 2 (2N+1)^{d(2 alpha - 1)} for 1/2 < alpha <= 1.

    This is the square of the modulus bound sqrt(2) (2N+1)^{d(alpha - 1/2)}
    that the supremum eventually stays below almost surely.
    """
    if not 0.5 < alpha <= 1.0:
        raise DomainError(f"alpha must lie in (1/2, 1], got {alpha}")
    return 2.0 * float(2 * N + 1) ** (d * (2.0 * alpha - 1.0))
