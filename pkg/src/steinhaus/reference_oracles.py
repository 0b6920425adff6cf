"""Brute-force cross-checks for the ensemble mean gain.

Three routes to <exp(g |S|^2)> that share no code with the quadrature:

* exact Steinhaus moments E|sum_j e^{i theta_j}|^{2k} by enumeration, in
  Python integers;
* the power series sum_k g^k/(k! M^k) E|sum_j e^{i theta_j}|^{2k} (g < 1 only);
* Monte Carlo over independent phase draws, at the single point x = 0.
"""

from dataclasses import dataclass
from collections import Counter
import itertools
import math

import numpy as np

from .errors import DomainError, ResourceLimitError
from .field_sampler import ModelParams, sample_phases

MAX_COMPOSITIONS = 2_000_000
MAX_TUPLES = 2_000_000
SERIES_TAIL = 1e-12
MC_MIN_REALIZATIONS = 1000

__all__ = [
    "MomentTable",
    "SeriesResult",
    "MonteCarloEstimate",
    "steinhaus_abs_moment",
    "steinhaus_abs_moment_tuples",
    "moment_table",
    "series_mean_gain",
    "mc_mean_gain",
]


@dataclass(frozen=True)
class MomentTable:
    M: int
    k_max: int
    moments: tuple


@dataclass(frozen=True)
class SeriesResult:
    value: float
    tail_bound: float
    k_max: int


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    std_error: float
    realizations: int
    heavy_tail_warning: bool


def _compositions(k, M):
    # all (k_1..k_M) with k_j >= 0 summing to k, via stars and bars
    for bars in itertools.combinations(range(k + M - 1), M - 1):
        prev = -1
        parts = []
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(k + M - 1 - prev - 1)
        yield parts


def steinhaus_abs_moment(M: int, k: int) -> int:
    """E|sum_{j=1}^M e^{i theta_j}|^{2k} as an exact integer.

    Sums the squared multinomial coefficients over all compositions of k into
    M parts; a term survives the phase average only when the two index
    multisets coincide.
    """
    if M < 1 or k < 0:
        raise DomainError("need M >= 1 and k >= 0")
    if math.comb(k + M - 1, M - 1) > MAX_COMPOSITIONS:
        raise ResourceLimitError(f"enumeration of compositions of {k} into {M} parts too large")
    fk = math.factorial(k)
    total = 0
    for parts in _compositions(k, M):
        c = fk
        for part in parts:
            c //= math.factorial(part)
        total += c * c
    return total


def steinhaus_abs_moment_tuples(M: int, k: int, order=None) -> int:
    """Same moment by enumerating all M^k index tuples.

    Each tuple n contributes the number of tuples m that are rearrangements
    of it. ``order`` relabels the modes before enumeration; the result must
    not depend on it.
    """
    if M < 1 or k < 0:
        raise DomainError("need M >= 1 and k >= 0")
    if M**k > MAX_TUPLES:
        raise ResourceLimitError(f"{M}^{k} tuples exceed the enumeration budget")
    labels = list(order) if order is not None else list(range(M))
    fk = math.factorial(k)
    total = 0
    for tup in itertools.product(labels, repeat=k):
        c = fk
        for mult in Counter(tup).values():
            c //= math.factorial(mult)
        total += c
    return total


def moment_table(M: int, k_max: int) -> MomentTable:
    return MomentTable(M=M, k_max=k_max,
                       moments=tuple(steinhaus_abs_moment(M, k) for k in range(k_max + 1)))


def series_mean_gain(M: int, g: float, k_max: int = None) -> SeriesResult:
    """Power series for <exp(g |S|^2)> with M modes, g < 1.

    Since |S|^2 <= M, consecutive moments satisfy m_{k+1} <= M^2 m_k, so the
    ratio of term k+1 to term k is at most g M/(k+1); the tail beyond k_max is
    bounded by a geometric series in that ratio. Without ``k_max`` terms are
    added until the bound drops below ``SERIES_TAIL`` of the sum.
    """
    if M < 1:
        raise DomainError("need M >= 1")
    if not 0.0 <= g < 1.0:
        raise DomainError(f"series route requires 0 <= g < 1, got {g}")
    fixed = k_max is not None
    limit = k_max if fixed else 400
    terms = []
    tail = math.inf
    for k in range(limit + 1):
        mk = steinhaus_abs_moment(M, k)
        # integer ratio m_k / (k! M^k) is rounded once, then scaled
        terms.append(g**k * (mk / (math.factorial(k) * M**k)))
        rho = g * M / (k + 1)
        tail = terms[-1] * rho / (1.0 - rho) if rho < 1.0 else math.inf
        if not fixed and tail <= SERIES_TAIL * math.fsum(terms):
            break
    return SeriesResult(value=math.fsum(terms), tail_bound=tail, k_max=len(terms) - 1)


def _exp_gain_at_origin(params, index):
    theta = sample_phases(params, index).theta
    s = np.exp(1j * theta).sum()
    return math.exp(params.g * (s.real * s.real + s.imag * s.imag) / theta.size)


def mc_mean_gain(params: ModelParams, R: int) -> MonteCarloEstimate:
    """Sample mean and standard error of exp(g |S_N(0)|^2) over R phase draws.

    Realization r uses the same (master_seed, r) stream as every other
    consumer. For g > 1 the distribution is heavy-tailed on the scale of the
    sample and the standard error is flagged as unreliable.
    """
    if R < MC_MIN_REALIZATIONS:
        raise DomainError(f"need at least {MC_MIN_REALIZATIONS} realizations, got {R}")
    samples = np.fromiter((_exp_gain_at_origin(params, r) for r in range(R)),
                          dtype=np.float64, count=R)
    mean = float(samples.mean())
    se = float(samples.std(ddof=1) / math.sqrt(R))
    return MonteCarloEstimate(
        mean=mean,
        std_error=se,
        realizations=R,
        heavy_tail_warning=params.g > 1.0 and params.n_modes > 1,
    )
