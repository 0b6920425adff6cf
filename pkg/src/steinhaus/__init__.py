"""Numerical laboratory for E_N(x, g) = exp(g |S_N(x)|^2), S_N a Steinhaus series.

Modules
-------
special_functions
    ln I0 and I1/I0 in log-safe form.
moment_theory
    Exact and Laplace-asymptotic ensemble mean gain.
field_sampler
    Phase realizations and FFT-synthesised intensity grids.
diagnostics
    Spatial moments, intermittency chain, ergodic ratio.
reference_oracles
    Enumeration, series and Monte Carlo cross-checks.
experiments, cli
    Configured scans and CSV output.
"""

__version__ = "0.1.0"

from .field_sampler import ModelParams, sample_phases, intensity_grid  # noqa: E402
from .moment_theory import mean_gain_exact, saddle_point  # noqa: E402
from .kernels import BACKEND  # noqa: E402

__all__ = [
    "__version__",
    "BACKEND",
    "ModelParams",
    "sample_phases",
    "intensity_grid",
    "mean_gain_exact",
    "saddle_point",
]
