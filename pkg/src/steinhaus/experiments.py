"""Experiment configuration, realization fan-out, and CSV tables.

Each ``run_*`` function turns an :class:`ExperimentConfig` into a header and a
list of rows. Per-realization work is a pure function of
``(master_seed, index, params)``; tasks may run on a process pool of any
size, and rows are sorted by realization index before aggregation, so the
output does not depend on the worker count.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
import json
import math
from typing import List, Optional

import numpy as np

from . import kernels
from .diagnostics import chain_report, resolved_grid
from .errors import ConfigError, DomainError
from .field_sampler import (
    DEFAULT_MAX_GRID_VALUES,
    ModelParams,
    appendix_bound,
    intensity_grid,
    sample_phases,
    sup_intensity,
)
from .moment_theory import (
    mean_gain_exact,
    rate_function_derivative,
    saddle_point,
)
from .reference_oracles import mc_mean_gain, series_mean_gain

KINDS = ("mean-gain", "saddle", "scan-ergodicity", "scan-chain", "supnorm", "oracle-check")

HEADERS = {
    "mean-gain": ["d", "N", "g", "log_mean_gain", "upper_bound_log", "asymptotic_log", "regime"],
    "saddle": ["g", "u0", "gamma_g", "f2_u0", "fprime_u0"],
    "scan-ergodicity": ["d", "g", "N", "realization", "log_m1", "log_mean_gain", "log_ratio",
                        "refine_change"],
    "scan-chain": ["d", "g", "N", "realization", "p", "L", "concentration", "exceedance",
                   "markov_log_bound", "refine_change"],
    "supnorm": ["d", "N", "alpha", "realization", "sup_intensity", "bound", "violated"],
    "oracle-check": ["route", "configuration", "value", "tolerance", "pass"],
}

# series route is used only where the enumeration stays cheap
SERIES_MAX_MODES = 9
MC_SIGMAS = 4.0
SERIES_TOL = 1e-8


@dataclass
class ExperimentConfig:
    kind: str = "mean-gain"
    g: List[float] = field(default_factory=lambda: [0.5, 2.0])
    N: List[int] = field(default_factory=lambda: [8, 16, 32, 64, 128])
    d: List[int] = field(default_factory=lambda: [1])
    realizations: int = 20
    p_max: int = 4
    alpha: float = 0.75
    oversample: int = 4
    q: float = 0.9
    mc_realizations: int = 100_000
    master_seed: int = 0
    output: Optional[str] = None

    def validate(self):
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {', '.join(KINDS)}; got {self.kind!r}")
        if not self.g or not self.N or not self.d:
            raise ConfigError("g, N and d must each list at least one value")
        for g in self.g:
            if not (isinstance(g, (int, float)) and math.isfinite(g) and g > 0):
                raise ConfigError(f"every g must be a positive number; got {g!r}")
        for n in self.N:
            if not (isinstance(n, int) and n >= 0):
                raise ConfigError(f"every N must be a non-negative integer; got {n!r}")
        for d in self.d:
            if d not in (1, 2, 3):
                raise ConfigError(f"every d must be 1, 2 or 3; got {d!r}")
        if not (isinstance(self.realizations, int) and self.realizations >= 1):
            raise ConfigError(f"realizations must be an integer >= 1; got {self.realizations!r}")
        if not 0.5 < self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in (1/2, 1]; got {self.alpha!r}")
        if not (isinstance(self.p_max, int) and 1 <= self.p_max <= 8):
            raise ConfigError(f"p_max must be an integer in [1, 8]; got {self.p_max!r}")
        if self.kind == "scan-chain" and self.p_max < 2:
            raise ConfigError("scan-chain needs p_max >= 2 to form chain ratios")
        if not (isinstance(self.oversample, int) and self.oversample >= 1):
            raise ConfigError(f"oversample must be an integer >= 1; got {self.oversample!r}")
        if not 0.0 < self.q < 1.0:
            raise ConfigError(f"q must lie in (0, 1); got {self.q!r}")
        if not (isinstance(self.mc_realizations, int) and self.mc_realizations >= 1000):
            raise ConfigError("mc_realizations must be an integer >= 1000")
        if not (isinstance(self.master_seed, int) and 0 <= self.master_seed < 2**64):
            raise ConfigError("master_seed must be an unsigned 64-bit integer")
        if self.kind in ("scan-ergodicity", "scan-chain", "supnorm"):
            for d in self.d:
                side = self.oversample * (2 * max(self.N) + 1)
                if side**d > DEFAULT_MAX_GRID_VALUES:
                    raise ConfigError(
                        f"N={max(self.N)} in d={d} needs a {side}^{d} grid, above the "
                        f"{DEFAULT_MAX_GRID_VALUES}-value budget; lower N or oversample"
                    )
        return self

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        data = dict(data)
        for key in ("g", "N", "d"):
            if key in data and not isinstance(data[key], list):
                data[key] = [data[key]]
        return cls(**data)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    def params(self, d, N, g):
        return ModelParams(d=d, N=N, g=float(g), oversample=self.oversample,
                           master_seed=self.master_seed)


def fan_out(func, tasks, workers=1):
    """Apply ``func`` to each task, on a process pool when ``workers > 1``."""
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        return [func(t) for t in tasks]
    chunk = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, tasks, chunksize=chunk))


def _median(values):
    return float(np.median(np.asarray(values, dtype=np.float64)))


def median_trend(ns, medians):
    """Monotonicity flags and least-squares slope of medians against ln N."""
    m = np.asarray(medians, dtype=np.float64)
    diffs = np.diff(m)
    slope = float(np.polyfit(np.log(np.asarray(ns, dtype=np.float64)), m, 1)[0]) if len(m) > 1 else 0.0
    return {
        "increasing": bool(np.all(diffs > 0)),
        "decreasing": bool(np.all(diffs < 0)),
        "slope": slope,
    }


# -- per-realization tasks (module level so they pickle) ---------------------


def _ergodicity_task(task):
    params, index = task
    grid, change = resolved_grid(sample_phases(params, index), params.g, 1, params.oversample)
    return index, kernels.log_mean_exp(grid.values, params.g), change


def _chain_task(task):
    params, index, report, p_max, q = task
    grid, change = resolved_grid(sample_phases(params, index), params.g, p_max,
                                 params.oversample)
    return index, chain_report(grid, index, params.g, report, p_max=p_max, q=q), change


def _supnorm_task(task):
    params, index = task
    grid = intensity_grid(sample_phases(params, index), params.oversample)
    return index, sup_intensity(grid)


# -- experiments ------------------------------------------------------------


def run_mean_gain(config, workers=1):
    rows = []
    for d in config.d:
        for N in config.N:
            for g in config.g:
                rep = mean_gain_exact(config.params(d, N, g))
                rows.append([d, N, float(g), rep.log_mean_gain, rep.upper_bound_log,
                             rep.asymptotic_log, rep.regime])
    return HEADERS["mean-gain"], rows


def run_saddle(config, workers=1):
    rows = []
    for g in config.g:
        if g <= 1.0:
            raise DomainError(f"saddle requires g > 1; got {g}")
        s = saddle_point(float(g))
        rows.append([s.g, s.u0, s.gamma_g, s.f2_u0, rate_function_derivative(s.g, s.u0)])
    return HEADERS["saddle"], rows


def run_scan_ergodicity(config, workers=1):
    rows = []
    for d in config.d:
        for g in config.g:
            medians = []
            for N in config.N:
                params = config.params(d, N, g)
                log_mean = mean_gain_exact(params).log_mean_gain
                tasks = [(params, r) for r in range(config.realizations)]
                results = sorted(fan_out(_ergodicity_task, tasks, workers), key=lambda t: t[0])
                ratios, log_m1s, changes = [], [], []
                for index, log_m1, change in results:
                    ratio = log_m1 - log_mean
                    rows.append([d, float(g), N, index, log_m1, log_mean, ratio, change])
                    ratios.append(ratio)
                    log_m1s.append(log_m1)
                    changes.append(change)
                med = _median(ratios)
                medians.append(med)
                rows.append([d, float(g), N, "median", _median(log_m1s), log_mean, med,
                             _median(changes)])
            if len(config.N) > 1:
                trend = median_trend(config.N, medians)
                rows.append([d, float(g), "all", "trend", None, None, trend["slope"],
                             None])
    return HEADERS["scan-ergodicity"], rows


def run_scan_chain(config, workers=1):
    rows = []
    for d in config.d:
        for g in config.g:
            for N in config.N:
                params = config.params(d, N, g)
                report = mean_gain_exact(params)
                tasks = [(params, r, report, config.p_max, config.q)
                         for r in range(config.realizations)]
                results = sorted(fan_out(_chain_task, tasks, workers), key=lambda t: t[0])
                per_p = {p: [] for p in range(1, config.p_max)}
                for index, rep, change in results:
                    for j, p in enumerate(range(1, config.p_max)):
                        row = [d, float(g), N, index, p, rep.L[j], rep.concentration[j],
                               rep.exceedance[j], rep.markov_log_bound[j], change]
                        rows.append(row)
                        per_p[p].append(row)
                for p, prow in per_p.items():
                    rows.append([d, float(g), N, "median", p]
                                + [_median([r[k] for r in prow]) for k in range(5, 10)])
    return HEADERS["scan-chain"], rows


def run_supnorm(config, workers=1):
    rows = []
    for d in config.d:
        for N in config.N:
            params = config.params(d, N, 1.0)
            bound = appendix_bound(N, d, config.alpha)
            tasks = [(params, r) for r in range(config.realizations)]
            results = sorted(fan_out(_supnorm_task, tasks, workers), key=lambda t: t[0])
            flags = []
            for index, sup in results:
                violated = sup >= bound
                flags.append(violated)
                rows.append([d, N, config.alpha, index, sup, bound, int(violated)])
            rows.append([d, N, config.alpha, "rate", max(s for _, s in results), bound,
                         float(np.mean(flags))])
    return HEADERS["supnorm"], rows


def run_oracle_check(config, workers=1):
    rows = []
    for d in config.d:
        for N in config.N:
            for g in config.g:
                params = config.params(d, N, g)
                M = params.n_modes
                label = f"d={d};N={N};g={float(g)!r};M={M}"
                exact = math.exp(mean_gain_exact(params).log_mean_gain)
                rows.append(["quadrature", label, exact, None, None])
                if g < 1.0 and M <= SERIES_MAX_MODES:
                    s = series_mean_gain(M, float(g))
                    rows.append(["series", label, s.value, SERIES_TOL,
                                 int(abs(s.value - exact) <= SERIES_TOL)])
                mc = mc_mean_gain(params, config.mc_realizations)
                tol = MC_SIGMAS * mc.std_error
                if M == 1:
                    # zero-variance sample; compare to rounding level
                    tol = 1e-12 * exact
                rows.append(["mc" if not mc.heavy_tail_warning else "mc-heavy-tail",
                             label, mc.mean, tol, int(abs(mc.mean - exact) <= tol)])
    return HEADERS["oracle-check"], rows


RUNNERS = {
    "mean-gain": run_mean_gain,
    "saddle": run_saddle,
    "scan-ergodicity": run_scan_ergodicity,
    "scan-chain": run_scan_chain,
    "supnorm": run_supnorm,
    "oracle-check": run_oracle_check,
}


def format_value(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def run(config, workers=1):
    """Validate ``config`` and return (header, rows) for its kind."""
    config.validate()
    return RUNNERS[config.kind](config, workers=workers)
