"""Compare the compiled and numpy kernel backends.

Times each hot kernel on both backends, checks that they agree, then times
whole pipeline calls with the active backend swapped in place.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
from contextlib import contextmanager
import sys
import timeit

import numpy as np

from steinhaus import _pykernels, kernels
from steinhaus.diagnostics import resolved_grid, spatial_moments
from steinhaus.field_sampler import ModelParams, intensity_at_points, sample_phases
from steinhaus.moment_theory import mean_gain_exact

try:
    from steinhaus import _ckernels
except ImportError:
    _ckernels = None

NAMES = ("log_i0", "bessel_ratio", "rate_function", "direct_intensity", "log_mean_exp")


def kernel_cases(rng):
    x_small = rng.uniform(0, 40, 20)  # one quadrature panel
    x_large = rng.uniform(0, 40, 200_000)
    theta = rng.uniform(0, 2 * np.pi, 257)
    points = rng.uniform(0, 1, (2000, 1))
    values = rng.exponential(size=2**20)
    return [
        ("log_i0, 20 nodes", "log_i0", (x_small,)),
        ("log_i0, 2e5 nodes", "log_i0", (x_large,)),
        ("bessel_ratio, 2e5 nodes", "bessel_ratio", (x_large,)),
        ("rate_function, 20 nodes", "rate_function", (2.0, x_small)),
        ("direct_intensity, N=128, 2000 pts", "direct_intensity", (theta, 128, 1, points)),
        ("log_mean_exp, 2^20 values", "log_mean_exp", (values, 2.0)),
    ]


def best_time(func, repeat):
    timer = timeit.Timer(func)
    number, _ = timer.autorange()
    return min(timer.repeat(repeat=repeat, number=number)) / number


@contextmanager
def use_backend(module):
    saved = {name: getattr(kernels, name) for name in NAMES}
    for name in NAMES:
        setattr(kernels, name, getattr(module, name))
    try:
        yield
    finally:
        for name, fn in saved.items():
            setattr(kernels, name, fn)


def pipeline_cases():
    ph = sample_phases(ModelParams(N=64), 0)
    pts = np.linspace(0, 1, 500, endpoint=False)[:, None]
    return [
        ("mean_gain_exact, N=100, g=2", lambda: mean_gain_exact(ModelParams(N=100, g=2.0))),
        ("mean_gain_exact, N=64, g=0.5", lambda: mean_gain_exact(ModelParams(N=64, g=0.5))),
        ("resolved_grid + moments, N=64, g=2",
         lambda: spatial_moments(resolved_grid(ph, 2.0, 4)[0], 2.0, 4)),
        ("intensity_at_points, N=64, 500 pts", lambda: intensity_at_points(ph, pts)),
    ]


def report(label, t_py, t_c):
    ratio = t_py / t_c if t_c else float("nan")
    print(f"{label:40s} {t_py * 1e3:11.3f} {t_c * 1e3:11.3f} {ratio:9.1f}x")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5, help="timing repeats (best is kept)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if _ckernels is None:
        print("compiled extension not built; run `pip install -e . --no-build-isolation`",
              file=sys.stderr)
        return 1

    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':40s} {'python ms':>11s} {'cython ms':>11s} {'speedup':>10s}")
    for label, name, fargs in kernel_cases(rng):
        py, c = getattr(_pykernels, name), getattr(_ckernels, name)
        a, b = np.asarray(py(*fargs)), np.asarray(c(*fargs))
        if not np.allclose(a, b, rtol=1e-12, atol=1e-13):
            print(f"backends disagree on {label}", file=sys.stderr)
            return 1
        report(label, best_time(lambda: py(*fargs), args.repeat),
               best_time(lambda: c(*fargs), args.repeat))

    print()
    print(f"{'pipeline':40s} {'python ms':>11s} {'cython ms':>11s} {'speedup':>10s}")
    for label, func in pipeline_cases():
        with use_backend(_pykernels):
            t_py = best_time(func, args.repeat)
        with use_backend(_ckernels):
            t_c = best_time(func, args.repeat)
        report(label, t_py, t_c)
    return 0


if __name__ == "__main__":
    sys.exit(main())
