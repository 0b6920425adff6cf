"""Pure numpy implementations of the hot kernels.

Mirrors ``_ckernels.pyx`` function for function; used when the compiled
extension is unavailable or ``STEINHAUS_PURE_PYTHON=1`` is set.
"""

import math

import numpy as np

SERIES_CUTOFF = 20.0
_SERIES_TERMS = 64
_ASYMPTOTIC_TERMS = 40
_LOG_2PI = math.log(2.0 * math.pi)


def _series(x):
    # returns (I0(x) - 1, I1(x)) for x <= SERIES_CUTOFF
    q = 0.25 * x * x
    term = np.ones_like(x)
    s0 = np.zeros_like(x)
    s1 = np.ones_like(x)
    for k in range(1, _SERIES_TERMS):
        term = term * q / (k * k)
        s0 += term
        s1 += term / (k + 1)
    return s0, 0.5 * x * s1


def _asymptotic_sum(x, nu):
    # sum_k (-1)^k a_k(nu) / x^k, truncated at the smallest term
    four_nu2 = 4.0 * nu * nu
    total = np.ones_like(x)
    term = np.ones_like(x)
    prev = np.full_like(x, np.inf)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, _ASYMPTOTIC_TERMS):
        term = term * (((2 * k - 1) ** 2 - four_nu2) / (8.0 * k * x))
        mag = np.abs(term)
        active &= mag < prev
        total = np.where(active, total + term, total)
        prev = mag
    return total


def log_i0(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    small = x <= SERIES_CUTOFF
    if small.any():
        s0, _ = _series(x[small])
        out[small] = np.log1p(s0)
    big = ~small
    if big.any():
        xb = x[big]
        out[big] = xb - 0.5 * (_LOG_2PI + np.log(xb)) + np.log(_asymptotic_sum(xb, 0.0))
    return out


def bessel_ratio(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    small = x <= SERIES_CUTOFF
    if small.any():
        s0, i1 = _series(x[small])
        out[small] = i1 / (1.0 + s0)
    big = ~small
    if big.any():
        xb = x[big]
        out[big] = _asymptotic_sum(xb, 1.0) / _asymptotic_sum(xb, 0.0)
    return out


def rate_function(g, u):
    u = np.asarray(u, dtype=np.float64)
    return u - log_i0(2.0 * np.sqrt(g * u))


def direct_intensity(theta, N, d, points):
    """|S_N|^2 at each row of ``points`` by explicit summation over modes."""
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    theta = np.asarray(theta, dtype=np.float64).reshape((2 * N + 1,) * d)
    modes = np.arange(-N, N + 1, dtype=np.float64)
    out = np.empty(points.shape[0])
    for j, x in enumerate(points):
        # separable phase factors per axis, combined by outer product
        field = np.exp(1j * theta)
        for axis in range(d):
            factor = np.exp(2j * math.pi * modes * x[axis])
            shape = [1] * d
            shape[axis] = 2 * N + 1
            field = field * factor.reshape(shape)
        s = field.sum()
        out[j] = (s.real * s.real + s.imag * s.imag) / theta.size
    return out


def log_mean_exp(values, scale):
    a = scale * np.asarray(values, dtype=np.float64).ravel()
    top = a.max()
    return float(top + math.log(np.mean(np.exp(a - top))))
