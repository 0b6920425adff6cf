# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Same surface as ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, log1p, sqrt, fabs, cos, sin, M_PI

cnp.import_array()

cdef double SERIES_CUTOFF = 20.0
cdef int MAX_TERMS = 200

cdef double _LOG_2PI = log(2.0 * M_PI)


cdef inline void _series(double x, double* s0, double* i1) noexcept nogil:
    # s0 = I0(x) - 1, i1 = I1(x)
    cdef double q = 0.25 * x * x
    cdef double term = 1.0, a = 0.0, b = 1.0
    cdef int k
    for k in range(1, MAX_TERMS):
        term *= q / (<double>k * k)
        a += term
        b += term / (k + 1)
        if term < 1e-18 * (1.0 + a):
            break
    s0[0] = a
    i1[0] = 0.5 * x * b


cdef inline double _asymptotic_sum(double x, double nu) noexcept nogil:
    cdef double four_nu2 = 4.0 * nu * nu
    cdef double total = 1.0, term = 1.0, prev = 1e308, mag
    cdef int k
    for k in range(1, MAX_TERMS):
        term *= ((2 * k - 1) * (2 * k - 1) - four_nu2) / (8.0 * k * x)
        mag = fabs(term)
        if mag >= prev:
            break
        total += term
        if mag < 1e-18 * fabs(total):
            break
        prev = mag
    return total


cdef inline double _log_i0(double x) noexcept nogil:
    cdef double s0, i1
    if x <= SERIES_CUTOFF:
        _series(x, &s0, &i1)
        return log1p(s0)
    return x - 0.5 * (_LOG_2PI + log(x)) + log(_asymptotic_sum(x, 0.0))


cdef inline double _ratio(double x) noexcept nogil:
    cdef double s0, i1
    if x <= SERIES_CUTOFF:
        _series(x, &s0, &i1)
        return i1 / (1.0 + s0)
    return _asymptotic_sum(x, 1.0) / _asymptotic_sum(x, 0.0)


def log_i0(x):
    cdef cnp.ndarray[double, ndim=1] xs = np.ascontiguousarray(x, dtype=np.float64).ravel()
    cdef cnp.ndarray[double, ndim=1] out = np.empty_like(xs)
    cdef Py_ssize_t i, n = xs.shape[0]
    with nogil:
        for i in range(n):
            out[i] = _log_i0(xs[i])
    return out.reshape(np.shape(x))


def bessel_ratio(x):
    cdef cnp.ndarray[double, ndim=1] xs = np.ascontiguousarray(x, dtype=np.float64).ravel()
    cdef cnp.ndarray[double, ndim=1] out = np.empty_like(xs)
    cdef Py_ssize_t i, n = xs.shape[0]
    with nogil:
        for i in range(n):
            out[i] = _ratio(xs[i])
    return out.reshape(np.shape(x))


def rate_function(double g, u):
    cdef cnp.ndarray[double, ndim=1] us = np.ascontiguousarray(u, dtype=np.float64).ravel()
    cdef cnp.ndarray[double, ndim=1] out = np.empty_like(us)
    cdef Py_ssize_t i, n = us.shape[0]
    with nogil:
        for i in range(n):
            out[i] = us[i] - _log_i0(2.0 * sqrt(g * us[i]))
    return out.reshape(np.shape(u))


def direct_intensity(theta, int N, int d, points):
    """|S_N|^2 at each row of ``points`` by explicit summation over modes."""
    cdef cnp.ndarray[double, ndim=1] th = np.ascontiguousarray(theta, dtype=np.float64).ravel()
    cdef cnp.ndarray[double, ndim=2] pts = np.ascontiguousarray(
        np.atleast_2d(points), dtype=np.float64)
    cdef Py_ssize_t npts = pts.shape[0]
    cdef int side = 2 * N + 1
    cdef Py_ssize_t nmodes = th.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(npts)
    cdef Py_ssize_t j, m
    cdef int n0, n1, n2
    cdef double phase, re, im, x0, x1, x2
    with nogil:
        for j in range(npts):
            x0 = pts[j, 0]
            x1 = pts[j, 1] if d > 1 else 0.0
            x2 = pts[j, 2] if d > 2 else 0.0
            re = 0.0
            im = 0.0
            for m in range(nmodes):
                # row-major flat index -> (n0, n1, n2) in [-N, N]
                if d == 1:
                    n0 = m - N
                    phase = th[m] + 2.0 * M_PI * n0 * x0
                elif d == 2:
                    n0 = m // side - N
                    n1 = m % side - N
                    phase = th[m] + 2.0 * M_PI * (n0 * x0 + n1 * x1)
                else:
                    n0 = m // (side * side) - N
                    n1 = (m // side) % side - N
                    n2 = m % side - N
                    phase = th[m] + 2.0 * M_PI * (n0 * x0 + n1 * x1 + n2 * x2)
                re += cos(phase)
                im += sin(phase)
            out[j] = (re * re + im * im) / nmodes
    return out


def log_mean_exp(values, double scale):
    cdef cnp.ndarray[double, ndim=1] v = np.ascontiguousarray(values, dtype=np.float64).ravel()
    cdef Py_ssize_t i, n = v.shape[0]
    cdef double top = -1e308, acc = 0.0, comp = 0.0, a, y, t
    with nogil:
        for i in range(n):
            a = scale * v[i]
            if a > top:
                top = a
        # Kahan summation; n reaches ~1e6 on desk-scale grids
        for i in range(n):
            y = exp(scale * v[i] - top) - comp
            t = acc + y
            comp = (t - acc) - y
            acc = t
    return top + log(acc / n)
