# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for per-record trajectory sampling and GAF batch encoding.

Must stay bit-identical to _kernels_py (same operation order; build uses
-ffp-contract=off so the multiply/subtract pairs are not fused).
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

GAF_SUMMATION = 0
GAF_DIFFERENCE = 1


def step_sample(const double[::1] event_times, const double[::1] cum_values, Py_ssize_t n_out):
    out = np.empty(n_out, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t m = event_times.shape[0]
    cdef Py_ssize_t k = 0, t
    cdef double cur = 0.0
    with nogil:
        for t in range(n_out):
            while k < m and event_times[k] <= <double> t:
                cur = cum_values[k]
                k += 1
            o[t] = cur
    return out


def ramp_sample(
    const double[::1] ends,
    const double[::1] starts,
    const double[::1] base,
    const double[::1] slope,
    Py_ssize_t n_out,
):
    out = np.empty(n_out, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t m = ends.shape[0]
    cdef Py_ssize_t k = 0, t
    cdef double tt
    with nogil:
        for t in range(n_out):
            tt = <double> t
            while k < m - 1 and ends[k] <= tt:
                k += 1
            o[t] = base[k] + slope[k] * (tt - starts[k])
    return out


def gaf_batch(const double[:, ::1] cos_phi, const double[:, ::1] sin_phi, int kind):
    cdef Py_ssize_t n = cos_phi.shape[0]
    cdef Py_ssize_t N = cos_phi.shape[1]
    if kind != 0 and kind != 1:
        raise ValueError(f"unknown field kind code {kind}")
    out = np.empty((n, N, N), dtype=np.float32)
    cdef float[:, :, ::1] o = out
    cdef Py_ssize_t r, i, j
    cdef double ci, si, v
    with nogil:
        for r in range(n):
            for i in range(N):
                ci = cos_phi[r, i]
                si = sin_phi[r, i]
                for j in range(N):
                    if kind == 0:
                        v = ci * cos_phi[r, j] - si * sin_phi[r, j]
                    else:
                        v = si * cos_phi[r, j] - ci * sin_phi[r, j]
                    v = v + 0.0  # canonicalize -0.0, matching the fallback
                    if v > 1.0:
                        v = 1.0
                    elif v < -1.0:
                        v = -1.0
                    o[r, i, j] = <float> v
    return out
