# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops.  Signatures mirror :mod:`hyperlp._fallback`."""
from libc.stdint cimport int32_t, int64_t


def tensor_step(const double[::1] y, const int64_t[::1] state_key,
                const int64_t[::1] indptr, const int32_t[::1] comp_vertex,
                const double[::1] comp_weight, Py_ssize_t n, Py_ssize_t stride,
                double[::1] out):
    """Accumulate one tensor-walk step of ``y`` into ``out`` (not zeroed here)."""
    cdef Py_ssize_t s, j, base, key
    cdef double ys
    with nogil:
        for s in range(y.shape[0]):
            ys = y[s]
            if ys == 0.0:
                continue
            key = state_key[s]
            base = (s % stride) * n
            for j in range(indptr[key], indptr[key + 1]):
                out[base + comp_vertex[j]] += comp_weight[j] * ys
