# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-user rate kernels; same contract as ``_pure``."""

import numpy as np

from libc.math cimport log2, log10, INFINITY


def user_rates(const double[::1] sig, const double[::1] intf, const double[::1] w,
               int k_own, int n_shared, int k_opp,
               double p_mw, double noise_mw, double bw_scale):
    cdef Py_ssize_t n = sig.shape[0], j
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] r = out
    cdef double p_own = p_mw / k_own
    cdef double p_opp = p_mw / k_opp if k_opp > 0 else 0.0
    cdef double s
    for j in range(n):
        s = (k_own - n_shared) * log2(1.0 + p_own * sig[j] / noise_mw)
        if n_shared:
            s += n_shared * log2(1.0 + p_own * sig[j] / (p_opp * intf[j] + noise_mw))
        r[j] = bw_scale * w[j] * s
    return out


def pf_utility(const double[::1] sig, const double[::1] intf, const double[::1] w,
               int k_own, int n_shared, int k_opp,
               double p_mw, double noise_mw, double bw_scale):
    cdef Py_ssize_t n = sig.shape[0], j
    cdef double p_own = p_mw / k_own
    cdef double p_opp = p_mw / k_opp if k_opp > 0 else 0.0
    cdef double s, total = 0.0
    for j in range(n):
        s = (k_own - n_shared) * log2(1.0 + p_own * sig[j] / noise_mw)
        if n_shared:
            s += n_shared * log2(1.0 + p_own * sig[j] / (p_opp * intf[j] + noise_mw))
        s *= bw_scale * w[j]
        if s <= 0.0:
            return -INFINITY
        total += log10(s)
    return total
