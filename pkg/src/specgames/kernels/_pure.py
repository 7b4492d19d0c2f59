"""Numpy reference implementation of the per-user rate kernels."""

import math

import numpy as np


def user_rates(sig, intf, w, k_own, n_shared, k_opp, p_mw, noise_mw, bw_scale):
    sig = np.asarray(sig, dtype=float)
    if sig.size == 0:
        return np.zeros(0)
    p_own = p_mw / k_own
    snr = p_own * sig / noise_mw
    per_user = (k_own - n_shared) * np.log2(1.0 + snr)
    if n_shared:
        sinr = p_own * sig / ((p_mw / k_opp) * np.asarray(intf, dtype=float) + noise_mw)
        per_user = per_user + n_shared * np.log2(1.0 + sinr)
    return bw_scale * np.asarray(w, dtype=float) * per_user


def pf_utility(sig, intf, w, k_own, n_shared, k_opp, p_mw, noise_mw, bw_scale):
    r = user_rates(sig, intf, w, k_own, n_shared, k_opp, p_mw, noise_mw, bw_scale)
    if r.size == 0:
        return 0.0
    if np.any(r <= 0.0):
        return -math.inf
    return float(np.sum(np.log10(r)))
