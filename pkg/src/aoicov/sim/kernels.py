"""Hot loops of the simulator.

Every kernel exists twice: ``*_jit`` (numba, nopython, releases the GIL) and
``*_np`` (vectorised numpy). The public names dispatch on
:data:`aoicov.sim._backend.USE_NUMBA`. Both variants consume identical input
arrays, so the random streams never depend on the backend; only the order of
floating-point summation can differ.
"""

import numpy as np

from ._backend import USE_NUMBA, njit


@njit(cache=True, nogil=True)
def aoi_path_jit(first_success, N, T_R, T_o, thresholds):
    n_thr = thresholds.shape[0]
    violated = np.zeros(n_thr)
    z_samples = np.empty(first_success.shape[0])
    horizon = 0.0
    area = 0.0
    updates = 0
    last_k = -1
    last_g = 0
    for k in range(first_success.shape[0]):
        g = first_success[k]
        if g == 0:
            continue
        z_samples[updates] = (g - 1) * T_R + T_o
        updates += 1
        if last_k >= 0:
            z = (last_g - 1) * T_R + T_o
            length = (k - last_k) * N * T_R + (g - last_g) * T_R
            peak = z + length
            horizon += length
            area += 0.5 * length * (z + peak)
            for i in range(n_thr):
                v = thresholds[i]
                if v < z:
                    violated[i] += length
                elif peak > v:
                    violated[i] += peak - v
        last_k = k
        last_g = g
    return horizon, area, violated, updates, z_samples[:updates]


def aoi_path_np(first_success, N, T_R, T_o, thresholds):
    idx = np.flatnonzero(first_success)
    g = first_success[idx].astype(np.float64)
    z_all = (g - 1.0) * T_R + T_o
    if idx.size < 2:
        return 0.0, 0.0, np.zeros(thresholds.shape[0]), int(idx.size), z_all
    length = np.diff(idx).astype(np.float64) * (N * T_R) + np.diff(g) * T_R
    z = z_all[:-1]
    peak = z + length
    horizon = float(np.sum(length))
    area = float(np.sum(0.5 * length * (z + peak)))
    v = thresholds[:, None]
    per = np.where(v < z, length, np.clip(peak - v, 0.0, None))
    violated = per.sum(axis=1)
    return horizon, area, violated, int(idx.size), z_all


@njit(cache=True, nogil=True)
def slot_interference_jit(counts, r2_unit, fading, powers, r_in, r_out, alpha):
    n_slots, n_cls = counts.shape
    out = np.zeros(n_slots)
    span = r_out * r_out - r_in * r_in
    base = r_in * r_in
    half = -0.5 * alpha
    pos = 0
    for s in range(n_slots):
        acc = 0.0
        for j in range(n_cls):
            pj = powers[j]
            for _ in range(counts[s, j]):
                r2 = base + r2_unit[pos] * span
                acc += pj * fading[pos] * r2**half
                pos += 1
        out[s] = acc
    return out


def slot_interference_np(counts, r2_unit, fading, powers, r_in, r_out, alpha):
    n_slots, n_cls = counts.shape
    flat = counts.ravel()
    owner = np.repeat(np.arange(flat.size), flat)
    cls = owner % n_cls
    r2 = r_in * r_in + r2_unit * (r_out * r_out - r_in * r_in)
    contrib = powers[cls] * fading * r2 ** (-0.5 * alpha)
    return np.bincount(owner // n_cls, weights=contrib, minlength=n_slots).astype(np.float64)


def aoi_path(first_success, N, T_R, T_o, thresholds):
    """Exact sawtooth accounting over complete inter-update intervals.

    ``first_success[k]`` is the 1-based attempt index of the first success in
    sensing period ``k`` (0 when all attempts fail). Returns
    ``(horizon, area, violated_per_threshold, updates, z_samples)``; the
    horizon runs from the first to the last update.
    """
    fs = np.ascontiguousarray(first_success, dtype=np.int64)
    thr = np.ascontiguousarray(thresholds, dtype=np.float64)
    if USE_NUMBA:
        h, a, v, u, z = aoi_path_jit(fs, int(N), float(T_R), float(T_o), thr)
        return float(h), float(a), v, int(u), z
    return aoi_path_np(fs, int(N), float(T_R), float(T_o), thr)


def slot_interference(counts, r2_unit, fading, powers, r_in, r_out, alpha):
    """Per-slot aggregate interference from pre-drawn PPP marks.

    ``counts`` is (slots, classes); ``r2_unit`` and ``fading`` list the points
    slot-major, class-minor. A point's squared radius is
    ``r_in**2 + r2_unit * (r_out**2 - r_in**2)``, i.e. uniform on the annulus.
    """
    counts = np.ascontiguousarray(counts, dtype=np.int64)
    r2_unit = np.ascontiguousarray(r2_unit, dtype=np.float64)
    fading = np.ascontiguousarray(fading, dtype=np.float64)
    powers = np.ascontiguousarray(powers, dtype=np.float64)
    args = (counts, r2_unit, fading, powers, float(r_in), float(r_out), float(alpha))
    if USE_NUMBA:
        return slot_interference_jit(*args)
    return slot_interference_np(*args)
