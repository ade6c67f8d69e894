"""Numba-compiled implementations of the numeric hot paths.

Mirrors `_kernels_numpy` exactly: integer arithmetic throughout, all
randomness pre-drawn by the caller, so both backends produce
bit-identical results.  Import fails if numba is unavailable; the
backend selector falls back to the NumPy implementation in that case.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_SENTINEL = 2**62


@njit(cache=True)
def _peak_one(starts, durs_k, cpus_k):
    # Event sweep over half-open intervals; ends (key 2t) sort before
    # starts (key 2t+1).  The running max is invariant to the order of
    # equal keys, so an unstable argsort is fine.
    n = starts.shape[0]
    if n == 0:
        return np.int64(0)
    keys = np.empty(2 * n, np.int64)
    deltas = np.empty(2 * n, np.int64)
    for j in range(n):
        keys[j] = starts[j] * 2 + 1
        deltas[j] = cpus_k[j]
        keys[n + j] = (starts[j] + durs_k[j]) * 2
        deltas[n + j] = -cpus_k[j]
    order = np.argsort(keys)
    run = np.int64(0)
    mx = np.int64(0)
    for t in range(2 * n):
        run += deltas[order[t]]
        if run > mx:
            mx = run
    return mx


@njit(cache=True)
def scenario_peaks(starts, durs, cpus):
    k = durs.shape[0]
    out = np.zeros(k, np.int64)
    for s in range(k):
        out[s] = _peak_one(starts, durs[s], cpus[s])
    return out


@njit(cache=True)
def _eval_all(starts, durs, cpus, deadlines, ep, ec, peaks, counts):
    k = durs.shape[0]
    n = starts.shape[0]
    ne = ep.shape[0]
    for s in range(k):
        c = np.int64(0)
        for j in range(n):
            if starts[j] + durs[s, j] > deadlines[j]:
                c += 1
        for e in range(ne):
            if starts[ep[e]] + durs[s, ep[e]] > starts[ec[e]]:
                c += 1
        counts[s] = c
        peaks[s] = _peak_one(starts, durs[s], cpus[s])


@njit(cache=True)
def _cost_of(peaks, counts, viol, penalty):
    k = peaks.shape[0]
    pen = np.int64(0)
    mx = np.int64(0)
    for s in range(k):
        if not viol[s]:
            pen += counts[s]
            if peaks[s] > mx:
                mx = peaks[s]
    return np.int64(penalty) * pen + mx, pen


@njit(cache=True)
def anneal(
    lo,
    hi,
    durs,
    cpus,
    deadlines,
    ep,
    ec,
    penalty,
    init_starts,
    init_viol,
    move_u,
    job_u,
    val_u,
    vout_u,
    vin_u,
    thr,
    shift_prob,
):
    n = lo.shape[0]
    k = durs.shape[0]
    iters = move_u.shape[0]

    starts = init_starts.copy()
    viol = init_viol.copy()
    nv = 0
    for s in range(k):
        if viol[s]:
            nv += 1

    peaks = np.zeros(k, np.int64)
    counts = np.zeros(k, np.int64)
    new_peaks = np.zeros(k, np.int64)
    new_counts = np.zeros(k, np.int64)
    _eval_all(starts, durs, cpus, deadlines, ep, ec, peaks, counts)
    cost, pen = _cost_of(peaks, counts, viol, penalty)

    found = False
    best_cost = np.int64(0)
    best_starts = starts.copy()
    best_viol = viol.copy()
    if pen == 0:
        found = True
        best_cost = cost

    for i in range(iters):
        if move_u[i] < shift_prob:
            j = int(job_u[i] * n)
            width = hi[j] - lo[j] + 1
            v = lo[j] + np.int64(val_u[i] * width)
            old = starts[j]
            if v == old:
                continue
            starts[j] = v
            _eval_all(starts, durs, cpus, deadlines, ep, ec, new_peaks, new_counts)
            new_cost, new_pen = _cost_of(new_peaks, new_counts, viol, penalty)
            if float(new_cost - cost) < thr[i]:
                peaks[:] = new_peaks
                counts[:] = new_counts
                cost = new_cost
                pen = new_pen
            else:
                starts[j] = old
                continue
        else:
            if nv == 0 or nv >= k:
                continue
            r_out = int(vout_u[i] * nv)
            r_in = int(vin_u[i] * (k - nv))
            v_out = -1
            v_in = -1
            c_out = 0
            c_in = 0
            for idx in range(k):
                if viol[idx]:
                    if c_out == r_out:
                        v_out = idx
                    c_out += 1
                else:
                    if c_in == r_in:
                        v_in = idx
                    c_in += 1
            viol[v_out] = False
            viol[v_in] = True
            new_cost, new_pen = _cost_of(peaks, counts, viol, penalty)
            if float(new_cost - cost) < thr[i]:
                cost = new_cost
                pen = new_pen
            else:
                viol[v_out] = True
                viol[v_in] = False
                continue
        if pen == 0 and (not found or cost < best_cost):
            found = True
            best_cost = cost
            best_starts[:] = starts
            best_viol[:] = viol

    return found, int(best_cost), best_starts, best_viol


@njit(cache=True)
def brute_search(lo, hi, durs, cpus, deadlines, ep, ec, masks):
    n = lo.shape[0]
    k = durs.shape[0]
    nmask = masks.shape[0]

    starts = lo.copy()
    peaks = np.zeros(k, np.int64)
    counts = np.zeros(k, np.int64)
    best_obj = np.int64(_SENTINEL)
    best_starts = lo.copy()
    best_mask = np.int64(0)

    while True:
        _eval_all(starts, durs, cpus, deadlines, ep, ec, peaks, counts)
        ba = np.int64(_SENTINEL)
        bm = np.int64(0)
        for m in range(nmask):
            mask = masks[m]
            feas = True
            obj = np.int64(0)
            for s in range(k):
                if (mask >> s) & 1 == 0:
                    if counts[s] > 0:
                        feas = False
                        break
                    if peaks[s] > obj:
                        obj = peaks[s]
            if feas and obj < ba:
                ba = obj
                bm = mask
        if ba < best_obj:
            best_obj = ba
            best_mask = bm
            best_starts[:] = starts

        pos = n - 1
        while pos >= 0:
            if starts[pos] < hi[pos]:
                starts[pos] += 1
                break
            starts[pos] = lo[pos]
            pos -= 1
        if pos < 0:
            break

    found = best_obj < _SENTINEL
    return found, int(best_obj), best_starts, best_mask
