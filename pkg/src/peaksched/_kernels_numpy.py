"""Pure-NumPy implementations of the numeric hot paths.

The numba backend (`_kernels_numba`) implements the same three functions
with identical semantics; results must match bit for bit.  To keep that
guarantee cheap, every kernel works on integers only and all randomness
is pre-drawn by the caller into plain float arrays (move selectors,
value selectors, acceptance thresholds), so the kernels themselves are
deterministic functions of their inputs.
"""

from __future__ import annotations

import numpy as np

_SENTINEL = np.int64(2) ** 62


def scenario_peaks(starts: np.ndarray, durs: np.ndarray, cpus: np.ndarray) -> np.ndarray:
    """Peak total demand per scenario for half-open intervals.

    starts: (n,) int64, shared by all scenarios; durs, cpus: (K, n) int64.
    Returns (K,) int64.  Events are keyed 2*t for interval ends and
    2*t + 1 for interval starts so that an end at t is processed before a
    start at t (half-open semantics).
    """
    k, n = durs.shape
    if n == 0:
        return np.zeros(k, dtype=np.int64)
    skeys = np.broadcast_to(starts * 2 + 1, (k, n))
    ekeys = (starts[None, :] + durs) * 2
    keys = np.concatenate([skeys, ekeys], axis=1)
    deltas = np.concatenate([cpus, -cpus], axis=1)
    order = np.argsort(keys, axis=1, kind="stable")
    running = np.cumsum(np.take_along_axis(deltas, order, axis=1), axis=1)
    return np.maximum(running.max(axis=1), 0).astype(np.int64)


def _violation_counts(starts, durs, cpus, deadlines, ep, ec):
    """Per-scenario count of deadline + precedence violations at fixed starts."""
    dl = (starts[None, :] + durs > deadlines[None, :]).sum(axis=1)
    if len(ep):
        prec = (starts[ep][None, :] + durs[:, ep] > starts[ec][None, :]).sum(axis=1)
    else:
        prec = 0
    return (dl + prec).astype(np.int64)


def _cost(peaks, counts, viol, penalty):
    keep = ~viol
    pen = int(counts[keep].sum()) if keep.any() else 0
    mx = int(peaks[keep].max()) if keep.any() else 0
    return np.int64(penalty) * pen + mx, pen


def anneal(
    lo: np.ndarray,
    hi: np.ndarray,
    durs: np.ndarray,
    cpus: np.ndarray,
    deadlines: np.ndarray,
    ep: np.ndarray,
    ec: np.ndarray,
    penalty: int,
    init_starts: np.ndarray,
    init_viol: np.ndarray,
    move_u: np.ndarray,
    job_u: np.ndarray,
    val_u: np.ndarray,
    vout_u: np.ndarray,
    vin_u: np.ndarray,
    thr: np.ndarray,
    shift_prob: float,
):
    """One simulated-annealing run over (starts, violated-set).

    Moves: shift one job's start to a uniformly drawn value in its window,
    or swap one scenario in/out of the violated set.  Cost is
    ``penalty * (#hard violations in non-violated scenarios) + max peak of
    non-violated scenarios``; a state is feasible when the penalty term is
    zero.  Acceptance uses precomputed thresholds: accept iff
    ``new_cost - cost < thr[i]``.

    Returns (found_feasible, best_cost, best_starts, best_viol).
    """
    n = lo.shape[0]
    k = durs.shape[0]
    iters = move_u.shape[0]

    starts = init_starts.copy()
    viol = init_viol.copy()
    nv = int(viol.sum())

    peaks = scenario_peaks(starts, durs, cpus)
    counts = _violation_counts(starts, durs, cpus, deadlines, ep, ec)
    cost, pen = _cost(peaks, counts, viol, penalty)

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
            width = int(hi[j] - lo[j] + 1)
            v = int(lo[j]) + int(val_u[i] * width)
            old = starts[j]
            if v == old:
                continue
            starts[j] = v
            new_peaks = scenario_peaks(starts, durs, cpus)
            new_counts = _violation_counts(starts, durs, cpus, deadlines, ep, ec)
            new_cost, new_pen = _cost(new_peaks, new_counts, viol, penalty)
            if float(new_cost - cost) < thr[i]:
                peaks, counts, cost, pen = new_peaks, new_counts, new_cost, new_pen
            else:
                starts[j] = old
                continue
        else:
            if nv == 0 or nv >= k:
                continue
            r_out = int(vout_u[i] * nv)
            r_in = int(vin_u[i] * (k - nv))
            v_out = v_in = -1
            c_out = c_in = 0
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
            new_cost, new_pen = _cost(peaks, counts, viol, penalty)
            if float(new_cost - cost) < thr[i]:
                cost, pen = new_cost, new_pen
            else:
                viol[v_out] = True
                viol[v_in] = False
                continue
        if pen == 0 and (not found or cost < best_cost):
            found = True
            best_cost = cost
            best_starts = starts.copy()
            best_viol = viol.copy()

    return found, int(best_cost), best_starts, best_viol


def brute_search(
    lo: np.ndarray,
    hi: np.ndarray,
    durs: np.ndarray,
    cpus: np.ndarray,
    deadlines: np.ndarray,
    ep: np.ndarray,
    ec: np.ndarray,
    masks: np.ndarray,
):
    """Exhaustive search over all start assignments x violation subsets.

    ``masks`` are scenario-violation bitmasks ordered by (popcount, value);
    assignments are enumerated lexicographically (first job most
    significant).  The first strictly better solution wins, which yields
    lexicographic-starts / smallest-violated-set tie-breaking.

    Returns (found, best_obj, best_starts, best_mask).
    """
    n = lo.shape[0]
    k = durs.shape[0]
    sizes = (hi - lo + 1).astype(np.int64)
    total = int(np.prod(sizes)) if n else 1

    bits = ((masks[:, None] >> np.arange(k, dtype=np.int64)[None, :]) & 1).astype(bool)
    keep = ~bits  # (nmask, k): scenarios that must be clean / bound the objective

    strides = np.ones(n, dtype=np.int64)
    for j in range(n - 2, -1, -1):
        strides[j] = strides[j + 1] * sizes[j + 1]

    best_obj = _SENTINEL
    best_starts = lo.copy()
    best_mask = np.int64(0)

    block = 2048
    for base in range(0, total, block):
        ids = np.arange(base, min(base + block, total), dtype=np.int64)
        if n:
            digits = (ids[:, None] // strides[None, :]) % sizes[None, :]
            sb = lo[None, :] + digits  # (B, n)
        else:
            sb = np.zeros((len(ids), 0), dtype=np.int64)
        b = sb.shape[0]

        dl = (sb[:, None, :] + durs[None, :, :] > deadlines[None, None, :]).sum(axis=2)
        if len(ep):
            prec = (sb[:, None, ep] + durs[None, :, ep] > sb[:, None, ec]).sum(axis=2)
            counts = dl + prec  # (B, K)
        else:
            counts = dl

        if n:
            skeys = np.broadcast_to((sb * 2 + 1)[:, None, :], (b, k, n))
            ekeys = (sb[:, None, :] + durs[None, :, :]) * 2
            keys = np.concatenate([skeys, ekeys], axis=2)
            deltas = np.broadcast_to(
                np.concatenate([cpus, -cpus], axis=1)[None, :, :], (b, k, 2 * n)
            )
            order = np.argsort(keys, axis=2, kind="stable")
            running = np.cumsum(np.take_along_axis(deltas, order, axis=2), axis=2)
            peaks = np.maximum(running.max(axis=2), 0)  # (B, K)
        else:
            peaks = np.zeros((b, k), dtype=np.int64)

        feas = (counts[:, None, :] * keep[None, :, :]).sum(axis=2) == 0  # (B, nmask)
        obj = np.where(keep[None, :, :], peaks[:, None, :], 0).max(axis=2, initial=0)
        obj = np.where(feas, obj, _SENTINEL)

        mi = np.argmin(obj, axis=1)  # first best mask per assignment
        vals = obj[np.arange(b), mi]
        bi = int(np.argmin(vals))  # first best assignment in block
        if vals[bi] < best_obj:
            best_obj = np.int64(vals[bi])
            best_starts = sb[bi].copy()
            best_mask = np.int64(masks[mi[bi]])

    found = bool(best_obj < _SENTINEL)
    return found, int(best_obj), best_starts, best_mask
