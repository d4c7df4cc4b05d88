"""Hot numeric kernels: grid evaluation, exhaustive scan, knapsack table.

Each kernel exists twice with identical arithmetic (same operations in the
same order, so results are bit-equal): a numba ``@njit`` build and a pure
numpy fallback.  The active path is picked at import time: numba is used
when importable unless the environment variable ``QRAM_DISABLE_NUMBA`` is set
to 1/true/yes/on.  ``qram bench kernels`` times the two paths side by side.
"""

from __future__ import annotations

import math
import os

import numpy as np

_FLAG = os.environ.get("QRAM_DISABLE_NUMBA", "0").strip().lower()
NUMBA_DISABLED = _FLAG in {"1", "true", "yes", "on"}

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised via the env flag instead
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


USING_NUMBA = HAS_NUMBA and not NUMBA_DISABLED

#: Cumulative count of single-configuration evaluations (tests reset this).
counters = {"config_evals": 0}


# --------------------------------------------------------------------------
# Configuration metrics: utility, compound resource and the resource vector
# for every grid point against one target.
# --------------------------------------------------------------------------

def _config_metrics_numpy(dwell, tx, pw, range_km, speed, type_weight,
                          snr_const, r1, r2, w1, w2):
    occ = tx / dwell
    avg_pw = pw * tx / dwell
    comp = w1 * (occ / r1) + w2 * (avg_pw / r2)
    rr = range_km * range_km
    r4 = rr * rr
    s = snr_const * pw * tx / r4
    sigma = 100.0 / np.sqrt(s)
    travel = speed * (dwell / 1000.0)
    ratio = travel / 1000.0
    growth = np.sqrt(1.0 + ratio * ratio)
    err = sigma * growth
    util = type_weight / (1.0 + err / 50.0)
    return util, comp, occ, avg_pw


@njit(cache=True)
def _config_metrics_jit(dwell, tx, pw, range_km, speed, type_weight,
                        snr_const, r1, r2, w1, w2):  # pragma: no cover - jit
    n = dwell.shape[0]
    util = np.empty(n, dtype=np.float64)
    comp = np.empty(n, dtype=np.float64)
    occ = np.empty(n, dtype=np.float64)
    avg_pw = np.empty(n, dtype=np.float64)
    rr = range_km * range_km
    r4 = rr * rr
    for i in range(n):
        o = tx[i] / dwell[i]
        a = pw[i] * tx[i] / dwell[i]
        c = w1 * (o / r1) + w2 * (a / r2)
        s = snr_const * pw[i] * tx[i] / r4
        sigma = 100.0 / math.sqrt(s)
        travel = speed * (dwell[i] / 1000.0)
        ratio = travel / 1000.0
        growth = math.sqrt(1.0 + ratio * ratio)
        err = sigma * growth
        util[i] = type_weight / (1.0 + err / 50.0)
        comp[i] = c
        occ[i] = o
        avg_pw[i] = a
    return util, comp, occ, avg_pw


def config_metrics(dwell, tx, pw, range_km, speed, type_weight, snr_const,
                   r1, r2, w1, w2, *, force=None):
    """Evaluate all configurations of one task.

    Returns (utility, compound, occupancy, avg_power) float64 arrays aligned
    with the row-major grid expansion.  ``force`` overrides the import-time
    path choice ("numpy" or "numba") for benchmarking.
    """
    counters["config_evals"] += len(dwell)
    use_numba = USING_NUMBA if force is None else (force == "numba")
    impl = _config_metrics_jit if use_numba else _config_metrics_numpy
    return impl(np.asarray(dwell, dtype=np.float64),
                np.asarray(tx, dtype=np.float64),
                np.asarray(pw, dtype=np.float64),
                float(range_km), float(speed), float(type_weight),
                float(snr_const), float(r1), float(r2), float(w1), float(w2))


# --------------------------------------------------------------------------
# Exhaustive feasible-assignment scan (the brute-force oracle's inner loop).
#
# States are mixed-radix codes: task 0 is the most significant digit, digit
# values 0..n_i-1 pick a configuration and digit n_i drops the task, so
# ascending code order is lexicographic order of the assignment vectors.
# The scan keeps the FIRST code attaining the maximum feasible utility.
# --------------------------------------------------------------------------

@njit(cache=True)
def _scan_best_jit(util, occ, pw, ncfg, strides, total, r1, r2):  # pragma: no cover - jit
    n = ncfg.shape[0]
    best_u = -1.0
    best_code = -1
    for code in range(total):
        tu = 0.0
        to = 0.0
        tp = 0.0
        rem = code
        for i in range(n):
            d = rem // strides[i]
            rem -= d * strides[i]
            if d < ncfg[i]:
                tu += util[i, d]
                to += occ[i, d]
                tp += pw[i, d]
            else:
                tu += 0.0
                to += 0.0
                tp += 0.0
        if to <= r1 and tp <= r2 and tu > best_u:
            best_u = tu
            best_code = code
    return best_u, best_code


def _scan_best_numpy(util, occ, pw, ncfg, strides, total, r1, r2,
                     chunk=1 << 18):
    n = len(ncfg)
    best_u = -1.0
    best_code = -1
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
        tu = np.zeros(codes.shape[0], dtype=np.float64)
        to = np.zeros(codes.shape[0], dtype=np.float64)
        tp = np.zeros(codes.shape[0], dtype=np.float64)
        rem = codes
        for i in range(n):
            d = rem // strides[i]
            rem = rem - d * strides[i]
            sel = d < ncfg[i]
            idx = np.where(sel, d, 0)
            tu = tu + np.where(sel, util[i, idx], 0.0)
            to = to + np.where(sel, occ[i, idx], 0.0)
            tp = tp + np.where(sel, pw[i, idx], 0.0)
        feasible = (to <= r1) & (tp <= r2)
        cand = np.where(feasible, tu, -np.inf)
        j = int(np.argmax(cand))
        if cand[j] > best_u:
            best_u = float(cand[j])
            best_code = int(codes[j])
    return best_u, best_code


def scan_best_feasible(util, occ, pw, ncfg, r1, r2, *, force=None):
    """Return (best utility, mixed-radix code) over every assignment.

    ``util/occ/pw`` are (n_tasks, max_configs) arrays padded per row beyond
    ``ncfg[i]``; digit n_i drops task i.  Empty allocations are part of the
    search, so a result is always found.
    """
    ncfg = np.asarray(ncfg, dtype=np.int64)
    n = len(ncfg)
    radix = ncfg + 1
    strides = np.empty(n, dtype=np.int64)
    acc = 1
    for i in range(n - 1, -1, -1):
        strides[i] = acc
        acc *= int(radix[i])
    total = int(acc)
    use_numba = USING_NUMBA if force is None else (force == "numba")
    impl = _scan_best_jit if use_numba else _scan_best_numpy
    best_u, best_code = impl(np.ascontiguousarray(util, dtype=np.float64),
                             np.ascontiguousarray(occ, dtype=np.float64),
                             np.ascontiguousarray(pw, dtype=np.float64),
                             ncfg, strides, total, float(r1), float(r2))
    return float(best_u), int(best_code), strides


# --------------------------------------------------------------------------
# Multiple-choice knapsack table over a quantised scalar resource.
#
# dp[j] = best utility with integer budget j; choice[i, j] records the pick
# for task i (ncfg[i] = dropped).  Ties prefer dropping, then the lowest
# configuration index, identically on both paths.
# --------------------------------------------------------------------------

@njit(cache=True)
def _dp_fill_jit(util, cost, ncfg, budget):  # pragma: no cover - jit
    n = ncfg.shape[0]
    dp = np.zeros(budget + 1, dtype=np.float64)
    choice = np.empty((n, budget + 1), dtype=np.int32)
    for i in range(n):
        new = dp.copy()
        for j in range(budget + 1):
            choice[i, j] = ncfg[i]
        for c in range(ncfg[i]):
            w = cost[i, c]
            u = util[i, c]
            if w > budget:
                continue
            for j in range(w, budget + 1):
                v = dp[j - w] + u
                if v > new[j]:
                    new[j] = v
                    choice[i, j] = c
        dp = new
    return dp, choice


def _dp_fill_numpy(util, cost, ncfg, budget):
    n = len(ncfg)
    dp = np.zeros(budget + 1, dtype=np.float64)
    choice = np.empty((n, budget + 1), dtype=np.int32)
    for i in range(n):
        rows = np.full((ncfg[i] + 1, budget + 1), -np.inf, dtype=np.float64)
        rows[0] = dp  # drop the task
        for c in range(ncfg[i]):
            w = int(cost[i, c])
            if w > budget:
                continue
            rows[1 + c, w:] = dp[:budget + 1 - w] + util[i, c]
        pick = np.argmax(rows, axis=0)
        dp = rows[pick, np.arange(budget + 1)]
        choice[i] = np.where(pick == 0, ncfg[i], pick - 1)
    return dp, choice


def fill_knapsack_table(util, cost, ncfg, budget, *, force=None):
    """Fill the quantised multiple-choice knapsack table.

    ``cost`` holds per-configuration integer costs; returns (dp, choice).
    """
    use_numba = USING_NUMBA if force is None else (force == "numba")
    impl = _dp_fill_jit if use_numba else _dp_fill_numpy
    return impl(np.ascontiguousarray(util, dtype=np.float64),
                np.ascontiguousarray(cost, dtype=np.int64),
                np.asarray(ncfg, dtype=np.int64), int(budget))
