"""Compiled CART induction kernel.

Greedy binary splitting on Gini impurity with per-node random feature
subsets.  Kept separate from the public forest API so the numba surface
stays small; everything here is deterministic given the integer seed.
"""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = ["grow_tree"]

_GAIN_TOL = 1e-12


@njit(cache=True)
def _splitmix64(state):
    # Counter-based 64-bit mixer; cheap, stateless draws for feature subsets.
    state = (state + np.uint64(0x9E3779B97F4A7C15)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    z = state
    z = ((z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & np.uint64(
        0xFFFFFFFFFFFFFFFF
    )
    z = ((z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & np.uint64(
        0xFFFFFFFFFFFFFFFF
    )
    return state, z ^ (z >> np.uint64(31))


@njit(cache=True)
def grow_tree(X, y, m_try, min_leaf, seed):
    """Grow one tree; returns flat node arrays.

    Nodes are indexed from 0 (root); internal nodes store the split
    feature and threshold, leaves have feature -1.  ``fraction`` is the
    positive-class share of the training rows reaching the node and
    ``count`` their number.
    """
    n, m = X.shape
    cap = 2 * n + 1
    feature = np.full(cap, -1, dtype=np.int64)
    threshold = np.zeros(cap, dtype=np.float64)
    left = np.full(cap, -1, dtype=np.int64)
    right = np.full(cap, -1, dtype=np.int64)
    fraction = np.zeros(cap, dtype=np.float64)
    count = np.zeros(cap, dtype=np.int64)

    idx = np.arange(n)
    stack_node = np.zeros(cap, dtype=np.int64)
    stack_lo = np.zeros(cap, dtype=np.int64)
    stack_hi = np.zeros(cap, dtype=np.int64)
    top = 0
    stack_node[0] = 0
    stack_lo[0] = 0
    stack_hi[0] = n
    n_nodes = 1
    state = np.uint64(seed)
    feats = np.arange(m)
    vals = np.empty(n, dtype=np.float64)
    buf = np.empty(n, dtype=np.int64)

    while top >= 0:
        node = stack_node[top]
        lo = stack_lo[top]
        hi = stack_hi[top]
        top -= 1
        cnt = hi - lo
        pos = 0
        for k in range(lo, hi):
            pos += y[idx[k]]
        count[node] = cnt
        fraction[node] = pos / cnt
        if pos == 0 or pos == cnt or cnt < 2 * min_leaf:
            continue

        # partial Fisher-Yates for the feature subset of this node
        for j in range(m_try):
            state, z = _splitmix64(state)
            k = j + int(z % np.uint64(m - j))
            tmp = feats[j]
            feats[j] = feats[k]
            feats[k] = tmp

        p = pos / cnt
        parent_gini = 1.0 - p * p - (1.0 - p) * (1.0 - p)
        best_gain = _GAIN_TOL
        best_f = -1
        best_thr = 0.0
        for j in range(m_try):
            f = feats[j]
            for k in range(cnt):
                vals[k] = X[idx[lo + k], f]
            order = np.argsort(vals[:cnt], kind="mergesort")
            pos_l = 0
            for s in range(1, cnt):
                pos_l += y[idx[lo + order[s - 1]]]
                v_lo = vals[order[s - 1]]
                v_hi = vals[order[s]]
                if v_hi <= v_lo:
                    continue
                n_l = s
                n_r = cnt - s
                if n_l < min_leaf or n_r < min_leaf:
                    continue
                pos_r = pos - pos_l
                p_l = pos_l / n_l
                p_r = pos_r / n_r
                g_l = 1.0 - p_l * p_l - (1.0 - p_l) * (1.0 - p_l)
                g_r = 1.0 - p_r * p_r - (1.0 - p_r) * (1.0 - p_r)
                gain = parent_gini - (n_l * g_l + n_r * g_r) / cnt
                if gain > best_gain:
                    thr = 0.5 * (v_lo + v_hi)
                    if thr >= v_hi:  # adjacent floats; keep the right child nonempty
                        thr = v_lo
                    best_gain = gain
                    best_f = f
                    best_thr = thr
        if best_f < 0:
            continue

        # partition idx[lo:hi] around the split, preserving relative order
        cut = lo
        nb = 0
        for k in range(lo, hi):
            if X[idx[k], best_f] <= best_thr:
                idx[cut] = idx[k]
                cut += 1
            else:
                buf[nb] = idx[k]
                nb += 1
        for k in range(nb):
            idx[cut + k] = buf[k]

        feature[node] = best_f
        threshold[node] = best_thr
        l_id = n_nodes
        r_id = n_nodes + 1
        n_nodes += 2
        left[node] = l_id
        right[node] = r_id
        top += 1
        stack_node[top] = l_id
        stack_lo[top] = lo
        stack_hi[top] = cut
        top += 1
        stack_node[top] = r_id
        stack_lo[top] = cut
        stack_hi[top] = hi

    return (
        feature[:n_nodes],
        threshold[:n_nodes],
        left[:n_nodes],
        right[:n_nodes],
        fraction[:n_nodes],
        count[:n_nodes],
    )
