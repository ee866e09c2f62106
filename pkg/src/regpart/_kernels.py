"""Compiled inner loops for residue-ring series arithmetic.

All arrays are int64 holding canonical residues in [0, M) with M < 2**31, so
a single product fits comfortably; accumulators are folded back mod M only
when they approach the int64 limit.  ``period`` is the number of rows that
may be accumulated before folding; see ``fold_period``.
"""

import numba
import numpy as np

_FOLD = 1 << 62


def fold_period(M):
    return max(1, ((1 << 63) - 1) // (M * M) - 1)


@numba.njit(cache=True)
def mul_dense(a, b, n, M, period):
    """First n coefficients of a*b mod M (schoolbook)."""
    out = np.zeros(n, np.int64)
    la = min(a.shape[0], n)
    lb = b.shape[0]
    rows = 0
    for i in range(la):
        ai = a[i]
        if ai == 0:
            continue
        top = min(lb, n - i)
        for j in range(top):
            out[i + j] += ai * b[j]
        # one row adds at most M**2 per slot
        rows += 1
        if rows == period:
            rows = 0
            for j in range(n):
                out[j] %= M
    for j in range(n):
        out[j] %= M
    return out


@numba.njit(cache=True)
def mul_sparse(dense, idx, val, n, M, period):
    """First n coefficients of dense * sum(val[k] q**idx[k]) mod M."""
    out = np.zeros(n, np.int64)
    ld = dense.shape[0]
    K = idx.shape[0]
    for k in range(K):
        e = idx[k]
        if e >= n:
            break
        v = val[k]
        top = min(ld, n - e)
        for j in range(top):
            out[e + j] += v * dense[j]
        if k % period == period - 1:
            for j in range(n):
                out[j] %= M
    for j in range(n):
        out[j] %= M
    return out


@numba.njit(cache=True)
def div_sparse(h, idx, val, inv0, M):
    """Solve g * d = h for g, where d = sum(val[k] q**idx[k]), idx[0] == 0.

    ``inv0`` is the inverse of val[0] mod M; idx must be sorted ascending.
    Cost is len(h) * (number of terms of d below len(h)).
    """
    n = h.shape[0]
    g = np.zeros(n, np.int64)
    K = idx.shape[0]
    for i in range(n):
        acc = h[i]
        for k in range(1, K):
            e = idx[k]
            if e > i:
                break
            acc -= val[k] * g[i - e]
            if acc < -_FOLD:
                acc %= M
        g[i] = ((acc % M) * inv0) % M
    return g
