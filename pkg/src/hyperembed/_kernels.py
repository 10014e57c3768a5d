"""Compiled loops over the tuple universe.

Tuples are visited in lexicographic order ``i < j < k`` everywhere so that
array positions agree across kernels.
"""
import numba
import numpy as np


@numba.njit(cache=True)
def pair_values(P):
    n = P.shape[0]
    out = np.empty(n * (n - 1) // 2)
    p = 0
    for i in range(n):
        for j in range(i + 1, n):
            out[p] = P[i, j]
            p += 1
    return out


@numba.njit(cache=True)
def triple_values(P):
    n = P.shape[0]
    out = np.empty(n * (n - 1) * (n - 2) // 6)
    p = 0
    for i in range(n):
        for j in range(i + 1, n):
            pij = P[i, j]
            for k in range(j + 1, n):
                out[p] = pij + P[i, k] + P[j, k]
                p += 1
    return out


@numba.njit(cache=True, fastmath=True)
def softplus_neg_sum(values, scale):
    """sum(log(1 + exp(-scale * v))) for non-negative ``scale * v``."""
    s = 0.0
    for k in range(values.shape[0]):
        s += np.log1p(np.exp(-scale * values[k]))
    return s


@numba.njit(cache=True)
def sample_pairs(P, scale, u):
    n = P.shape[0]
    out = np.empty((u.shape[0], 2), dtype=np.int64)
    m = 0
    p = 0
    for i in range(n):
        for j in range(i + 1, n):
            if u[p] * (1.0 + np.exp(scale * P[i, j])) < 1.0:
                out[m, 0] = i
                out[m, 1] = j
                m += 1
            p += 1
    return out[:m].copy()


@numba.njit(cache=True)
def sample_triples(P, scale, u):
    n = P.shape[0]
    cap = 1024
    out = np.empty((cap, 3), dtype=np.int64)
    m = 0
    p = 0
    for i in range(n):
        for j in range(i + 1, n):
            pij = P[i, j]
            for k in range(j + 1, n):
                z = scale * (pij + P[i, k] + P[j, k])
                if u[p] * (1.0 + np.exp(z)) < 1.0:
                    if m == cap:
                        cap *= 2
                        grown = np.empty((cap, 3), dtype=np.int64)
                        grown[:m] = out[:m]
                        out = grown
                    out[m, 0] = i
                    out[m, 1] = j
                    out[m, 2] = k
                    m += 1
                p += 1
    return out[:m].copy()


@numba.njit(cache=True)
def all_triples(n):
    out = np.empty((n * (n - 1) * (n - 2) // 6, 3), dtype=np.int64)
    p = 0
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                out[p, 0] = i
                out[p, 1] = j
                out[p, 2] = k
                p += 1
    return out
