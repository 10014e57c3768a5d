"""K-means, adjusted Rand index and average-precision AUC-PR."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import comb

from .errors import ConfigError, UndefinedMetricError


@dataclass(frozen=True, eq=False)
class Clustering:
    labels: np.ndarray
    centroids: np.ndarray
    inertia: float
    restarts_used: int
    best_restart: int


def _kmeans_pp(X: np.ndarray, K: int, rng: np.random.Generator) -> np.ndarray:
    n = len(X)
    centres = [X[rng.integers(n)]]
    d2 = np.sum((X - centres[0]) ** 2, axis=1)
    for _ in range(1, K):
        total = d2.sum()
        if total > 0:
            i = rng.choice(n, p=d2 / total)
        else:
            i = rng.integers(n)
        centres.append(X[i])
        d2 = np.minimum(d2, np.sum((X - X[i]) ** 2, axis=1))
    return np.array(centres)


def _assign(X, C):
    d2 = np.sum((X[:, None, :] - C[None, :, :]) ** 2, axis=2)
    lab = np.argmin(d2, axis=1)
    return lab, d2[np.arange(len(X)), lab]


def _lloyd(X, C, max_iter):
    lab, dist = _assign(X, C)
    for _ in range(max_iter):
        C = C.copy()
        for k in range(len(C)):
            members = lab == k
            if members.any():
                C[k] = X[members].mean(axis=0)
            else:
                # revive an empty cluster at the worst-fit point
                far = int(np.argmax(dist))
                C[k] = X[far]
                dist[far] = 0.0
        new_lab, dist = _assign(X, C)
        if np.array_equal(new_lab, lab):
            break
        lab = new_lab
    return lab, C, float(dist.sum())


def kmeans(points, K: int, seed: int = 0, restarts: int = 20, max_iter: int = 300) -> Clustering:
    """Lloyd iterations from k-means++ seeds; best of ``restarts`` by inertia."""
    X = np.asarray(points, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if not 1 <= K <= len(X):
        raise ConfigError(f"cannot form {K} clusters from {len(X)} points")
    best = None
    for r, ss in enumerate(np.random.SeedSequence(seed).spawn(restarts)):
        rng = np.random.default_rng(ss)
        lab, C, inertia = _lloyd(X, _kmeans_pp(X, K, rng), max_iter)
        if best is None or inertia < best[2]:
            best = (lab, C, inertia, r)
    lab, C, inertia, r = best
    return Clustering(lab, C, inertia, restarts, r)


def unit_circle(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=np.float64)
    return np.column_stack([np.cos(theta), np.sin(theta)])


def ari(labels_a, labels_b) -> float:
    """Adjusted Rand index (Hubert & Arabie) from the contingency table."""
    a = np.asarray(labels_a)
    b = np.asarray(labels_b)
    if a.shape != b.shape:
        raise ConfigError(f"label vectors differ in length: {a.shape} vs {b.shape}")
    n = len(a)
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = np.zeros((ai.max(initial=-1) + 1, bi.max(initial=-1) + 1), dtype=np.int64)
    np.add.at(table, (ai, bi), 1)
    sum_ij = comb(table, 2).sum()
    sum_a = comb(table.sum(axis=1), 2).sum()
    sum_b = comb(table.sum(axis=0), 2).sum()
    expected = sum_a * sum_b / comb(n, 2) if n > 1 else 0.0
    max_index = 0.5 * (sum_a + sum_b)
    if max_index == expected:
        return 1.0
    return float((sum_ij - expected) / (max_index - expected))


@dataclass(frozen=True, eq=False)
class PRCurve:
    recall: np.ndarray
    precision: np.ndarray
    auc: float


def auc_pr(scores, is_positive, seed: int = 0) -> PRCurve:
    """Average precision with ties broken by a seeded shuffle."""
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(is_positive, dtype=bool)
    if s.shape != y.shape:
        raise ConfigError("scores and labels differ in length")
    npos = int(y.sum())
    if npos == 0:
        raise UndefinedMetricError("AUC-PR undefined without positives")
    shuffle = np.random.default_rng(seed).permutation(len(s))
    order = shuffle[np.argsort(-s[shuffle], kind="stable")]
    hits = np.cumsum(y[order])
    ranks = np.arange(1, len(s) + 1)
    precision = hits / ranks
    recall = hits / npos
    ap = float(precision[y[order]].sum() / npos)
    return PRCurve(recall, precision, ap)
