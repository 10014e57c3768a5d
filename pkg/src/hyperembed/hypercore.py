"""Hypergraph container and the per-cardinality Laplacian construction."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import CardinalityError, ConfigError, InvalidWeightError


def _empty_rows(t: int) -> np.ndarray:
    return np.zeros((0, t), dtype=np.int64)


@dataclass(frozen=True, eq=False)
class Hypergraph:
    """Undirected, unweighted hypergraph on nodes ``0..n-1``.

    Hyperedges are grouped by cardinality: ``edges[t]`` is an ``(m_t, t)``
    integer array whose rows are sorted node indices. Rows are unique and
    kept in input order; ``seq[t]`` holds each row's position in the
    original input stream so that a global order can be recovered (used by
    the timestamp split to break ties by file order).
    """

    n: int
    edges: Mapping[int, np.ndarray]
    seq: Mapping[int, np.ndarray]
    times: Mapping[int, np.ndarray] | None = None
    max_cardinality: int = 2
    duplicates_dropped: int = field(default=0, compare=False)

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[Iterable[int]],
        times: Sequence[float] | None = None,
        max_cardinality: int | None = None,
    ) -> "Hypergraph":
        """Build from an iterable of node collections.

        Duplicate node-sets are dropped with a warning; when timestamps are
        given the earliest occurrence survives.
        """
        rows = [tuple(int(v) for v in e) for e in edges]
        if times is not None:
            times = np.asarray(times, dtype=np.float64)
            if len(times) != len(rows):
                raise ConfigError(f"{len(times)} timestamps for {len(rows)} hyperedges")
        by_card: dict[int, list[int]] = {}
        for i, r in enumerate(rows):
            by_card.setdefault(len(r), []).append(i)
        arrays, seqs, tarr = {}, {}, {}
        for t, idx in by_card.items():
            arrays[t] = np.array([rows[i] for i in idx], dtype=np.int64).reshape(len(idx), t)
            seqs[t] = np.asarray(idx, dtype=np.int64)
            if times is not None:
                tarr[t] = times[seqs[t]]
        return cls.from_arrays(n, arrays, seqs, tarr if times is not None else None, max_cardinality)

    @classmethod
    def from_arrays(
        cls,
        n: int,
        edges: Mapping[int, np.ndarray],
        seq: Mapping[int, np.ndarray] | None = None,
        times: Mapping[int, np.ndarray] | None = None,
        max_cardinality: int | None = None,
        check_duplicates: bool = True,
    ) -> "Hypergraph":
        n = int(n)
        if n < 0:
            raise ConfigError("node count must be non-negative")
        present = [t for t, a in edges.items() if len(a)]
        T = max(present, default=2) if max_cardinality is None else int(max_cardinality)
        if T < 2:
            raise CardinalityError(f"max cardinality must be at least 2, got {T}")

        if seq is None:
            seq, offset = {}, 0
            for t in sorted(edges):
                m = len(edges[t])
                seq[t] = np.arange(offset, offset + m, dtype=np.int64)
                offset += m

        out_e, out_s, out_t = {}, {}, {}
        dropped = 0
        for t in sorted(edges):
            arr = np.asarray(edges[t], dtype=np.int64)
            if arr.size == 0:
                continue
            arr = np.sort(arr.reshape(-1, t), axis=1)
            if t < 2 or t > T:
                raise CardinalityError(f"hyperedge of cardinality {t} outside [2, {T}]")
            if np.any(arr[:, 1:] == arr[:, :-1]):
                bad = arr[np.any(arr[:, 1:] == arr[:, :-1], axis=1)][0]
                raise ConfigError(f"hyperedge {tuple(bad.tolist())} repeats a node")
            if arr.min() < 0 or arr.max() >= n:
                raise ConfigError(f"node index out of range [0, {n})")
            s = np.asarray(seq[t], dtype=np.int64)
            tm = None if times is None else np.asarray(times[t], dtype=np.float64)
            if check_duplicates:
                # earliest (time, seq) occurrence wins, survivors stay in seq order
                order = np.lexsort((s,)) if tm is None else np.lexsort((s, tm))
                _, first = np.unique(arr[order], axis=0, return_index=True)
                keep = np.sort(order[first])
                keep = keep[np.argsort(s[keep], kind="stable")]
                dropped += len(arr) - len(keep)
                arr, s = arr[keep], s[keep]
                tm = None if tm is None else tm[keep]
            out_e[t], out_s[t] = arr, s
            if tm is not None:
                out_t[t] = tm
        if dropped:
            warnings.warn(f"dropped {dropped} duplicate hyperedges", stacklevel=2)
        return cls(
            n=n,
            edges=out_e,
            seq=out_s,
            times=out_t if times is not None else None,
            max_cardinality=T,
            duplicates_dropped=dropped,
        )

    @property
    def cardinalities(self) -> tuple[int, ...]:
        return tuple(sorted(t for t, a in self.edges.items() if len(a)))

    @property
    def num_edges(self) -> int:
        return int(sum(len(a) for a in self.edges.values()))

    @property
    def has_timestamps(self) -> bool:
        return self.times is not None

    def edges_of(self, t: int) -> np.ndarray:
        return self.edges.get(t, _empty_rows(t))

    def ordered(self) -> list[tuple[tuple[int, ...], float | None]]:
        """All hyperedges in input order as ``(nodes, time)`` pairs."""
        items = []
        for t, arr in self.edges.items():
            tm = self.times[t] if self.times is not None else None
            for k, (row, s) in enumerate(zip(arr.tolist(), self.seq[t].tolist())):
                items.append((s, tuple(row), None if tm is None else float(tm[k])))
        items.sort(key=lambda x: x[0])
        return [(r, tm) for _, r, tm in items]

    def edge_set(self) -> set[frozenset[int]]:
        return {frozenset(r) for arr in self.edges.values() for r in arr.tolist()}

    def select(self, keep: Mapping[int, np.ndarray]) -> "Hypergraph":
        """Sub-hypergraph on the same nodes keeping rows flagged in ``keep[t]``."""
        e, s, tm = {}, {}, {}
        for t, arr in self.edges.items():
            mask = keep.get(t, np.zeros(len(arr), dtype=bool))
            e[t], s[t] = arr[mask], self.seq[t][mask]
            if self.times is not None:
                tm[t] = self.times[t][mask]
        return Hypergraph(
            n=self.n,
            edges=e,
            seq=s,
            times=tm if self.times is not None else None,
            max_cardinality=self.max_cardinality,
        )


@dataclass(frozen=True)
class CardinalityWeights:
    """Non-negative weight ``c_t`` per hyperedge cardinality ``t``."""

    c: Mapping[int, float]

    def __post_init__(self):
        for t, w in self.c.items():
            if int(t) < 2:
                raise CardinalityError(f"weight given for cardinality {t} < 2")
            if not math.isfinite(w) or w < 0:
                raise InvalidWeightError(f"weight c_{t} = {w} must be finite and >= 0")
        object.__setattr__(self, "c", {int(t): float(w) for t, w in sorted(self.c.items())})

    @classmethod
    def dyadic_triadic(cls, c2: float = 1.0, c3: float = 1.0 / 3.0) -> "CardinalityWeights":
        return cls({2: c2, 3: c3})

    def __getitem__(self, t: int) -> float:
        return self.c.get(t, 0.0)

    def items(self):
        return self.c.items()


def as_weights(weights) -> CardinalityWeights:
    if isinstance(weights, CardinalityWeights):
        return weights
    return CardinalityWeights(dict(weights))


@dataclass(frozen=True, eq=False)
class LaplacianBundle:
    """Per-cardinality adjacency, degree and Laplacian matrices.

    ``L`` is the weighted combination ``sum_t c_t * Lt[t]``; everything is
    stored as scipy CSR matrices.
    """

    W: Mapping[int, sp.csr_matrix]
    D: Mapping[int, sp.csr_matrix]
    Lt: Mapping[int, sp.csr_matrix]
    L: sp.csr_matrix
    weights: CardinalityWeights

    @property
    def n(self) -> int:
        return self.L.shape[0]

    def dense(self) -> np.ndarray:
        return self.L.toarray()


def build_adjacency(h: Hypergraph, t: int) -> sp.csr_matrix:
    """Co-membership counts of node pairs in cardinality-``t`` hyperedges."""
    if not isinstance(t, (int, np.integer)) or t < 2 or t > h.max_cardinality:
        raise CardinalityError(f"cardinality {t} outside [2, {h.max_cardinality}]")
    arr = h.edges_of(t)
    pairs = list(combinations(range(t), 2))
    if len(arr) == 0:
        return sp.csr_matrix((h.n, h.n), dtype=np.int64)
    rows = np.concatenate([arr[:, a] for a, b in pairs] + [arr[:, b] for a, b in pairs])
    cols = np.concatenate([arr[:, b] for a, b in pairs] + [arr[:, a] for a, b in pairs])
    data = np.ones(len(rows), dtype=np.int64)
    W = sp.coo_matrix((data, (rows, cols)), shape=(h.n, h.n)).tocsr()
    W.sum_duplicates()
    return W


def build_laplacian(h: Hypergraph, weights) -> LaplacianBundle:
    weights = as_weights(weights)
    for t in h.cardinalities:
        if t not in weights.c:
            warnings.warn(
                f"no weight for cardinality {t}; its hyperedges are ignored by the Laplacian",
                stacklevel=2,
            )
    W, D, Lt = {}, {}, {}
    L = sp.csr_matrix((h.n, h.n), dtype=np.float64)
    for t in range(2, h.max_cardinality + 1):
        W[t] = build_adjacency(h, t)
        D[t] = sp.diags(np.asarray(W[t].sum(axis=1)).ravel(), format="csr", dtype=np.int64)
        Lt[t] = (D[t] - W[t]).tocsr()
        if weights[t] > 0:
            L = L + weights[t] * Lt[t].astype(np.float64)
    return LaplacianBundle(W=W, D=D, Lt=Lt, L=sp.csr_matrix(L), weights=weights)


def quadratic_form(L, x) -> float:
    """``x'Lx`` for real ``x`` or ``x^H L x`` for complex ``x``."""
    x = np.asarray(x)
    if x.ndim != 1 or x.shape[0] != L.shape[0]:
        raise ConfigError(f"vector of shape {x.shape} does not match {L.shape[0]} nodes")
    Lx = L @ x
    if np.iscomplexobj(x):
        return float(np.real(np.vdot(x, Lx)))
    return float(x @ Lx)


def components_of_matrix(M) -> list[np.ndarray]:
    """Connected components of the graph of nonzero off-diagonal entries.

    Sorted by size descending, ties broken by the smallest member.
    """
    A = sp.csr_matrix(M, copy=True)
    A.setdiag(0)
    A.eliminate_zeros()
    ncomp, lab = connected_components(A, directed=False)
    comps = [np.flatnonzero(lab == c) for c in range(ncomp)]
    comps.sort(key=lambda c: (-len(c), c[0]))
    return comps


def binarized_components(h: Hypergraph, weights) -> list[np.ndarray]:
    return components_of_matrix(build_laplacian(h, weights).L)


def unweighted_components(h: Hypergraph) -> list[np.ndarray]:
    """Components when every cardinality present carries weight 1."""
    return binarized_components(h, {t: 1.0 for t in range(2, h.max_cardinality + 1)})


def restrict(h: Hypergraph, nodes) -> tuple[Hypergraph, np.ndarray]:
    """Induced sub-hypergraph on ``nodes``, reindexed densely.

    Returns the new hypergraph and ``index_map`` with ``index_map[new] = old``.
    """
    nodes = np.unique(np.asarray(nodes, dtype=np.int64))
    if nodes.size == 0:
        raise ConfigError("cannot restrict to an empty node set")
    if nodes[0] < 0 or nodes[-1] >= h.n:
        raise ConfigError(f"node index out of range [0, {h.n})")
    lookup = np.full(h.n, -1, dtype=np.int64)
    lookup[nodes] = np.arange(len(nodes))
    e, s, tm = {}, {}, {}
    for t, arr in h.edges.items():
        mask = (lookup[arr] >= 0).all(axis=1)
        e[t] = lookup[arr[mask]]
        s[t] = h.seq[t][mask]
        if h.times is not None:
            tm[t] = h.times[t][mask]
    sub = Hypergraph(
        n=len(nodes),
        edges=e,
        seq=s,
        times=tm if h.times is not None else None,
        max_cardinality=h.max_cardinality,
    )
    return sub, nodes


def node_degrees(h: Hypergraph) -> np.ndarray:
    """Row sums of the unweighted sum of all adjacency matrices."""
    deg = np.zeros(h.n, dtype=np.int64)
    for t, arr in h.edges.items():
        # each node of a t-edge gains t-1 co-members
        np.add.at(deg, arr.ravel(), t - 1)
    return deg


def trim_by_degree(h: Hypergraph, fraction: float) -> tuple[Hypergraph, np.ndarray]:
    """Drop the ``ceil(fraction * n)`` highest- and lowest-degree nodes."""
    if not 0 <= fraction < 0.5:
        raise ConfigError(f"trim fraction {fraction} outside [0, 0.5)")
    k = math.ceil(fraction * h.n)
    if k == 0:
        return restrict(h, np.arange(h.n))
    deg = node_degrees(h)
    idx = np.arange(h.n)
    low = np.lexsort((idx, deg))[:k]
    high = np.lexsort((idx, -deg))[:k]
    keep = np.setdiff1d(idx, np.concatenate([low, high]))
    return restrict(h, keep)
