"""Triadic hyperedge prediction: split, candidate triples, scoring, AUC-PR."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from . import _kernels
from .errors import ConfigError, SplitError, UndefinedMetricError
from .evalkit import auc_pr
from .hypercore import Hypergraph, build_adjacency, restrict, unweighted_components
from .rangedep import DEFAULT_GAMMA_RANGE, Positions, _row_incoherence, scan_c3
from .report import Report

METHODS = ("random", "linear-model", "arithmetic", "geometric", "harmonic")
DEFAULT_C3_GRID = tuple(round(0.1 * k, 1) for k in range(16))


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float
    mode: str = "time"  # "time" | "random"
    seed: int = 0
    max_attempts: int = 100

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise ConfigError(f"train fraction {self.train_fraction} outside (0, 1)")
        if self.mode not in ("time", "random"):
            raise ConfigError(f"unknown split mode {self.mode!r}")


@dataclass(frozen=True)
class PredictionConfig:
    c3_grid: tuple[float, ...] = DEFAULT_C3_GRID
    gamma_range: tuple[float, float] = DEFAULT_GAMMA_RANGE
    dims: int = 3
    eig_floor: float = 0.01
    seed: int = 0


def _flat_edges(h: Hypergraph):
    cards, rows, seqs, times = [], [], [], []
    for t, arr in h.edges.items():
        cards.append(np.full(len(arr), t))
        rows.append(np.arange(len(arr)))
        seqs.append(h.seq[t])
        times.append(h.times[t] if h.times is not None else np.zeros(len(arr)))
    if not cards:
        return (np.zeros(0, int),) * 3 + (np.zeros(0),)
    return np.concatenate(cards), np.concatenate(rows), np.concatenate(seqs), np.concatenate(times)


def _partition(h: Hypergraph, cards, rows, train_idx):
    keep = {t: np.zeros(len(a), dtype=bool) for t, a in h.edges.items()}
    for t in keep:
        sel = train_idx[cards[train_idx] == t]
        keep[t][rows[sel]] = True
    return h.select(keep), h.select({t: ~k for t, k in keep.items()})


def split(h: Hypergraph, spec: SplitSpec) -> tuple[Hypergraph, Hypergraph]:
    """Edge-disjoint train/test hypergraphs on the same node set."""
    cards, rows, seqs, times = _flat_edges(h)
    m = len(cards)
    n_train = int(round(spec.train_fraction * m))
    if spec.mode == "time":
        if not h.has_timestamps:
            raise ConfigError("timestamp split needs a timestamped hypergraph")
        order = np.lexsort((seqs, times))
        return _partition(h, cards, rows, order[:n_train])
    base = np.argsort(seqs, kind="stable")
    rng = np.random.default_rng(spec.seed)
    for _ in range(spec.max_attempts):
        order = base[rng.permutation(m)]
        train, test = _partition(h, cards, rows, order[:n_train])
        if len(unweighted_components(train)) == 1:
            return train, test
    raise SplitError(f"no connected training sample in {spec.max_attempts} attempts")


def _keys(triples: np.ndarray, n: int) -> np.ndarray:
    return (triples[:, 0] * n + triples[:, 1]) * n + triples[:, 2]


def candidate_triples(train: Hypergraph, nodes=None) -> np.ndarray:
    """All triples within ``nodes`` that are not already training triangles."""
    nodes = np.arange(train.n) if nodes is None else np.unique(np.asarray(nodes, dtype=np.int64))
    if len(nodes) < 3:
        raise ConfigError("need at least three nodes for triangle candidates")
    triples = nodes[_kernels.all_triples(len(nodes))]
    existing = train.edges_of(3)
    if len(existing):
        keep = ~np.isin(_keys(triples, train.n), _keys(existing, train.n))
        triples = triples[keep]
    return triples


def label_candidates(triples: np.ndarray, test: Hypergraph) -> np.ndarray:
    return np.isin(_keys(triples, test.n), _keys(test.edges_of(3), test.n))


def score_means(train: Hypergraph, triples: np.ndarray) -> dict[str, np.ndarray]:
    """Arithmetic, geometric and harmonic means of a triple's dyadic weights."""
    W = build_adjacency(train, 2).toarray().astype(np.float64)
    w = np.stack(
        [W[triples[:, 0], triples[:, 1]], W[triples[:, 0], triples[:, 2]], W[triples[:, 1], triples[:, 2]]],
        axis=1,
    )
    allpos = (w > 0).all(axis=1)
    geo = np.zeros(len(w))
    harm = np.zeros(len(w))
    wp = w[allpos]
    geo[allpos] = np.cbrt(wp.prod(axis=1))
    harm[allpos] = 3.0 / (1.0 / wp).sum(axis=1)
    return {"arithmetic": w.mean(axis=1), "geometric": geo, "harmonic": harm}


@dataclass(frozen=True, eq=False)
class LinearModelScores:
    scores: np.ndarray
    c3_star: float
    gamma_star: float
    log_likelihood: float


def score_linear_model(
    train: Hypergraph,
    triples: np.ndarray,
    c3_grid=DEFAULT_C3_GRID,
    gamma_range=DEFAULT_GAMMA_RANGE,
    d: int = 3,
    eig_floor: float = 0.01,
) -> LinearModelScores:
    """Hyperedge probability under the maximum-likelihood linear model."""
    scan = scan_c3(train, "linear", c3_grid, d=d, eig_floor=eig_floor, gamma_range=gamma_range)
    if scan.best is None:
        reasons = "; ".join(sorted({r.skipped for r in scan.rows}))
        raise UndefinedMetricError(f"no c3 grid point admits a linear embedding: {reasons}")
    P = Positions.from_embedding(scan.best_embedding).pair_incoherence()
    z = scan.best.gamma_star * scan.best_c3 * _row_incoherence(P, triples)
    return LinearModelScores(expit(-z), scan.best_c3, scan.best.gamma_star, scan.best.log_likelihood)


@dataclass(frozen=True, eq=False)
class PredictionResult:
    auc: dict[str, float]
    n_candidates: int
    n_positives: int
    lcc_size: int
    c3_star: float
    gamma_star: float
    spec: SplitSpec
    config: PredictionConfig
    extra: dict = field(default_factory=dict)

    @property
    def base_rate(self) -> float:
        return self.n_positives / self.n_candidates

    def report(self) -> Report:
        meta = {
            "train_fraction": self.spec.train_fraction,
            "split": self.spec.mode,
            "seed": self.spec.seed,
            "lcc_size": self.lcc_size,
            "n_candidates": self.n_candidates,
            "n_positives": self.n_positives,
            "base_rate": self.base_rate,
            "c3_star": self.c3_star,
            "gamma_star": self.gamma_star,
            "dims": self.config.dims,
            "eig_floor": self.config.eig_floor,
        }
        meta.update(self.extra)
        return Report("prediction", ["method", "auc_pr"], [[m, self.auc[m]] for m in METHODS], meta)


def run_prediction(h: Hypergraph, spec: SplitSpec, config: PredictionConfig = PredictionConfig()) -> PredictionResult:
    train, test = split(h, spec)
    lcc = unweighted_components(train)[0]
    if len(lcc) < train.n:
        warnings.warn(f"training graph disconnected; keeping LCC of {len(lcc)}/{train.n} nodes", stacklevel=2)
    train, _ = restrict(train, lcc)
    test, _ = restrict(test, lcc)
    triples = candidate_triples(train)
    positive = label_candidates(triples, test)
    if not positive.any():
        raise UndefinedMetricError("test set has no triangles among the candidate triples")
    lin = score_linear_model(train, triples, config.c3_grid, config.gamma_range, config.dims, config.eig_floor)
    scores = {
        "random": np.random.default_rng(spec.seed).random(len(triples)),
        "linear-model": lin.scores,
        **score_means(train, triples),
    }
    auc = {m: auc_pr(scores[m], positive, seed=spec.seed).auc for m in METHODS}
    return PredictionResult(
        auc=auc,
        n_candidates=len(triples),
        n_positives=int(positive.sum()),
        lcc_size=len(lcc),
        c3_star=lin.c3_star,
        gamma_star=lin.gamma_star,
        spec=spec,
        config=config,
    )
