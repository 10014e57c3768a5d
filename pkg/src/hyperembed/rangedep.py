"""Range-dependent random hypergraph model.

A node tuple ``R`` becomes a hyperedge independently with probability
``1 / (1 + exp(gamma * c_|R| * I(x, R)))`` where ``I`` is the linear or
periodic incoherence of the tuple's positions. Everything here works on the
full tuple universe (all node subsets of cardinality ``2..T``), which costs
``O(n^T)``; ``T = 3`` is the default.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Callable, Literal, Sequence

import numpy as np
from scipy.special import expit

from . import _kernels
from .errors import AssumptionViolation, CardinalityError, ConfigError, InsufficientSpectrumError
from .hypercore import CardinalityWeights, Hypergraph, as_weights, build_laplacian
from .spectral import (
    DEFAULT_EIG_FLOOR,
    LinearEmbedding,
    PeriodicEmbedding,
    embed_linear,
    embed_periodic,
)

Geometry = Literal["linear", "periodic"]
GEOMETRIES = ("linear", "periodic")
DEFAULT_GAMMA_RANGE = (1e-3, 1e4)
DEFAULT_MAX_CARDINALITY = 3
_COST_WARN_TUPLES = 20_000_000


def _check_geometry(geometry: str) -> None:
    if geometry not in GEOMETRIES:
        raise ConfigError(f"unknown geometry {geometry!r}; expected 'linear' or 'periodic'")


@dataclass(frozen=True, eq=False)
class Positions:
    """Node positions: ``(n, d)`` coordinates or ``(n,)`` angles."""

    geometry: Geometry
    values: np.ndarray

    def __post_init__(self):
        _check_geometry(self.geometry)
        v = np.asarray(self.values, dtype=np.float64)
        if self.geometry == "linear":
            v = v.reshape(len(v), -1)
        elif v.ndim != 1:
            raise ConfigError("periodic positions must be a vector of angles")
        object.__setattr__(self, "values", v)

    @classmethod
    def linear(cls, x) -> "Positions":
        return cls("linear", x)

    @classmethod
    def periodic(cls, theta) -> "Positions":
        return cls("periodic", theta)

    @classmethod
    def from_embedding(cls, emb: LinearEmbedding | PeriodicEmbedding) -> "Positions":
        if isinstance(emb, LinearEmbedding):
            return cls("linear", emb.coords)
        return cls("periodic", emb.theta)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def pair_incoherence(self) -> np.ndarray:
        """Matrix of ``I(x, {i, j})``; the ordered-pair sum counts each pair twice."""
        v = self.values
        if self.geometry == "linear":
            diff = v[:, None, :] - v[None, :, :]
            return 2.0 * np.einsum("ijk,ijk->ij", diff, diff)
        return 2.0 * (2.0 - 2.0 * np.cos(v[:, None] - v[None, :]))


@dataclass(frozen=True)
class ModelSpec:
    geometry: Geometry
    weights: CardinalityWeights
    gamma: float
    max_cardinality: int = DEFAULT_MAX_CARDINALITY

    def __post_init__(self):
        _check_geometry(self.geometry)
        object.__setattr__(self, "weights", as_weights(self.weights))
        if not self.gamma > 0:
            raise ConfigError(f"gamma must be positive, got {self.gamma}")
        if self.max_cardinality < 2:
            raise CardinalityError("max cardinality must be at least 2")


@dataclass(frozen=True)
class LikelihoodReport:
    log_likelihood: float
    gamma_star: float
    edge_term: float
    null_term: float
    evaluations: int = 1
    at_boundary: bool = False
    geometry: str = ""


def _tuple_check(pos: Positions, R) -> np.ndarray:
    R = np.asarray(list(R), dtype=np.int64)
    if len(set(R.tolist())) != len(R):
        raise ConfigError(f"tuple {tuple(R.tolist())} repeats a node")
    if R.size and (R.min() < 0 or R.max() >= pos.n):
        raise ConfigError(f"node index out of range [0, {pos.n})")
    return R


def incoherence_linear(pos: Positions, R) -> float:
    if pos.geometry != "linear":
        raise ConfigError("linear incoherence needs linear positions")
    R = _tuple_check(pos, R)
    x = pos.values[R]
    return float(sum(np.sum((x[a] - x[b]) ** 2) for a in range(len(R)) for b in range(len(R))))


def incoherence_periodic(pos: Positions, R) -> float:
    if pos.geometry != "periodic":
        raise ConfigError("periodic incoherence needs angle positions")
    R = _tuple_check(pos, R)
    th = pos.values[R]
    return float(sum(2.0 - 2.0 * math.cos(th[a] - th[b]) for a in range(len(R)) for b in range(len(R))))


def incoherence(pos: Positions, R) -> float:
    if pos.geometry == "linear":
        return incoherence_linear(pos, R)
    return incoherence_periodic(pos, R)


def edge_probability(model: ModelSpec, pos: Positions, R) -> float:
    R = list(R)
    z = model.gamma * model.weights[len(R)] * incoherence(pos, R)
    return float(expit(-z))


def log_edge_odds(model: ModelSpec, pos: Positions, R) -> float:
    """``ln(f / (1 - f))``, which is linear in the incoherence."""
    R = list(R)
    return -model.gamma * model.weights[len(R)] * incoherence(pos, R)


def tuple_probabilities(model: ModelSpec, pos: Positions, tuples: np.ndarray) -> np.ndarray:
    """Vectorised hyperedge probabilities for rows of ``tuples`` (one cardinality)."""
    tuples = np.asarray(tuples, dtype=np.int64)
    t = tuples.shape[1]
    P = pos.pair_incoherence()
    return expit(-model.gamma * model.weights[t] * _row_incoherence(P, tuples))


def _row_incoherence(P: np.ndarray, rows: np.ndarray) -> np.ndarray:
    t = rows.shape[1]
    out = np.zeros(len(rows))
    for a, b in combinations(range(t), 2):
        out += P[rows[:, a], rows[:, b]]
    return out


def universe_incoherence(P: np.ndarray, t: int) -> np.ndarray:
    """Incoherence of every ``t``-subset of nodes, lexicographic order."""
    n = P.shape[0]
    if n < t:
        return np.zeros(0)
    if t == 2:
        return _kernels.pair_values(P)
    if t == 3:
        return _kernels.triple_values(P)
    total = math.comb(n, t)
    if total > _COST_WARN_TUPLES:
        warnings.warn(f"enumerating {total} tuples of cardinality {t}", stacklevel=2)
    rows = np.array(list(combinations(range(n), t)), dtype=np.int64)
    return _row_incoherence(P, rows)


class LikelihoodSurface:
    """Log-likelihood of a fixed hypergraph and embedding as a function of gamma.

    The tuple incoherences are computed once; each evaluation is then a
    single pass over the universe.
    """

    def __init__(self, geometry, weights, pos: Positions, h: Hypergraph, max_cardinality=None):
        _check_geometry(geometry)
        if pos.geometry != geometry:
            raise ConfigError(f"{pos.geometry} positions given for a {geometry} model")
        if pos.n != h.n:
            raise ConfigError(f"{pos.n} positions for {h.n} nodes")
        T = DEFAULT_MAX_CARDINALITY if max_cardinality is None else int(max_cardinality)
        if any(t > T for t in h.cardinalities):
            raise CardinalityError(f"hypergraph has hyperedges larger than T = {T}")
        self.geometry = geometry
        self.weights = as_weights(weights)
        self.cards = list(range(2, T + 1))
        P = pos.pair_incoherence()
        self.edge_sums = {t: float(np.sum(_row_incoherence(P, h.edges_of(t)))) for t in self.cards}
        self.universe = {t: universe_incoherence(P, t) for t in self.cards}
        self.evaluations = 0

    def terms(self, gamma: float) -> tuple[float, float]:
        self.evaluations += 1
        edge = 0.0
        null = 0.0
        for t in self.cards:
            c = self.weights[t]
            edge -= gamma * c * self.edge_sums[t]
            if c == 0.0:
                null -= len(self.universe[t]) * math.log(2.0)
            else:
                null -= _kernels.softplus_neg_sum(self.universe[t], gamma * c)
        return edge, null

    def __call__(self, gamma: float) -> float:
        e, z = self.terms(gamma)
        return e + z

    def report(self, gamma: float, **kw) -> LikelihoodReport:
        e, z = self.terms(gamma)
        return LikelihoodReport(
            log_likelihood=e + z,
            gamma_star=float(gamma),
            edge_term=e,
            null_term=z,
            evaluations=self.evaluations,
            geometry=self.geometry,
            **kw,
        )


def log_likelihood(model: ModelSpec, pos: Positions, h: Hypergraph) -> LikelihoodReport:
    surface = LikelihoodSurface(model.geometry, model.weights, pos, h, model.max_cardinality)
    return surface.report(model.gamma)


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f: Callable[[float], float], lo: float, hi: float, tol: float):
    """Maximise a unimodal ``f`` on ``[lo, hi]`` until the bracket is below ``tol``.

    Returns ``(x, f(x), lo, hi)`` with the final bracket.
    """
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    if fc >= fd:
        return c, fc, a, b
    return d, fd, a, b


def _fit(surface: LikelihoodSurface, lo: float, hi: float, rtol: float, bracket=None):
    """Golden search in log-gamma; returns the report and the final log bracket."""
    if not 0 < lo < hi:
        raise ConfigError(f"invalid gamma range ({lo}, {hi})")
    f = lambda u: surface(math.exp(u))  # noqa: E731
    ulo, uhi = math.log(lo), math.log(hi)
    a, b = (ulo, uhi) if bracket is None else bracket
    tol = math.log1p(rtol)
    u, fu, a, b = golden_section_max(f, a, b, tol)
    flo, fhi = f(ulo), f(uhi)
    at_boundary = False
    if fhi >= fu and fhi >= flo:
        u, at_boundary = uhi, True
    elif flo >= fu:
        u, at_boundary = ulo, True
    elif min(u - ulo, uhi - u) <= tol:
        at_boundary = True
    gamma = hi if u == uhi else lo if u == ulo else math.exp(u)
    return surface.report(gamma, at_boundary=at_boundary), (a, b)


def fit_gamma(
    geometry: Geometry,
    weights,
    pos: Positions,
    h: Hypergraph,
    gamma_range: tuple[float, float] = DEFAULT_GAMMA_RANGE,
    rtol: float = 1e-6,
    max_cardinality: int = DEFAULT_MAX_CARDINALITY,
    surface: LikelihoodSurface | None = None,
) -> LikelihoodReport:
    """Maximum-likelihood decay rate over ``gamma_range``.

    The log-likelihood is concave in gamma, so a golden-section search in
    log-gamma converges to the global maximiser. A maximiser on (or tied
    with) a range endpoint is flagged via ``at_boundary``.
    """
    lo, hi = map(float, gamma_range)
    if surface is None:
        if not 0 < lo < hi:
            raise ConfigError(f"invalid gamma range ({lo}, {hi})")
        surface = LikelihoodSurface(geometry, weights, pos, h, max_cardinality)
    return _fit(surface, lo, hi, rtol)[0]


def sample(model: ModelSpec, pos: Positions, seed=None) -> Hypergraph:
    """Draw each tuple independently with its hyperedge probability."""
    if pos.geometry != model.geometry:
        raise ConfigError(f"{pos.geometry} positions given for a {model.geometry} model")
    rng = np.random.default_rng(seed)
    P = pos.pair_incoherence()
    n = pos.n
    edges = {}
    for t in range(2, model.max_cardinality + 1):
        total = math.comb(n, t)
        u = rng.random(total)
        scale = model.gamma * model.weights[t]
        if t == 2:
            edges[t] = _kernels.sample_pairs(P, scale, u)
        elif t == 3:
            edges[t] = _kernels.sample_triples(P, scale, u)
        else:
            if total > _COST_WARN_TUPLES:
                warnings.warn(f"sampling over {total} tuples of cardinality {t}", stacklevel=2)
            rows = np.array(list(combinations(range(n), t)), dtype=np.int64).reshape(-1, t)
            keep = u < expit(-scale * _row_incoherence(P, rows))
            edges[t] = rows[keep]
    return Hypergraph.from_arrays(n, edges, max_cardinality=model.max_cardinality, check_duplicates=False)


def expected_edge_count(model: ModelSpec, pos: Positions) -> float:
    P = pos.pair_incoherence()
    total = 0.0
    for t in range(2, model.max_cardinality + 1):
        total += float(np.sum(expit(-model.gamma * model.weights[t] * universe_incoherence(P, t))))
    return total


# -- model comparison -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ModelComparison:
    linear: LikelihoodReport
    periodic: LikelihoodReport
    linear_embedding: LinearEmbedding
    periodic_embedding: PeriodicEmbedding
    weights: CardinalityWeights

    @property
    def winner(self) -> str:
        if self.linear.log_likelihood > self.periodic.log_likelihood:
            return "linear"
        if self.periodic.log_likelihood > self.linear.log_likelihood:
            return "periodic"
        return "tie"

    def report(self, geometry: str) -> LikelihoodReport:
        return self.linear if geometry == "linear" else self.periodic

    def embedding(self, geometry: str):
        return self.linear_embedding if geometry == "linear" else self.periodic_embedding


def embed(h: Hypergraph, weights, geometry: Geometry, d: int = 1, eig_floor=DEFAULT_EIG_FLOOR):
    bundle = build_laplacian(h, weights)
    if geometry == "linear":
        return embed_linear(bundle, d, eig_floor)
    _check_geometry(geometry)
    return embed_periodic(bundle, eig_floor)


def compare_models(
    h: Hypergraph,
    weights,
    eig_floor: float = DEFAULT_EIG_FLOOR,
    gamma_range=DEFAULT_GAMMA_RANGE,
    d_linear: int = 1,
    max_cardinality: int = DEFAULT_MAX_CARDINALITY,
    rtol: float = 1e-6,
) -> ModelComparison:
    """Embed both ways, fit gamma for each geometry and report both maxima."""
    weights = as_weights(weights)
    bundle = build_laplacian(h, weights)
    lin = embed_linear(bundle, d_linear, eig_floor)
    per = embed_periodic(bundle, eig_floor)
    reports = {}
    for geom, emb in (("linear", lin), ("periodic", per)):
        reports[geom] = fit_gamma(
            geom, weights, Positions.from_embedding(emb), h, gamma_range, rtol, max_cardinality
        )
    return ModelComparison(reports["linear"], reports["periodic"], lin, per, weights)


@dataclass(frozen=True)
class WeightScanRow:
    c3: float
    report: LikelihoodReport | None
    skipped: str = ""


@dataclass(frozen=True, eq=False)
class WeightScan:
    """Grid search over the triadic weight with the dyadic weight fixed."""

    geometry: str
    c2: float
    rows: list[WeightScanRow]
    best_c3: float | None
    best: LikelihoodReport | None
    best_embedding: LinearEmbedding | PeriodicEmbedding | None = field(default=None)


def scan_c3(
    h: Hypergraph,
    geometry: Geometry,
    c3_grid: Sequence[float],
    c2: float = 1.0,
    d: int = 1,
    eig_floor: float = DEFAULT_EIG_FLOOR,
    gamma_range=DEFAULT_GAMMA_RANGE,
    max_cardinality: int = DEFAULT_MAX_CARDINALITY,
    scan_rtol: float = 1e-2,
    rtol: float = 1e-6,
) -> WeightScan:
    """Fit gamma for every ``c3`` in the grid and keep the likelihood maximiser.

    The grid is scanned at ``scan_rtol``; the winner is refit at ``rtol``
    starting from its coarse golden-section bracket.
    Grid points whose Laplacian violates connectivity or lacks enough
    eigenvalues above ``eig_floor`` are recorded as skipped.
    """
    rows, fitted = [], {}
    for c3 in c3_grid:
        w = CardinalityWeights({2: c2, 3: float(c3)})
        try:
            emb = embed(h, w, geometry, d, eig_floor)
        except (AssumptionViolation, InsufficientSpectrumError) as exc:
            rows.append(WeightScanRow(float(c3), None, skipped=str(exc)))
            continue
        pos = Positions.from_embedding(emb)
        surf = LikelihoodSurface(geometry, w, pos, h, max_cardinality)
        rep, bracket = _fit(surf, *map(float, gamma_range), scan_rtol)
        fitted[float(c3)] = (emb, surf, bracket)
        rows.append(WeightScanRow(float(c3), rep))
    scored = [r for r in rows if r.report is not None]
    if not scored:
        return WeightScan(geometry, c2, rows, None, None)
    top = max(scored, key=lambda r: r.report.log_likelihood)
    emb, surf, bracket = fitted[top.c3]
    best, _ = _fit(surf, *map(float, gamma_range), rtol, bracket)
    rows = [WeightScanRow(r.c3, best) if r is top else r for r in rows]
    return WeightScan(geometry, c2, rows, top.c3, best, emb)


# -- discrete-site oracle ---------------------------------------------------


def default_sites(n: int, geometry: Geometry) -> np.ndarray:
    if geometry == "linear":
        return np.arange(1, n + 1, dtype=np.float64)
    return 2.0 * np.pi * np.arange(n) / n


@dataclass(frozen=True, eq=False)
class AssignmentResult:
    optimal: np.ndarray  # (k, n): every permutation attaining the minimum
    incoherence: float
    permutations: np.ndarray
    incoherences: np.ndarray
    sites: np.ndarray


MAX_BRUTE_FORCE_NODES = 9


def brute_force_optimal_assignment(
    h: Hypergraph, weights, geometry: Geometry, sites=None, rel_tol: float = 1e-9
) -> AssignmentResult:
    """Minimise total incoherence over all placements ``x_i = sites[p_i]``.

    Exhaustive over ``n!`` permutations; refuses ``n > 9``.
    """
    _check_geometry(geometry)
    n = h.n
    if n > MAX_BRUTE_FORCE_NODES:
        raise ConfigError(f"brute force over {n}! permutations refused (limit n <= 9)")
    weights = as_weights(weights)
    sites = default_sites(n, geometry) if sites is None else np.asarray(sites, dtype=np.float64)
    if len(sites) != n:
        raise ConfigError(f"{len(sites)} sites for {n} nodes")
    perms = np.array(list(permutations(range(n))), dtype=np.int64).reshape(-1, n)
    X = sites[perms]
    eta = np.zeros(len(perms))
    for t, arr in h.edges.items():
        c = weights[t]
        for row in arr:
            for a, b in combinations(row.tolist(), 2):
                if geometry == "linear":
                    dist = (X[:, a] - X[:, b]) ** 2
                else:
                    dist = 2.0 - 2.0 * np.cos(X[:, a] - X[:, b])
                eta += c * 2.0 * dist
    best = eta.min()
    mask = eta <= best + rel_tol * max(1.0, abs(best))
    return AssignmentResult(perms[mask], float(best), perms, eta, sites)
