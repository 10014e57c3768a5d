"""Planted-cluster hypergraphs drawn from the range-dependent model."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, GenerationError
from .hypercore import CardinalityWeights, Hypergraph, as_weights, binarized_components
from .rangedep import DEFAULT_MAX_CARDINALITY, ModelSpec, Positions, _check_geometry, sample

DEFAULT_MAX_ATTEMPTS = 100


@dataclass(frozen=True)
class ClusterPlan:
    """``K`` clusters of ``m`` nodes each, centred at evenly spaced sites.

    Linear centres are ``2(l-1)/K``; periodic centres are ``2 pi (l-1)/K``.
    Each node gets independent ``unif(-a, a)`` noise around its centre.
    """

    K: int
    m: int
    a: float
    geometry: str
    gamma0: float
    weights: CardinalityWeights = field(default_factory=CardinalityWeights.dyadic_triadic)
    seed: int = 0
    max_cardinality: int = DEFAULT_MAX_CARDINALITY

    def __post_init__(self):
        _check_geometry(self.geometry)
        object.__setattr__(self, "weights", as_weights(self.weights))
        if self.K < 1 or self.m < 1:
            raise ConfigError("K and m must be at least 1")
        if self.a < 0 or self.gamma0 < 0:
            raise ConfigError("noise width and gamma0 must be non-negative")

    @property
    def n(self) -> int:
        return self.K * self.m


@dataclass(frozen=True, eq=False)
class SyntheticHypergraph:
    hypergraph: Hypergraph
    positions: Positions
    labels: np.ndarray
    attempts: int


def _seeds(plan: ClusterPlan):
    # child 0 plants positions, child k (k >= 1) drives sampling attempt k
    return np.random.SeedSequence(plan.seed)


def plant_positions(plan: ClusterPlan) -> tuple[Positions, np.ndarray]:
    rng = np.random.default_rng(_seeds(plan).spawn(1)[0])
    labels = np.repeat(np.arange(plan.K), plan.m)
    span = 2.0 if plan.geometry == "linear" else 2.0 * np.pi
    centres = span * labels / plan.K
    noise = rng.uniform(-plan.a, plan.a, size=plan.n) if plan.a > 0 else np.zeros(plan.n)
    return Positions(plan.geometry, centres + noise), labels


def _model(plan: ClusterPlan) -> ModelSpec:
    # gamma0 = 0 is a legitimate generator (every tuple at probability 1/2)
    gamma = plan.gamma0 if plan.gamma0 > 0 else np.finfo(float).tiny
    return ModelSpec(plan.geometry, plan.weights, gamma, plan.max_cardinality)


def generate(plan: ClusterPlan, attempt: int = 1) -> SyntheticHypergraph:
    """One draw (no connectivity filter)."""
    pos, labels = plant_positions(plan)
    ss = _seeds(plan).spawn(attempt + 1)[attempt]
    h = sample(_model(plan), pos, np.random.default_rng(ss))
    return SyntheticHypergraph(h, pos, labels, attempt)


def generate_until_connected(plan: ClusterPlan, max_attempts: int = DEFAULT_MAX_ATTEMPTS) -> SyntheticHypergraph:
    """Resample hyperedges until the binarized Laplacian graph is connected."""
    if max_attempts < 1:
        raise ConfigError("max_attempts must be at least 1")
    pos, labels = plant_positions(plan)
    model = _model(plan)
    children = _seeds(plan).spawn(max_attempts + 1)
    sizes: list[int] = []
    for attempt in range(1, max_attempts + 1):
        h = sample(model, pos, np.random.default_rng(children[attempt]))
        comps = binarized_components(h, plan.weights)
        if len(comps) == 1:
            return SyntheticHypergraph(h, pos, labels, attempt)
        sizes = [len(c) for c in comps]
    raise GenerationError(
        f"no connected hypergraph in {max_attempts} attempts; last component sizes {sizes[:10]}",
    )
