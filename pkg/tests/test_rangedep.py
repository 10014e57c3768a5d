import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_hypergraph
from hyperembed import (
    CardinalityWeights,
    Hypergraph,
    ModelSpec,
    Positions,
    compare_models,
    fit_gamma,
    log_likelihood,
    sample,
)
from hyperembed.errors import ConfigError
from hyperembed.rangedep import (
    LikelihoodSurface,
    brute_force_optimal_assignment,
    default_sites,
    edge_probability,
    expected_edge_count,
    incoherence,
    incoherence_linear,
    incoherence_periodic,
    log_edge_odds,
    scan_c3,
    tuple_probabilities,
)

W = CardinalityWeights({2: 1.0, 3: 1 / 3})


def brute_ll(model, pos, h):
    """Independent double loop over every tuple of the universe."""
    edges = h.edge_set()
    total = 0.0
    for t in range(2, model.max_cardinality + 1):
        for R in itertools.combinations(range(pos.n), t):
            z = model.gamma * model.weights[t] * incoherence(pos, R)
            log_f = -math.log1p(math.exp(z)) if z < 700 else -z
            log_1mf = -math.log1p(math.exp(-z))
            total += log_f if frozenset(R) in edges else log_1mf
    return total


def test_incoherence_examples():
    assert incoherence_linear(Positions.linear([0, 1, 2]), (0, 1, 2)) == 12.0
    assert incoherence_linear(Positions.linear([3.0, 3.0, 3.0]), (0, 1, 2)) == 0.0
    assert incoherence_linear(Positions.linear([0.0, 0.25]), (0, 1)) == pytest.approx(2 * 0.25**2)
    assert incoherence_periodic(Positions.periodic([0, np.pi]), (0, 1)) == pytest.approx(8.0)
    assert incoherence_periodic(Positions.periodic([1.0, 1.0]), (0, 1)) == 0.0
    assert incoherence_periodic(Positions.periodic([0, np.pi / 2, np.pi]), (0, 1, 2)) == pytest.approx(16.0)


def test_incoherence_multidimensional():
    pos = Positions.linear([[0.0, 0.0], [3.0, 4.0]])
    assert incoherence(pos, (0, 1)) == pytest.approx(50.0)


def test_incoherence_errors():
    with pytest.raises(ConfigError):
        incoherence_linear(Positions.linear([0, 1]), (0, 2))
    with pytest.raises(ConfigError):
        incoherence_linear(Positions.linear([0, 1]), (1, 1))
    with pytest.raises(ConfigError):
        incoherence_periodic(Positions.linear([0, 1]), (0, 1))


def test_edge_probability_values():
    m = ModelSpec("linear", {2: 1.0}, 1.0)
    assert edge_probability(m, Positions.linear([0.0, 0.0]), (0, 1)) == 0.5
    pos = Positions.linear([0.0, np.sqrt(0.5)])  # I = 1
    assert edge_probability(m, pos, (0, 1)) == pytest.approx(1 / (1 + math.e), rel=1e-14)
    far = Positions.linear([0.0, 20.0])  # gamma c I = 800
    p = edge_probability(m, far, (0, 1))
    assert p >= 0 and math.isfinite(p) and p < 1e-300
    assert math.isfinite(log_likelihood(m, far, Hypergraph.from_edges(2, [(0, 1)], max_cardinality=2)).log_likelihood)


def test_model_spec_validation():
    with pytest.raises(ConfigError):
        ModelSpec("linear", W, 0.0)
    with pytest.raises(ConfigError):
        ModelSpec("spiral", W, 1.0)


def test_ll_coincident_complete():
    h = Hypergraph.from_edges(3, [(0, 1), (0, 2), (1, 2), (0, 1, 2)])
    rep = log_likelihood(ModelSpec("linear", W, 2.0), Positions.linear(np.zeros(3)), h)
    assert rep.log_likelihood == pytest.approx(4 * math.log(0.5), rel=1e-14)
    assert rep.edge_term == 0.0


def test_ll_empty_small_gamma():
    h = Hypergraph.from_edges(5, [], max_cardinality=3)
    rep = log_likelihood(ModelSpec("linear", W, 1e-12), Positions.linear(np.arange(5.0)), h)
    assert rep.log_likelihood == pytest.approx(20 * math.log(0.5), rel=1e-9)


def test_ll_hand_oracle_n4():
    h = Hypergraph.from_edges(4, [(0, 1)], max_cardinality=3)
    model = ModelSpec("linear", W, 1.0)
    pos = Positions.linear([0.0, 1.0, 2.0, 3.0])
    rep = log_likelihood(model, pos, h)
    assert rep.log_likelihood == pytest.approx(brute_ll(model, pos, h), rel=1e-12)
    assert rep.edge_term + rep.null_term == pytest.approx(rep.log_likelihood, rel=1e-15)


def test_zero_weight_cardinality_contributes_half():
    h = Hypergraph.from_edges(4, [(0, 1), (1, 2, 3)], max_cardinality=3)
    model = ModelSpec("periodic", {2: 1.0, 3: 0.0}, 3.0)
    pos = Positions.periodic([0.0, 1.0, 2.0, 3.0])
    assert log_likelihood(model, pos, h).log_likelihood == pytest.approx(brute_ll(model, pos, h), rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    n=st.integers(3, 9),
    geometry=st.sampled_from(["linear", "periodic"]),
    gamma=st.floats(0.01, 50.0),
)
def test_ll_matches_brute_force(seed, n, geometry, gamma):
    rng = np.random.default_rng(seed)
    h = random_hypergraph(rng, n, p2=0.4, p3=0.2)
    weights = CardinalityWeights({2: rng.random(), 3: rng.random()})
    vals = rng.normal(size=n) if geometry == "linear" else rng.uniform(-np.pi, np.pi, n)
    pos = Positions(geometry, vals)
    model = ModelSpec(geometry, weights, gamma)
    rep = log_likelihood(model, pos, h)
    assert rep.log_likelihood == pytest.approx(brute_ll(model, pos, h), rel=1e-10)
    assert rep.log_likelihood <= 0


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), s=st.floats(0.1, 10.0), gamma=st.floats(0.01, 10.0))
def test_scale_gamma_reparametrization(seed, s, gamma):
    rng = np.random.default_rng(seed)
    n = 8
    h = random_hypergraph(rng, n, p2=0.4, p3=0.1)
    x = rng.normal(size=(n, 2))
    a = log_likelihood(ModelSpec("linear", W, gamma), Positions.linear(s * x), h).log_likelihood
    b = log_likelihood(ModelSpec("linear", W, gamma * s * s), Positions.linear(x), h).log_likelihood
    assert a == pytest.approx(b, rel=1e-10)


@settings(max_examples=50, deadline=None)
@given(
    x=st.lists(st.floats(-5, 5), min_size=3, max_size=3),
    gamma=st.floats(0.01, 20),
    c3=st.floats(0.01, 2),
)
def test_log_odds_linear_and_monotone(x, gamma, c3):
    pos = Positions.linear(x)
    m = ModelSpec("linear", {2: 1.0, 3: c3}, gamma)
    R = (0, 1, 2)
    assert log_edge_odds(m, pos, R) == pytest.approx(-gamma * c3 * incoherence(pos, R), rel=1e-15, abs=0)
    if incoherence(pos, R) > 0:
        bigger = ModelSpec("linear", {2: 1.0, 3: c3}, gamma * 1.5)
        assert edge_probability(bigger, pos, R) <= edge_probability(m, pos, R)
        spread = Positions.linear(np.asarray(x) * 1.5)
        assert edge_probability(m, spread, R) <= edge_probability(m, pos, R)


def test_tuple_probabilities_vectorised(rng):
    pos = Positions.periodic(rng.uniform(-np.pi, np.pi, 6))
    m = ModelSpec("periodic", W, 2.0)
    rows = np.array(list(itertools.combinations(range(6), 3)))
    got = tuple_probabilities(m, pos, rows)
    want = [edge_probability(m, pos, r) for r in rows]
    np.testing.assert_allclose(got, want, rtol=1e-13)


def test_fit_gamma_constant_surface_flags_boundary():
    h = Hypergraph.from_edges(3, [(0, 1), (0, 2), (1, 2), (0, 1, 2)])
    rep = fit_gamma("linear", W, Positions.linear(np.zeros(3)), h)
    assert rep.at_boundary
    assert rep.log_likelihood == pytest.approx(4 * math.log(0.5))


def test_fit_gamma_empty_hits_upper_bound():
    h = Hypergraph.from_edges(6, [], max_cardinality=3)
    rep = fit_gamma("periodic", W, Positions.periodic(np.linspace(0, 5, 6)), h, (1e-3, 1e4))
    assert rep.at_boundary and rep.gamma_star == 1e4


def test_fit_gamma_invalid_range(rng):
    h = random_hypergraph(rng, 5)
    with pytest.raises(ConfigError):
        fit_gamma("linear", W, Positions.linear(np.arange(5.0)), h, (1.0, 0.5))


def test_golden_section_agrees_with_dense_grid(rng):
    n = 40
    x = rng.normal(size=n)
    pos = Positions.linear(x)
    h = sample(ModelSpec("linear", W, 2.0), pos, seed=1)
    surf = LikelihoodSurface("linear", W, pos, h)
    rep = fit_gamma("linear", W, pos, h, surface=surf)
    grid = np.exp(np.linspace(np.log(rep.gamma_star / 3), np.log(rep.gamma_star * 3), 1000))
    vals = np.array([surf(g) for g in grid])
    g_grid = grid[np.argmax(vals)]
    assert not rep.at_boundary
    assert rep.gamma_star == pytest.approx(g_grid, rel=1e-4 + np.log(9) / 999)
    assert rep.log_likelihood >= vals.max() - 1e-9 * abs(vals.max())


def test_gamma_recovery_at_true_positions():
    ratios = []
    for seed in range(20):
        rng = np.random.default_rng(seed)
        gamma0 = 2.0
        pos = Positions.linear(rng.uniform(0, 2, 100))
        h = sample(ModelSpec("linear", W, gamma0), pos, seed=seed + 100)
        ratios.append(fit_gamma("linear", W, pos, h).gamma_star / gamma0)
    assert 0.5 <= np.mean(ratios) <= 2.0


def test_sample_deterministic(rng):
    pos = Positions.periodic(rng.uniform(-np.pi, np.pi, 15))
    m = ModelSpec("periodic", W, 1.0)
    assert sample(m, pos, seed=7).edge_set() == sample(m, pos, seed=7).edge_set()
    assert sample(m, pos, seed=7).edge_set() != sample(m, pos, seed=8).edge_set()


def test_sample_vanishes_for_large_gamma():
    pos = Positions.linear(np.arange(10.0))
    m = ModelSpec("linear", W, 1e4)
    assert expected_edge_count(m, pos) < 1e-100
    assert sum(sample(m, pos, seed=s).num_edges for s in range(100)) == 0


def test_sample_count_matches_expectation(rng):
    pos = Positions.linear(rng.uniform(0, 2, 12))
    m = ModelSpec("linear", W, 1.5)
    P = pos.pair_incoherence()
    probs = []
    for t in (2, 3):
        for R in itertools.combinations(range(12), t):
            probs.append(edge_probability(m, pos, R))
    probs = np.array(probs)
    mean = probs.sum()
    assert expected_edge_count(m, pos) == pytest.approx(mean, rel=1e-12)
    counts = np.array([sample(m, pos, seed=s).num_edges for s in range(200)])
    se = math.sqrt((probs * (1 - probs)).sum() / 200)
    assert abs(counts.mean() - mean) <= 3 * se
    assert P.shape == (12, 12)


def test_variance_at_zero_incoherence():
    pos = Positions.linear(np.zeros(2))
    m = ModelSpec("linear", {2: 1.0}, 3.0, max_cardinality=2)
    draws = np.array([sample(m, pos, seed=s).num_edges for s in range(4000)])
    assert draws.var() == pytest.approx(0.25, abs=0.02)


@pytest.mark.filterwarnings("ignore:two-node")
def test_compare_models_two_nodes():
    h = Hypergraph.from_edges(2, [(0, 1)], max_cardinality=3)
    cmp = compare_models(h, W)
    assert cmp.winner in ("linear", "periodic", "tie")
    assert math.isfinite(cmp.linear.log_likelihood) and math.isfinite(cmp.periodic.log_likelihood)
    gaps = abs(np.diff(cmp.periodic_embedding.theta)[0])
    assert gaps == pytest.approx(np.pi)


def test_compare_models_three_nodes():
    h = Hypergraph.from_edges(3, [(0, 1), (1, 2)], max_cardinality=3)
    cmp = compare_models(h, W)
    assert cmp.winner in ("linear", "periodic", "tie")
    assert math.isfinite(cmp.linear.log_likelihood) and math.isfinite(cmp.periodic.log_likelihood)


def test_scan_c3_skips_disconnected():
    # with c3 = 0 the triangle {2,3,4} falls out of the Laplacian
    h = Hypergraph.from_edges(5, [(0, 1), (1, 2), (2, 3, 4)])
    scan = scan_c3(h, "linear", [0.0, 0.5])
    assert scan.rows[0].report is None and "components" in scan.rows[0].skipped
    assert scan.best_c3 == 0.5


# -- discrete-site oracle ---------------------------------------------------


def likelihood_argmax(h, weights, geometry, gamma):
    n = h.n
    sites = default_sites(n, geometry)
    model = ModelSpec(geometry, weights, gamma)
    perms = list(itertools.permutations(range(n)))
    lls = np.array([log_likelihood(model, Positions(geometry, sites[list(p)]), h).log_likelihood for p in perms])
    best = lls.max()
    return {p for p, v in zip(perms, lls) if v >= best - 1e-9 * abs(best)}


def optimal_set(res):
    return {tuple(p) for p in res.optimal.tolist()}


@pytest.mark.parametrize("geometry", ["linear", "periodic"])
@pytest.mark.parametrize("gamma", [0.5, 1.0, 2.0])
def test_incoherence_likelihood_optima_agree_n5(geometry, gamma):
    rng = np.random.default_rng(5)
    pos = Positions.linear(np.repeat([0.0, 1.0], [3, 2]) + rng.uniform(-0.05, 0.05, 5))
    h = sample(ModelSpec("linear", W, 2.0), pos, seed=3)
    res = brute_force_optimal_assignment(h, W, geometry)
    assert optimal_set(res) == likelihood_argmax(h, W, geometry, gamma)


def test_brute_force_empty_and_symmetric():
    empty = Hypergraph.from_edges(4, [], max_cardinality=3)
    assert len(brute_force_optimal_assignment(empty, W, "linear").optimal) == 24
    h = Hypergraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    opt = optimal_set(brute_force_optimal_assignment(h, W, "periodic"))
    swap = (1, 0, 3, 2)  # automorphism of the 4-cycle
    for p in opt:
        assert tuple(p[swap[i]] for i in range(4)) in opt


def test_brute_force_refuses_large():
    h = Hypergraph.from_edges(10, [(0, 1)], max_cardinality=3)
    with pytest.raises(ConfigError):
        brute_force_optimal_assignment(h, W, "linear")
