"""Spectral embeddings and range-dependent random models for hypergraphs."""
from .hypercore import (
    CardinalityWeights,
    Hypergraph,
    LaplacianBundle,
    binarized_components,
    build_adjacency,
    build_laplacian,
    quadratic_form,
    restrict,
    trim_by_degree,
)
from .rangedep import ModelSpec, Positions, compare_models, fit_gamma, log_likelihood, sample
from .spectral import eig_smallest, embed_linear, embed_periodic

__version__ = "0.1.0"
