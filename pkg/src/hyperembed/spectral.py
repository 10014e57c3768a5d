"""Dense eigendecomposition of the hypergraph Laplacian and the linear and
periodic node embeddings built from it."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import AssumptionViolation, ConfigError, InsufficientSpectrumError, NumericalError
from .hypercore import LaplacianBundle, components_of_matrix

DEFAULT_EIG_FLOOR = 1e-9
DEGENERACY_GAP = 1e-9
ZERO_MODULUS = 1e-12


@dataclass(frozen=True, eq=False)
class EigenSystem:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # column k pairs with eigenvalues[k]


@dataclass(frozen=True, eq=False)
class LinearEmbedding:
    coords: np.ndarray  # (n, d)
    selected_eigenvalues: np.ndarray

    @property
    def dim(self) -> int:
        return self.coords.shape[1]


@dataclass(frozen=True, eq=False)
class PeriodicEmbedding:
    theta: np.ndarray
    selected_eigenvalues: np.ndarray
    zero_modulus_nodes: np.ndarray  # nodes whose angle was forced to 0


def _fix_signs(V: np.ndarray) -> np.ndarray:
    # largest-magnitude entry positive; near-ties resolved by the lowest index
    V = V.copy()
    mags = np.abs(V)
    for k in range(V.shape[1]):
        top = mags[:, k].max()
        if top == 0:
            continue
        i = np.flatnonzero(mags[:, k] >= top * (1 - 1e-9))[0]
        if V[i, k] < 0:
            V[:, k] = -V[:, k]
    return V


def _as_dense_symmetric(L) -> np.ndarray:
    A = L.toarray() if sp.issparse(L) else np.asarray(L, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ConfigError(f"expected a square matrix, got shape {A.shape}")
    scale = max(1.0, float(np.abs(A).max(initial=0.0)))
    if not np.allclose(A, A.T, rtol=0, atol=1e-12 * scale):
        raise ConfigError("matrix is not symmetric")
    return A


def eig_smallest(L, k: int | None = None) -> EigenSystem:
    """The ``k`` smallest eigenpairs of a symmetric matrix, ascending.

    Eigenvectors are orthonormal and sign-normalised so repeated calls on
    the same input give identical output.
    """
    A = _as_dense_symmetric(L)
    n = A.shape[0]
    k = n if k is None else int(k)
    if not 1 <= k <= n:
        raise ConfigError(f"requested {k} eigenpairs of a {n}x{n} matrix")
    try:
        vals, vecs = scipy.linalg.eigh(A, subset_by_index=[0, k - 1], driver="evr")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise NumericalError(f"symmetric eigensolver failed: {exc}") from exc
    return EigenSystem(eigenvalues=vals, eigenvectors=_fix_signs(vecs))


def _check_connected(bundle: LaplacianBundle) -> None:
    comps = components_of_matrix(bundle.L)
    if len(comps) > 1:
        sizes = [len(c) for c in comps]
        raise AssumptionViolation(
            f"binarized Laplacian graph has {len(comps)} components (sizes {sizes[:10]}"
            f"{'...' if len(sizes) > 10 else ''})",
            components=comps,
        )


def _select_above_floor(bundle: LaplacianBundle, count: int, eig_floor: float):
    _check_connected(bundle)
    es = eig_smallest(bundle.L)
    idx = np.flatnonzero(es.eigenvalues > eig_floor)
    if len(idx) < count:
        raise InsufficientSpectrumError(
            f"need {count} eigenvalues above {eig_floor}, found {len(idx)}"
        )
    sel = idx[:count]
    vals = es.eigenvalues
    if len(idx) > count and vals[idx[count]] - vals[sel[-1]] < DEGENERACY_GAP:
        warnings.warn(
            f"eigenvalue {vals[sel[-1]]:.3g} is degenerate with the next one; "
            "embedding depends on the solver's basis choice",
            stacklevel=3,
        )
    return vals[sel], es.eigenvectors[:, sel]


def embed_linear(
    bundle: LaplacianBundle, d: int = 1, eig_floor: float = DEFAULT_EIG_FLOOR
) -> LinearEmbedding:
    """Coordinates from the eigenvectors of the ``d`` smallest eigenvalues above ``eig_floor``."""
    if d < 1:
        raise ConfigError("embedding dimension must be at least 1")
    vals, vecs = _select_above_floor(bundle, d, eig_floor)
    return LinearEmbedding(coords=vecs, selected_eigenvalues=vals)


def phase_angles(u: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    z = u + 1j * v
    theta = np.angle(z)
    tiny = np.flatnonzero(np.abs(z) < ZERO_MODULUS)
    theta[tiny] = 0.0
    return theta, tiny


def embed_periodic(bundle: LaplacianBundle, eig_floor: float = DEFAULT_EIG_FLOOR) -> PeriodicEmbedding:
    """Angles of ``v2 + i v3`` for the two smallest eigenvalues above ``eig_floor``.

    A two-node hypergraph has a single non-trivial eigenvector; ``v3`` is
    then taken as zero, which places the nodes antipodally.
    """
    if bundle.n == 2:
        vals, vecs = _select_above_floor(bundle, 1, eig_floor)
        warnings.warn("two-node hypergraph: periodic embedding uses v2 only", stacklevel=2)
        vecs = np.column_stack([vecs[:, 0], np.zeros(2)])
    else:
        vals, vecs = _select_above_floor(bundle, 2, eig_floor)
    theta, tiny = phase_angles(vecs[:, 0], vecs[:, 1])
    if len(tiny):
        warnings.warn(
            f"{len(tiny)} nodes have near-zero modulus; their angle is set to 0", stacklevel=2
        )
    return PeriodicEmbedding(theta=theta, selected_eigenvalues=vals, zero_modulus_nodes=tiny)
