"""Combinatorial and normalized graph Laplacians and their eigenvalue spectra."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import SimilarityMatrix
from .errors import EigensolverFailure

COMBINATORIAL = "combinatorial"
NORMALIZED = "normalized"

DEG_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class Laplacian:
    kind: str
    values: np.ndarray
    degrees: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray  # non-decreasing
    kind: str

    @property
    def n(self) -> int:
        return len(self.eigenvalues)


def _as_array(S) -> np.ndarray:
    return S.values if isinstance(S, SimilarityMatrix) else np.asarray(S, dtype=float)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def combinatorial_laplacian(S: SimilarityMatrix) -> Laplacian:
    """L = T - S with T the diagonal matrix of weighted degrees."""
    s = _as_array(S)
    deg = s.sum(axis=1)
    L = np.diag(deg) - s
    L = (L + L.T) / 2
    return Laplacian(COMBINATORIAL, _frozen(L), _frozen(deg))


def normalized_laplacian(S: SimilarityMatrix) -> Laplacian:
    """I - T^(-1/2) S T^(-1/2); rows and columns of isolated nodes are zero."""
    s = _as_array(S)
    deg = s.sum(axis=1)
    live = deg > DEG_EPS
    inv_sqrt = np.zeros_like(deg)
    inv_sqrt[live] = 1.0 / np.sqrt(deg[live])
    L = np.diag(live.astype(float)) - inv_sqrt[:, None] * s * inv_sqrt[None, :]
    L = (L + L.T) / 2
    return Laplacian(NORMALIZED, _frozen(L), _frozen(deg))


def laplacian(S: SimilarityMatrix, kind: str) -> Laplacian:
    if kind == COMBINATORIAL:
        return combinatorial_laplacian(S)
    if kind == NORMALIZED:
        return normalized_laplacian(S)
    raise ValueError(f"unknown Laplacian kind {kind!r}")


def eig_tolerance(eigenvalues: np.ndarray) -> float:
    top = float(eigenvalues[-1]) if len(eigenvalues) else 0.0
    return 1e-8 * max(1.0, top)


def spectrum(lap: Laplacian) -> Spectrum:
    """All eigenvalues in non-decreasing order, tiny negatives clamped to 0."""
    try:
        ev = np.linalg.eigvalsh(lap.values)
    except np.linalg.LinAlgError as exc:
        raise EigensolverFailure(str(exc)) from exc
    ev = np.sort(ev)
    tol = eig_tolerance(ev)
    ev[(ev < 0) & (ev >= -tol)] = 0.0
    return Spectrum(_frozen(ev), lap.kind)


def count_components(S: SimilarityMatrix) -> int:
    """Connected components of the graph with edges where similarity > 0."""
    from scipy.sparse.csgraph import connected_components

    n, _ = connected_components(_as_array(S) > 0, directed=False)
    return int(n)
