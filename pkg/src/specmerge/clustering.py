"""Per-batch baseline: normalized spectral clustering with unit-length rows.

The embedding uses the eigenvectors of the k+1 smallest normalized-Laplacian
eigenvalues (one dimension more than the cluster count, constant-ish first
vector kept), rows scaled to unit length, then k-means.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

from .corpus import SimilarityMatrix
from .errors import EigensolverFailure, TooFewDocuments
from .laplacian import normalized_laplacian

T = TypeVar("T")
R = TypeVar("R")

N_RESTARTS = 10
MAX_ITER = 100
REL_TOL = 1e-6


def parallel_map(fn: Callable[[T], R], items: Iterable[T], threads: int = 1) -> list[R]:
    """Ordered map; the result never depends on ``threads``."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True, eq=False)
class SpectralEmbedding:
    rows: np.ndarray
    k: int
    eigenvalues: np.ndarray


@dataclass(frozen=True, eq=False)
class Clustering:
    assignment: np.ndarray
    k: int
    inertia: float
    centroids: np.ndarray | None = None


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs


def spectral_embed(S: SimilarityMatrix, k: int) -> SpectralEmbedding:
    n = S.n
    if k < 2:
        raise ValueError("k must be at least 2")
    if n < k + 1:
        raise TooFewDocuments(f"{n} documents cannot be embedded in {k + 1} dimensions")
    lap = normalized_laplacian(S)
    try:
        w, v = np.linalg.eigh(lap.values)
    except np.linalg.LinAlgError as exc:
        raise EigensolverFailure(str(exc)) from exc
    order = np.argsort(w, kind="stable")[: k + 1]
    vecs = _fix_signs(v[:, order])
    norms = np.linalg.norm(vecs, axis=1)
    rows = np.zeros_like(vecs)
    nz = norms > 0
    rows[nz] = vecs[nz] / norms[nz, None]
    return SpectralEmbedding(rows, k, w[order])


def _sq_dists(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    d = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    return d


def _kmeanspp(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(points)
    chosen = [int(rng.integers(n))]
    closest = ((points - points[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=closest / total))
        else:
            # all remaining points coincide with a chosen centre
            free = np.setdiff1d(np.arange(n), chosen)
            nxt = int(rng.choice(free))
        chosen.append(nxt)
        closest = np.minimum(closest, ((points - points[nxt]) ** 2).sum(axis=1))
    return points[chosen].copy()


def _repair_empty(points, labels, centroids, d2):
    """Reseed each empty cluster at the point farthest from its centroid."""
    k = len(centroids)
    counts = np.bincount(labels, minlength=k)
    if counts.min() > 0:
        return labels, centroids, False
    own = d2[np.arange(len(points)), labels].copy()
    for c in np.flatnonzero(counts == 0):
        # never strip the last member of another cluster
        movable = counts[labels] > 1
        cand = np.where(movable, own, -1.0)
        far = int(np.argmax(cand))
        counts[labels[far]] -= 1
        labels[far] = c
        counts[c] = 1
        centroids[c] = points[far]
        own[far] = -1.0
    return labels, centroids, True


def _lloyd(points: np.ndarray, k: int, rng: np.random.Generator, max_iter: int, tol: float) -> Clustering:
    centroids = _kmeanspp(points, k, rng)
    d2 = _sq_dists(points, centroids)
    labels = np.argmin(d2, axis=1)
    labels, centroids, _ = _repair_empty(points, labels, centroids, d2)
    inertia = float(d2[np.arange(len(points)), labels].sum())
    for _ in range(max_iter):
        for c in range(k):
            centroids[c] = points[labels == c].mean(axis=0)
        d2 = _sq_dists(points, centroids)
        new = np.argmin(d2, axis=1)
        new, centroids, repaired = _repair_empty(points, new, centroids, d2)
        if repaired:
            d2 = _sq_dists(points, centroids)
        new_inertia = float(d2[np.arange(len(points)), new].sum())
        if not repaired:
            assert new_inertia <= inertia * (1 + 1e-12) + 1e-12, "k-means inertia increased"
        changed = not np.array_equal(new, labels)
        labels = new
        prev, inertia = inertia, new_inertia
        if not changed or (prev - inertia) <= tol * prev:
            break
    return Clustering(labels, k, inertia, centroids)


def _canonical(labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Relabel clusters in order of first appearance."""
    _, first = np.unique(labels, return_index=True)
    order = labels[np.sort(first)]
    remap = np.empty(labels.max() + 1, dtype=int)
    remap[order] = np.arange(len(order))
    return remap[labels], order


def kmeans(
    points: np.ndarray,
    k: int,
    seed: int = 0,
    n_restarts: int = N_RESTARTS,
    max_iter: int = MAX_ITER,
    tol: float = REL_TOL,
    threads: int = 1,
) -> Clustering:
    """Lloyd's algorithm from k-means++ seeds; best of ``n_restarts`` by inertia."""
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    if len(points) < k:
        raise TooFewDocuments(f"{len(points)} points cannot form {k} clusters")

    def run(r: int) -> Clustering:
        return _lloyd(points, k, np.random.default_rng([seed, r]), max_iter, tol)

    runs = parallel_map(run, range(n_restarts), threads)
    # min() keeps the first of equal-inertia runs, i.e. the lowest restart index
    best = min(runs, key=lambda c: c.inertia)
    labels, order = _canonical(best.assignment)
    return Clustering(labels, k, best.inertia, best.centroids[order])


def spectral_cluster(S: SimilarityMatrix, k: int, seed: int = 0, threads: int = 1) -> Clustering:
    if S.n == k:
        return Clustering(np.arange(k), k, 0.0)
    emb = spectral_embed(S, k)
    return kmeans(emb.rows, k, seed, threads=threads)


def members(assignment: Sequence[int], k: int) -> list[np.ndarray]:
    a = np.asarray(assignment)
    return [np.flatnonzero(a == c) for c in range(k)]
