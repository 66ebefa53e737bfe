"""Batch-wise clustering merged through spectrum matching.

The corpus is split into random batches, each batch is clustered on its own,
and every cluster of a later batch is attached to the first-batch cluster whose
spectral function it is closest to.
"""

from __future__ import annotations

import itertools
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .clustering import members, parallel_map, spectral_cluster
from .corpus import Document, SimilarityMatrix, TermVector, build_term_vectors, similarity_of
from .errors import DegenerateCluster, SpecMergeError, TooFewDocuments
from .spectra import MatchMethod, SpectralFunction, spectral_distance, spectral_function_of

logger = logging.getLogger(__name__)

MAX_EXHAUSTIVE_K = 8


@dataclass(frozen=True, eq=False)
class ClusterModel:
    method: MatchMethod
    references: tuple[SpectralFunction, ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.references:
            raise SpecMergeError("a cluster model needs at least one reference")
        method = MatchMethod.parse(self.method)
        object.__setattr__(self, "method", method)
        if any(F.method is not method for F in self.references):
            raise SpecMergeError("all references must be built with the model's method")
        names = tuple(self.names) or tuple(str(i) for i in range(len(self.references)))
        if len(names) != len(self.references):
            raise SpecMergeError("one name per reference required")
        object.__setattr__(self, "names", names)

    @property
    def k(self) -> int:
        return len(self.references)

    def to_json(self) -> str:
        obj = {
            "method": self.method.value,
            "k": self.k,
            "references": [
                {
                    "id": i,
                    "name": name,
                    "source_n": F.source_n,
                    "knots": [float(x) for x in F.knots],
                    "values": [float(v) for v in F.values],
                }
                for i, (name, F) in enumerate(zip(self.names, self.references))
            ],
        }
        return json.dumps(obj, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ClusterModel":
        obj = json.loads(text)
        method = MatchMethod.parse(obj["method"])
        refs = sorted(obj["references"], key=lambda r: r["id"])
        if len(refs) != obj["k"]:
            raise SpecMergeError(f"model declares k={obj['k']} but stores {len(refs)} references")
        return cls(
            method,
            tuple(SpectralFunction(r["knots"], r["values"], method, r["source_n"]) for r in refs),
            tuple(r["name"] for r in refs),
        )


@dataclass(frozen=True, eq=False)
class MergedClustering:
    assignment: dict[str, int]
    provenance: dict[str, tuple[int, int]]
    k: int
    model: ClusterModel | None = None
    doc_order: tuple[str, ...] = field(default=())

    def labels(self, ids: Sequence[str]) -> np.ndarray:
        return np.array([self.assignment[i] for i in ids])

    def to_csv(self) -> str:
        lines = ["doc_id,global_cluster,batch,local_cluster"]
        for d in self.doc_order or sorted(self.assignment):
            b, loc = self.provenance[d]
            lines.append(f"{d},{self.assignment[d]},{b},{loc}")
        return "\n".join(lines) + "\n"


def build_model(
    similarities: Sequence[SimilarityMatrix],
    method: MatchMethod | str,
    names: Sequence[str] = (),
) -> ClusterModel:
    method = MatchMethod.parse(method)
    return ClusterModel(method, tuple(spectral_function_of(S, method) for S in similarities), tuple(names))


def split_batches(docs: Sequence[Document], m_plus_1: int, seed: int = 0, k: int = 1) -> list[list[Document]]:
    """Uniform random partition into ``m_plus_1`` parts whose sizes differ by at most one."""
    if m_plus_1 < 1:
        raise ValueError("need at least one batch")
    if len(docs) < m_plus_1 * k:
        raise TooFewDocuments(f"{len(docs)} documents cannot fill {m_plus_1} batches of {k} clusters")
    perm = np.random.default_rng(seed).permutation(len(docs))
    return [[docs[i] for i in part] for part in np.array_split(perm, m_plus_1)]


def distances_to_model(S_new: SimilarityMatrix, model: ClusterModel) -> np.ndarray:
    F = spectral_function_of(S_new, model.method)
    return np.array([spectral_distance(F, ref, model.method) for ref in model.references])


def assign_cluster(S_new: SimilarityMatrix, model: ClusterModel) -> int:
    """Index of the reference nearest to the spectrum of ``S_new``.

    A strict ``<`` scan, so ties resolve to the lowest cluster id.
    """
    d = distances_to_model(S_new, model)
    return int(np.argmin(d))


def _bijective(dist: np.ndarray) -> np.ndarray:
    """Minimum-total-distance injective map from rows (local) to columns (global)."""
    r, k = dist.shape
    if r == 0:
        return np.zeros(0, dtype=int)
    if k <= MAX_EXHAUSTIVE_K:
        perms = np.array(list(itertools.permutations(range(k), r)), dtype=int)
        totals = dist[np.arange(r)[None, :], perms].sum(axis=1)
        return perms[int(np.argmin(totals))]
    rows, cols = linear_sum_assignment(dist)
    out = np.empty(r, dtype=int)
    out[rows] = cols
    return out


def _unit_centroid(vectors: Sequence[TermVector]) -> dict[str, float]:
    acc: dict[str, float] = {}
    for v in vectors:
        if v.norm == 0:
            continue
        for t, w in v.entries.items():
            acc[t] = acc.get(t, 0.0) + w / v.norm
    return acc


def _cosine(a: Mapping[str, float], b: Mapping[str, float]) -> float:
    na = math.sqrt(sum(w * w for w in a.values()))
    nb = math.sqrt(sum(w * w for w in b.values()))
    if na == 0 or nb == 0:
        return 0.0
    small, big = (a, b) if len(a) <= len(b) else (b, a)
    return sum(w * big.get(t, 0.0) for t, w in small.items()) / (na * nb)


MatchFn = Callable[[int, Sequence[Document], np.ndarray], Sequence[int]]


def merge_batches(
    batches: Sequence[Sequence[Document]],
    local_assignments: Sequence[np.ndarray],
    k: int,
    match: MatchFn,
) -> MergedClustering:
    """Bookkeeping of the merge step.

    Batch 0's local ids become the global ids. For every later batch,
    ``match(i, batch, local_assignment)`` returns the global id of each of its
    k local clusters.
    """
    assignment: dict[str, int] = {}
    provenance: dict[str, tuple[int, int]] = {}
    for i, (batch, local) in enumerate(zip(batches, local_assignments)):
        local = np.asarray(local)
        mapping = np.arange(k) if i == 0 else np.asarray(match(i, batch, local))
        for doc, loc in zip(batch, local):
            if doc.id in assignment:
                raise SpecMergeError(f"document {doc.id!r} appears in more than one batch")
            assignment[doc.id] = int(mapping[loc])
            provenance[doc.id] = (i, int(loc))
    return MergedClustering(assignment, provenance, k)


def incremental_cluster(
    docs: Sequence[Document],
    k: int,
    m_plus_1: int,
    method: MatchMethod | str = MatchMethod.CLSSAL,
    seed: int = 0,
    *,
    bijective: bool = False,
    weighting: str = "tf",
    threads: int = 1,
) -> MergedClustering:
    method = MatchMethod.parse(method)
    order = tuple(d.id for d in docs)
    if m_plus_1 == 1:
        batches = [list(docs)]
    else:
        batches = split_batches(docs, m_plus_1, seed, k)

    def cluster_batch(batch):
        S = similarity_of(batch, weighting)
        return S, spectral_cluster(S, k, seed).assignment

    results = parallel_map(cluster_batch, batches, threads)
    sims = [r[0] for r in results]
    locals_ = [r[1] for r in results]

    ref_members = members(locals_[0], k)
    small = [c for c, m in enumerate(ref_members) if len(m) < 2]
    if small:
        if m_plus_1 == 1:
            merged = merge_batches(batches, locals_, k, match=None)
            return MergedClustering(merged.assignment, merged.provenance, k, None, order)
        raise DegenerateCluster(f"reference cluster(s) {small} of batch 0 have fewer than 2 members")
    model = build_model([sims[0].submatrix(m) for m in ref_members], method)

    ref_vectors = build_term_vectors(batches[0], weighting) if m_plus_1 > 1 else None

    def match(i: int, batch: Sequence[Document], local: np.ndarray) -> list[int]:
        groups = members(local, k)
        ok = [c for c in range(k) if len(groups[c]) >= 2]
        dist = np.array([distances_to_model(sims[i].submatrix(groups[c]), model) for c in ok]).reshape(len(ok), k)
        out = [-1] * k
        if bijective:
            for c, g in zip(ok, _bijective(dist)):
                out[c] = int(g)
        else:
            for c, row in zip(ok, dist):
                out[c] = int(np.argmin(row))
        for c in range(k):
            if out[c] >= 0 or len(groups[c]) == 0:
                continue
            logger.warning("batch %d cluster %d has %d member(s); matched by centroid cosine", i, c, len(groups[c]))
            batch_vecs = build_term_vectors(batch, weighting)
            mine = _unit_centroid([batch_vecs[j] for j in groups[c]])
            scores = [_cosine(mine, _unit_centroid([ref_vectors[j] for j in m])) for m in ref_members]
            out[c] = int(np.argmax(scores))
        return out

    merged = merge_batches(batches, locals_, k, match)
    return MergedClustering(merged.assignment, merged.provenance, k, model, order)
