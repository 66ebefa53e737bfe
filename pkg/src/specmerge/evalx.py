"""Evaluation harness: stability experiments, confusion metrics, synthetic corpora."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from sklearn.metrics import adjusted_rand_score

from .clustering import parallel_map
from .corpus import Document, SimilarityMatrix, similarity_of
from .errors import EmptyClass
from .incremental import ClusterModel, assign_cluster, build_model, split_batches
from .spectra import MatchMethod


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """Rows are true classes, columns predicted classes."""

    counts: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        c = np.array(self.counts, dtype=np.int64)
        if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] != len(self.labels):
            raise ValueError("confusion counts must be k x k with k labels")
        if np.any(c < 0):
            raise ValueError("negative confusion count")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)
        object.__setattr__(self, "labels", tuple(self.labels))

    @classmethod
    def from_rows(cls, rows, labels: Sequence[str] | None = None) -> "ConfusionMatrix":
        rows = np.asarray(rows)
        if labels is None:
            labels = [f"c{i + 1}" for i in range(len(rows))]
        return cls(rows, tuple(labels))

    def to_csv(self) -> str:
        out = ["true/pred," + ",".join(self.labels)]
        for lab, row in zip(self.labels, self.counts):
            out.append(lab + "," + ",".join(str(int(v)) for v in row))
        out.append(f"error_pct={error_rate(self):.2f},macro_f1={macro_f1(self):.2f}")
        return "\n".join(out) + "\n"


def error_rate(cm: ConfusionMatrix) -> float:
    total = cm.counts.sum()
    if total == 0:
        raise ValueError("empty confusion matrix")
    return 100.0 * (1.0 - np.trace(cm.counts) / total)


def macro_f1(cm: ConfusionMatrix) -> float:
    c = cm.counts.astype(float)
    if c.sum() == 0:
        raise ValueError("empty confusion matrix")
    tp = np.diag(c)
    # F1 = 2tp / (predicted + actual); a class never predicted nor present scores 0
    denom = c.sum(axis=0) + c.sum(axis=1)
    f1 = np.divide(2 * tp, denom, out=np.zeros_like(tp), where=denom > 0)
    return 100.0 * float(f1.mean())


def adjusted_rand_index(a: Sequence[int], b: Sequence[int]) -> float:
    return float(adjusted_rand_score(a, b))


# -- synthetic corpus ---------------------------------------------------------


@dataclass(frozen=True)
class GroupSpec:
    name: str
    vocab_size: int
    docs: int
    min_tokens: int = 10
    max_tokens: int = 20
    zipf: float = 1.0


@dataclass(frozen=True)
class SyntheticSpec:
    """Labelled corpus of homogeneous topical groups.

    Every group owns a private vocabulary of ``vocab_size`` words. A fraction
    ``overlap`` of each group's token mass is instead drawn from one shared
    vocabulary whose word distribution is the same for all groups, so at
    ``overlap=0`` the groups have disjoint supports and at ``overlap=1`` they
    are indistinguishable.
    """

    groups: tuple[GroupSpec, ...] = (
        GroupSpec("gr1", vocab_size=60, docs=500, min_tokens=10, max_tokens=18, zipf=1.1),
        GroupSpec("gr2", vocab_size=250, docs=500, min_tokens=12, max_tokens=24, zipf=1.0),
        GroupSpec("gr3", vocab_size=800, docs=500, min_tokens=10, max_tokens=16, zipf=0.8),
    )
    overlap: float = 0.0
    shared_vocab_size: int = 300
    shared_zipf: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.overlap <= 1.0:
            raise ValueError("overlap must lie in [0, 1]")
        names = [g.name for g in self.groups]
        if len(set(names)) != len(names):
            raise ValueError("group names must be unique")
        for g in self.groups:
            if g.min_tokens < 1 or g.max_tokens < g.min_tokens or g.vocab_size < 1 or g.docs < 0:
                raise ValueError(f"bad group spec {g}")

    def vocabulary(self, group: int) -> list[str]:
        return [f"g{group}w{j:05d}" for j in range(self.groups[group].vocab_size)]

    def shared_vocabulary(self) -> list[str]:
        return [f"shw{j:05d}" for j in range(self.shared_vocab_size)]


def _zipf_weights(n: int, s: float, rng: np.random.Generator) -> np.ndarray:
    w = 1.0 / np.arange(1, n + 1) ** s
    return rng.permutation(w / w.sum())


def generate_synthetic_corpus(spec: SyntheticSpec = SyntheticSpec()) -> list[Document]:
    rng = np.random.default_rng(spec.seed)
    shared = np.array(spec.shared_vocabulary())
    shared_p = _zipf_weights(len(shared), spec.shared_zipf, rng)
    docs = []
    for gi, g in enumerate(spec.groups):
        vocab = np.array(spec.vocabulary(gi))
        p = _zipf_weights(len(vocab), g.zipf, rng)
        for j in range(g.docs):
            n_tok = int(rng.integers(g.min_tokens, g.max_tokens + 1))
            from_shared = rng.random(n_tok) < spec.overlap
            n_sh = int(from_shared.sum())
            toks = np.empty(n_tok, dtype=object)
            toks[from_shared] = rng.choice(shared, size=n_sh, p=shared_p)
            toks[~from_shared] = rng.choice(vocab, size=n_tok - n_sh, p=p)
            text = " ".join(toks)
            docs.append(Document(f"{g.name}-{j:05d}", text, g.name, tuple(toks)))
    order = rng.permutation(len(docs))
    return [docs[i] for i in order]


# -- stability experiment -----------------------------------------------------


def _by_label(docs: Sequence[Document]) -> dict[str, list[int]]:
    out: dict[str, list[int]] = {}
    for i, d in enumerate(docs):
        if d.label is None:
            raise EmptyClass(f"document {d.id!r} has no label")
        out.setdefault(d.label, []).append(i)
    return out


def train_model(
    train: Sequence[Document],
    method: MatchMethod | str,
    weighting: str = "tf",
    labels: Sequence[str] | None = None,
) -> ClusterModel:
    """Reference spectra, one per label of ``train``."""
    groups = _by_label(train)
    labels = sorted(groups) if labels is None else list(labels)
    sims = []
    for lab in labels:
        if len(groups.get(lab, ())) < 2:
            raise EmptyClass(f"class {lab!r} needs at least 2 training documents")
        sims.append(similarity_of([train[i] for i in groups[lab]], weighting))
    return build_model(sims, method, labels)


Assigner = Callable[[SimilarityMatrix, ClusterModel], int]


@dataclass
class StabilityResult:
    confusion: ConfusionMatrix
    method: MatchMethod
    fraction: float
    trials: int
    seed: int
    weighting: str = "tf"
    extra: dict = field(default_factory=dict)

    @property
    def error(self) -> float:
        return error_rate(self.confusion)

    @property
    def f1(self) -> float:
        return macro_f1(self.confusion)

    def diagonal_mass(self) -> np.ndarray:
        c = self.confusion.counts
        return np.diag(c) / c.sum(axis=1)

    def to_json(self) -> str:
        obj = {
            "config": {
                "method": self.method.value,
                "fraction": self.fraction,
                "trials": self.trials,
                "seed": self.seed,
                "weighting": self.weighting,
                **self.extra,
            },
            "labels": list(self.confusion.labels),
            "confusion": self.confusion.counts.tolist(),
            "error_pct": round(self.error, 6),
            "macro_f1": round(self.f1, 6),
        }
        return json.dumps(obj, indent=1) + "\n"


def run_stability_experiment(
    train: Sequence[Document],
    test_pool: Sequence[Document],
    method: MatchMethod | str = MatchMethod.CLSSAL,
    trials: int = 100,
    fraction: float = 0.5,
    seed: int = 0,
    *,
    weighting: str = "tf",
    assigner: Assigner | None = None,
    threads: int = 1,
) -> StabilityResult:
    """Match per-class random subsamples of ``test_pool`` against spectra of ``train``.

    Each trial draws, for every class separately, ceil(fraction * class size)
    documents of that class from the pool and records which reference the
    subsample's spectrum is nearest to. Trial t uses the generator seeded with
    ``seed + t``.
    """
    method = MatchMethod.parse(method)
    if not 0 < fraction <= 1:
        raise ValueError("fraction must lie in (0, 1]")
    train_groups = _by_label(train)
    pool_groups = _by_label(test_pool)
    labels = sorted(train_groups)
    missing = [lab for lab in labels if lab not in pool_groups] + [
        lab for lab in pool_groups if lab not in train_groups
    ]
    if missing:
        raise EmptyClass(f"class(es) {sorted(set(missing))} missing from one portion")
    model = train_model(train, method, weighting, labels)
    assigner = assigner or assign_cluster

    pool_sim = similarity_of(test_pool, weighting) if weighting == "tf" else None

    def subsample_sim(idx: np.ndarray) -> SimilarityMatrix:
        if pool_sim is not None:
            # cosine of raw term counts does not depend on the rest of the pool
            return pool_sim.submatrix(idx)
        return similarity_of([test_pool[i] for i in idx], weighting)

    def trial(t: int) -> list[int]:
        rng = np.random.default_rng(seed + t)
        preds = []
        for lab in labels:
            pool = np.asarray(pool_groups[lab])
            m = max(2, math.ceil(fraction * len(pool)))
            if m > len(pool):
                raise EmptyClass(f"class {lab!r} has only {len(pool)} test document(s)")
            idx = np.sort(rng.choice(pool, size=m, replace=False))
            preds.append(int(assigner(subsample_sim(idx), model)))
        return preds

    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for preds in parallel_map(trial, range(trials), threads):
        for true, pred in enumerate(preds):
            counts[true, pred] += 1
    return StabilityResult(ConfusionMatrix(counts, tuple(labels)), method, fraction, trials, seed, weighting)


def split_portions(docs: Sequence[Document], seed: int = 0, portions: int = 3) -> list[list[Document]]:
    """Random portions of near-equal size; the first is the training portion."""
    return split_batches(docs, portions, seed)
