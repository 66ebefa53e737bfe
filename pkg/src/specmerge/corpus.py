"""Document ingestion, term vectors and the cosine similarity graph."""

from __future__ import annotations

import json
import logging
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import CorpusError, ZeroNormVector

logger = logging.getLogger(__name__)

_SPLIT = re.compile(r"[\W_]+")


@dataclass(frozen=True)
class TokenizerConfig:
    min_token_len: int = 2
    stopwords: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    label: str | None = None
    tokens: tuple[str, ...] = ()


@dataclass(frozen=True)
class TermVector:
    entries: Mapping[str, float]
    norm: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "norm", math.sqrt(math.fsum(w * w for w in self.entries.values())))


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    """Symmetric similarity graph with zero diagonal, entries in [0, 1]."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise CorpusError(f"similarity matrix must be square, got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def submatrix(self, idx: Sequence[int]) -> "SimilarityMatrix":
        idx = np.asarray(idx, dtype=int)
        return SimilarityMatrix(self.values[np.ix_(idx, idx)])

    def check(self) -> None:
        v = self.values
        if not np.array_equal(v, v.T):
            raise CorpusError("similarity matrix is not exactly symmetric")
        if np.any(v < 0) or np.any(v > 1):
            raise CorpusError("similarity values outside [0, 1]")
        if np.any(np.diag(v) != 0):
            raise CorpusError("similarity diagonal must be zero")


def tokenize(text: str, config: TokenizerConfig = TokenizerConfig()) -> list[str]:
    """Lowercase, split on non-alphanumerics, drop short tokens and stopwords."""
    out = []
    for tok in _SPLIT.split(text.lower()):
        if len(tok) < config.min_token_len or tok in config.stopwords:
            continue
        out.append(tok)
    return out


def build_term_vectors(docs: Sequence[Document], weighting: str = "tf") -> list[TermVector]:
    if not docs:
        raise CorpusError("cannot vectorize an empty corpus")
    if weighting not in ("tf", "tf-idf"):
        raise CorpusError(f"unknown weighting {weighting!r}")
    counts = []
    for d in docs:
        if not d.tokens:
            raise CorpusError(f"document {d.id!r} has no tokens")
        counts.append(Counter(d.tokens))
    if weighting == "tf":
        return [TermVector({t: float(c) for t, c in cnt.items()}) for cnt in counts]

    n_docs = len(docs)
    df = Counter(t for cnt in counts for t in cnt)
    return [
        TermVector({t: c * math.log(n_docs / df[t]) for t, c in cnt.items()})
        for cnt in counts
    ]


def _to_csr(vectors: Sequence[TermVector]) -> sp.csr_matrix:
    vocab: dict[str, int] = {}
    rows, cols, vals = [], [], []
    for i, v in enumerate(vectors):
        # sorted so column order never depends on dict insertion history
        for t in sorted(v.entries):
            j = vocab.setdefault(t, len(vocab))
            rows.append(i)
            cols.append(j)
            vals.append(v.entries[t])
    return sp.csr_matrix((vals, (rows, cols)), shape=(len(vectors), max(len(vocab), 1)))


def cosine_similarity_matrix(vectors: Sequence[TermVector]) -> SimilarityMatrix:
    norms = np.array([v.norm for v in vectors])
    bad = np.flatnonzero(norms == 0)
    if bad.size:
        raise ZeroNormVector(f"{bad.size} zero-norm vector(s), first at position {bad[0]}")
    X = _to_csr(vectors)
    dots = (X @ X.T).toarray()
    S = dots / np.outer(norms, norms)
    S = np.clip(np.triu(S, 1), 0.0, 1.0)
    return SimilarityMatrix(S + S.T)


def read_jsonl(path: str | Path) -> list[Document]:
    docs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                docs.append(Document(id=str(obj["id"]), text=str(obj["text"]), label=obj.get("label")))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise CorpusError(f"{path}:{lineno}: bad record ({exc})") from exc
    return docs


def documents_to_jsonl(docs: Iterable[Document]) -> str:
    lines = []
    for d in docs:
        obj = {"id": d.id, "text": d.text}
        if d.label is not None:
            obj["label"] = d.label
        lines.append(json.dumps(obj, ensure_ascii=False))
    return "".join(line + "\n" for line in lines)


def ingest(
    docs: Iterable[Document],
    config: TokenizerConfig = TokenizerConfig(),
    min_tokens: int = 10,
) -> list[Document]:
    """Tokenize and keep documents with at least ``min_tokens`` tokens."""
    out, seen = [], set()
    dropped = 0
    for d in docs:
        if d.id in seen:
            raise CorpusError(f"duplicate document id {d.id!r}")
        seen.add(d.id)
        toks = tuple(tokenize(d.text, config))
        if len(toks) < min_tokens:
            dropped += 1
            continue
        out.append(Document(d.id, d.text, d.label, toks))
    if dropped:
        logger.info("dropped %d document(s) with fewer than %d tokens", dropped, min_tokens)
    return out


def vectorize(docs: Sequence[Document], weighting: str = "tf") -> tuple[list[Document], list[TermVector]]:
    """Term vectors for ``docs``, dropping (with a warning) any of zero norm."""
    vecs = build_term_vectors(docs, weighting)
    keep = [i for i, v in enumerate(vecs) if v.norm > 0]
    if len(keep) < len(docs):
        logger.warning("dropped %d zero-norm document(s)", len(docs) - len(keep))
    return [docs[i] for i in keep], [vecs[i] for i in keep]


def similarity_of(docs: Sequence[Document], weighting: str = "tf") -> SimilarityMatrix:
    return cosine_similarity_matrix(build_term_vectors(docs, weighting))
