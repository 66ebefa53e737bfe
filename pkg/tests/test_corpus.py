import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from specmerge.corpus import (
    Document,
    TermVector,
    TokenizerConfig,
    build_term_vectors,
    cosine_similarity_matrix,
    ingest,
    read_jsonl,
    tokenize,
    vectorize,
)
from specmerge.errors import CorpusError, ZeroNormVector


def doc(i, tokens, label=None):
    return Document(str(i), " ".join(tokens), label, tuple(tokens))


class TestTokenize:
    def test_punctuation_and_case(self):
        assert tokenize("Black Lives Matter!") == ["black", "lives", "matter"]

    def test_empty(self):
        assert tokenize("") == []

    def test_short_tokens_dropped(self):
        assert tokenize("a BB-Naija a", TokenizerConfig(min_token_len=2)) == ["bb", "naija"]

    def test_stopwords(self):
        cfg = TokenizerConfig(stopwords=frozenset({"the"}))
        assert tokenize("The cat and THE dog", cfg) == ["cat", "and", "dog"]

    def test_underscore_and_digits(self):
        assert tokenize("covid_19 2021") == ["covid", "19", "2021"]


class TestTermVectors:
    def test_tf_counts(self):
        (v,) = build_term_vectors([doc(0, ["a", "a", "b"])], "tf")
        assert dict(v.entries) == {"a": 2.0, "b": 1.0}
        assert v.norm == pytest.approx(math.sqrt(5), abs=1e-12)

    def test_tfidf_two_docs(self):
        v1, v2 = build_term_vectors([doc(0, ["a"]), doc(1, ["b"])], "tf-idf")
        assert v1.entries["a"] == pytest.approx(0.6931471805599453, abs=1e-12)
        assert v2.entries["b"] == pytest.approx(math.log(2), abs=1e-15)

    def test_tfidf_single_doc_degenerate(self):
        (v,) = build_term_vectors([doc(0, ["x"])], "tf-idf")
        assert v.entries["x"] == 0.0

    def test_zero_tokens_rejected(self):
        with pytest.raises(CorpusError):
            build_term_vectors([doc(0, [])])

    def test_tfidf_monotone_in_document_frequency(self):
        # "rare" in 1 of 4 docs, "mid" in 2, "common" in 4; tf = 1 for all
        docs = [
            doc(0, ["rare", "mid", "common"]),
            doc(1, ["mid", "common"]),
            doc(2, ["common", "zz"]),
            doc(3, ["common", "yy"]),
        ]
        v = build_term_vectors(docs, "tf-idf")[0].entries
        assert v["rare"] >= v["mid"] >= v["common"]


class TestCosine:
    def test_identical_vectors(self):
        S = cosine_similarity_matrix([TermVector({"a": 1.0, "b": 2.0})] * 2)
        assert S.values[0, 1] == pytest.approx(1.0, abs=1e-15)

    def test_disjoint(self):
        S = cosine_similarity_matrix([TermVector({"a": 1.0}), TermVector({"b": 3.0})])
        assert S.values[0, 1] == 0.0

    def test_half_overlap(self):
        S = cosine_similarity_matrix([TermVector({"a": 1.0, "b": 1.0}), TermVector({"a": 1.0, "c": 1.0})])
        assert S.values[0, 1] == pytest.approx(0.5, abs=1e-15)

    def test_zero_norm(self):
        with pytest.raises(ZeroNormVector):
            cosine_similarity_matrix([TermVector({"a": 1.0}), TermVector({})])


sparse_vectors = st.lists(
    st.dictionaries(st.sampled_from("abcdefgh"), st.floats(0.01, 10.0), min_size=1, max_size=6),
    min_size=2,
    max_size=12,
)


@given(sparse_vectors)
def test_similarity_invariants(vecs):
    S = cosine_similarity_matrix([TermVector(v) for v in vecs]).values
    assert np.array_equal(S, S.T)
    assert S.min() >= 0 and S.max() <= 1
    assert np.all(np.diag(S) == 0)
    # brute-force dot products
    for i, a in enumerate(vecs):
        for j, b in enumerate(vecs):
            if i < j:
                dot = sum(w * b.get(t, 0.0) for t, w in a.items())
                na = math.sqrt(sum(w * w for w in a.values()))
                nb = math.sqrt(sum(w * w for w in b.values()))
                assert S[i, j] == pytest.approx(min(1.0, dot / (na * nb)), abs=1e-12)


@given(sparse_vectors, st.randoms(use_true_random=False))
def test_permutation_equivariance(vecs, rnd):
    perm = list(range(len(vecs)))
    rnd.shuffle(perm)
    S = cosine_similarity_matrix([TermVector(v) for v in vecs]).values
    P = cosine_similarity_matrix([TermVector(vecs[i]) for i in perm]).values
    np.testing.assert_allclose(P, S[np.ix_(perm, perm)], atol=1e-14)


def test_ingest_filters_short_and_duplicates():
    long_text = " ".join(f"word{i}" for i in range(10))
    docs = [Document("a", long_text), Document("b", "too short text")]
    kept = ingest(docs)
    assert [d.id for d in kept] == ["a"]
    assert all(len(d.tokens) >= 10 for d in kept)
    with pytest.raises(CorpusError):
        ingest([Document("a", long_text), Document("a", long_text)])


def test_zero_norm_documents_dropped_with_warning(caplog):
    # "x" occurs everywhere, so its idf is 0 and document 0 vanishes
    docs = [doc(0, ["x", "x"]), doc(1, ["x", "y"]), doc(2, ["x", "z"])]
    kept, vecs = vectorize(docs, "tf-idf")
    assert [d.id for d in kept] == ["1", "2"]
    assert all(v.norm > 0 for v in vecs)
    assert "zero-norm" in caplog.text


def test_read_jsonl(tmp_path):
    p = tmp_path / "c.jsonl"
    p.write_text('{"id": "1", "text": "héllo wörld", "label": "x"}\n\n{"id": 2, "text": "b"}\n', encoding="utf-8")
    docs = read_jsonl(p)
    assert [(d.id, d.label) for d in docs] == [("1", "x"), ("2", None)]
    assert tokenize(docs[0].text) == ["héllo", "wörld"]
    p.write_text('{"text": "no id"}\n')
    with pytest.raises(CorpusError):
        read_jsonl(p)
