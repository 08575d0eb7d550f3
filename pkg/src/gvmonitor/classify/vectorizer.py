"""Native TF-IDF vectorization for the baseline classifier.

Tokens are lowercased runs of word characters (underscore excluded), so
placeholder tokens like ``<URL>`` and emoji text like ``:pistol:`` surface
as plain vocabulary terms. idf(t) = ln((1+N)/(1+df(t))) + 1 and document
vectors are L2-normalized tf x idf.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from ..errors import DatasetError
from ..textprep import NormalizedMessage

_TOKEN_RE = re.compile(r"[^\W_]+")


def tokenize(text: str) -> list[str]:
    """Lowercase and split on whitespace/punctuation boundaries."""
    return _TOKEN_RE.findall(text.lower())


def _as_text(doc: NormalizedMessage | str) -> str:
    return doc.text if isinstance(doc, NormalizedMessage) else doc


@dataclass(frozen=True)
class TfidfVocabulary:
    """Fitted vocabulary: dense term indices plus idf weights."""

    term_index: dict[str, int]
    idf: np.ndarray
    document_count: int

    def __post_init__(self):
        if len(self.term_index) != len(self.idf):
            raise ValueError("term_index and idf lengths differ")

    def __len__(self) -> int:
        return len(self.term_index)

    def idf_of(self, term: str) -> float | None:
        idx = self.term_index.get(term)
        return None if idx is None else float(self.idf[idx])


def fit_tfidf(docs: Sequence[NormalizedMessage | str]) -> TfidfVocabulary:
    """Fit a vocabulary with smoothed idf over the given documents."""
    if not docs:
        raise DatasetError("cannot fit a vocabulary on an empty document list")
    df: Counter[str] = Counter()
    for doc in docs:
        df.update(set(tokenize(_as_text(doc))))
    terms = sorted(df)
    n = len(docs)
    idf = np.array(
        [math.log((1 + n) / (1 + df[t])) + 1.0 for t in terms], dtype=np.float64
    )
    return TfidfVocabulary(
        term_index={t: i for i, t in enumerate(terms)}, idf=idf, document_count=n
    )


def vectorize(vocab: TfidfVocabulary, doc: NormalizedMessage | str) -> dict[int, float]:
    """L2-normalized tf x idf weights for one document, as {index: weight}.

    Out-of-vocabulary terms are ignored; a document with no known terms
    yields an empty (zero) vector.
    """
    counts = Counter(tokenize(_as_text(doc)))
    weights = {
        vocab.term_index[t]: tf * float(vocab.idf[vocab.term_index[t]])
        for t, tf in counts.items()
        if t in vocab.term_index
    }
    norm = math.sqrt(sum(w * w for w in weights.values()))
    if norm == 0.0:
        return {}
    return {i: w / norm for i, w in weights.items()}


def vectorize_matrix(
    vocab: TfidfVocabulary, docs: Iterable[NormalizedMessage | str]
) -> sparse.csr_matrix:
    """Stack :func:`vectorize` rows into a CSR matrix (rows in input order)."""
    data: list[float] = []
    indices: list[int] = []
    indptr = [0]
    for doc in docs:
        vec = vectorize(vocab, doc)
        for idx in sorted(vec):
            indices.append(idx)
            data.append(vec[idx])
        indptr.append(len(indices))
    return sparse.csr_matrix(
        (np.asarray(data), np.asarray(indices, dtype=np.int32), np.asarray(indptr, dtype=np.int32)),
        shape=(len(indptr) - 1, len(vocab)),
    )
