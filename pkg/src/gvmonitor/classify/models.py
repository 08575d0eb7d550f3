"""Classifier implementations: random baseline and multinomial Naive Bayes.

Both follow the scikit-learn estimator protocol (``fit``/``predict``/
``predict_proba``, params via ``get_params``) so they can sit in pipelines
and grid searches, while exposing message-level helpers that return
:class:`ScoredPrediction` rows for the monitor.
"""

from __future__ import annotations

import json
import random
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from ..corpus import LabeledDataset, NEGATIVE, POSITIVE
from ..errors import DatasetError
from ..textprep import NormalizedMessage
from .validation import check_fitted, check_texts, check_threshold
from .vectorizer import TfidfVocabulary, fit_tfidf, vectorize, vectorize_matrix


@dataclass(frozen=True)
class ScoredPrediction:
    """One classifier verdict: positive-class probability plus the label."""

    post_id: str
    score: float
    label: str
    model_id: str

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score {self.score} outside [0, 1]")
        if self.label not in (POSITIVE, NEGATIVE):
            raise ValueError(f"unknown label {self.label!r}")


def _resolve_label(score: float, threshold: float) -> str:
    # Ties resolve positive: a missed report costs more than a false alarm.
    return POSITIVE if score >= threshold else NEGATIVE


class RandomBaseline(BaseEstimator, ClassifierMixin):
    """Coin-flip classifier: each prediction picks a class with p=0.5.

    The seeded stream is stateful — successive calls advance it — and
    :meth:`reset` rewinds to the start, so two runs from the same seed
    produce identical label sequences.
    """

    def __init__(self, seed: int = 0, model_id: str = "random-baseline"):
        self.seed = seed
        self.model_id = model_id
        self.reset()

    def reset(self) -> None:
        self._rng = random.Random(self.seed)

    def fit(self, X=None, y=None):
        return self

    def predict_message(self, msg: NormalizedMessage) -> ScoredPrediction:
        score = 1.0 if self._rng.random() < 0.5 else 0.0
        return ScoredPrediction(
            post_id=msg.post_id,
            score=score,
            label=_resolve_label(score, 0.5),
            model_id=self.model_id,
        )

    def predict(self, X: Sequence[NormalizedMessage | str]) -> np.ndarray:
        labels = [POSITIVE if self._rng.random() < 0.5 else NEGATIVE for _ in X]
        return np.asarray(labels, dtype=object)


class NaiveBayesTextClassifier(BaseEstimator, ClassifierMixin):
    """Multinomial Naive Bayes over L2-normalized TF-IDF weights.

    Additive smoothing ``alpha`` on per-class feature mass; log-priors from
    class frequencies; the positive-class posterior is the score and the
    label comes from ``threshold`` with ties resolving positive. A document
    with no in-vocabulary terms scores at the class prior.
    """

    def __init__(
        self,
        alpha: float = 1.0,
        threshold: float = 0.5,
        model_id: str = "nb-tfidf",
    ):
        self.alpha = alpha
        self.threshold = threshold
        self.model_id = model_id

    def fit(self, X: Sequence[NormalizedMessage | str], y: Sequence[str]):
        check_texts(X)
        check_threshold(self.threshold)
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")
        y = np.asarray(list(y), dtype=object)
        if len(y) != len(X):
            raise DatasetError(f"{len(X)} documents but {len(y)} labels")
        present = set(y.tolist())
        if present != {POSITIVE, NEGATIVE}:
            raise DatasetError(
                f"training data must contain both classes, got {sorted(present)}"
            )
        self.classes_ = np.array([NEGATIVE, POSITIVE], dtype=object)
        self.vocabulary_: TfidfVocabulary = fit_tfidf(X)
        matrix = vectorize_matrix(self.vocabulary_, X)
        n_terms = len(self.vocabulary_)
        feature_mass = np.zeros((2, n_terms), dtype=np.float64)
        class_counts = np.zeros(2, dtype=np.float64)
        for cls_idx, cls in enumerate(self.classes_):
            rows = matrix[np.asarray(y == cls).nonzero()[0]]
            feature_mass[cls_idx] = np.asarray(rows.sum(axis=0)).ravel()
            class_counts[cls_idx] = rows.shape[0]
        smoothed = feature_mass + self.alpha
        self.feature_log_prob_ = np.log(smoothed) - np.log(
            smoothed.sum(axis=1, keepdims=True)
        )
        self.class_log_prior_ = np.log(class_counts) - np.log(class_counts.sum())
        return self

    def _joint_log_likelihood(self, X: Sequence[NormalizedMessage | str]) -> np.ndarray:
        matrix = vectorize_matrix(self.vocabulary_, X)
        return matrix @ self.feature_log_prob_.T + self.class_log_prior_

    def predict_proba(self, X: Sequence[NormalizedMessage | str]) -> np.ndarray:
        check_fitted(self, ("vocabulary_", "feature_log_prob_"))
        check_texts(X)
        joint = self._joint_log_likelihood(X)
        # log-sum-exp normalization, stable for tiny corpora and large ones
        shifted = joint - joint.max(axis=1, keepdims=True)
        probs = np.exp(shifted)
        return probs / probs.sum(axis=1, keepdims=True)

    def predict(self, X: Sequence[NormalizedMessage | str]) -> np.ndarray:
        scores = self.predict_proba(X)[:, 1]
        labels = [_resolve_label(float(s), self.threshold) for s in scores]
        return np.asarray(labels, dtype=object)

    def predict_message(self, msg: NormalizedMessage) -> ScoredPrediction:
        score = float(self.predict_proba([msg])[0, 1])
        return ScoredPrediction(
            post_id=msg.post_id,
            score=score,
            label=_resolve_label(score, self.threshold),
            model_id=self.model_id,
        )

    def predict_messages(self, msgs: Sequence[NormalizedMessage]) -> list[ScoredPrediction]:
        scores = self.predict_proba(msgs)[:, 1]
        return [
            ScoredPrediction(
                post_id=msg.post_id,
                score=float(s),
                label=_resolve_label(float(s), self.threshold),
                model_id=self.model_id,
            )
            for msg, s in zip(msgs, scores)
        ]


def train_naive_bayes(
    data: LabeledDataset, alpha: float = 1.0, threshold: float = 0.5
) -> NaiveBayesTextClassifier:
    """Fit the Naive Bayes baseline on a labeled dataset."""
    docs = [ex.message for ex in data]
    labels = [ex.label for ex in data]
    model = NaiveBayesTextClassifier(alpha=alpha, threshold=threshold)
    return model.fit(docs, labels)


def predict(model: NaiveBayesTextClassifier, msg: NormalizedMessage) -> ScoredPrediction:
    """Score one message with a trained model."""
    return model.predict_message(msg)


def save_nb_model(model: NaiveBayesTextClassifier, path: str | Path) -> None:
    """Persist a fitted model as JSON (vocabulary, idf, weights, priors)."""
    check_fitted(model, ("vocabulary_", "feature_log_prob_", "class_log_prior_"))
    terms = [""] * len(model.vocabulary_)
    for term, idx in model.vocabulary_.term_index.items():
        terms[idx] = term
    payload = {
        "model_id": model.model_id,
        "alpha": model.alpha,
        "threshold": model.threshold,
        "classes": model.classes_.tolist(),
        "class_log_prior": model.class_log_prior_.tolist(),
        "feature_log_prob": model.feature_log_prob_.tolist(),
        "vocabulary": {
            "terms": terms,
            "idf": model.vocabulary_.idf.tolist(),
            "document_count": model.vocabulary_.document_count,
        },
    }
    Path(path).write_text(json.dumps(payload) + "\n", encoding="utf-8")


def load_nb_model(path: str | Path) -> NaiveBayesTextClassifier:
    """Restore a model written by :func:`save_nb_model`."""
    try:
        payload = json.loads(Path(path).read_text("utf-8"))
        model = NaiveBayesTextClassifier(
            alpha=payload["alpha"],
            threshold=payload["threshold"],
            model_id=payload["model_id"],
        )
        vocab = payload["vocabulary"]
        model.vocabulary_ = TfidfVocabulary(
            term_index={t: i for i, t in enumerate(vocab["terms"])},
            idf=np.asarray(vocab["idf"], dtype=np.float64),
            document_count=int(vocab["document_count"]),
        )
        model.classes_ = np.asarray(payload["classes"], dtype=object)
        model.class_log_prior_ = np.asarray(payload["class_log_prior"], dtype=np.float64)
        model.feature_log_prob_ = np.asarray(payload["feature_log_prob"], dtype=np.float64)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise DatasetError(f"cannot load model from {path}: {exc}") from exc
    return model
