"""Classifier implementations and the external-runtime protocol client."""

from .models import (
    NaiveBayesTextClassifier,
    RandomBaseline,
    ScoredPrediction,
    load_nb_model,
    predict,
    save_nb_model,
    train_naive_bayes,
)
from .runtime import (
    ExternalRuntimeClient,
    ExternalRuntimeConfig,
    TrainingRecipe,
    external_score,
    write_model_manifest,
)
from .vectorizer import TfidfVocabulary, fit_tfidf, tokenize, vectorize, vectorize_matrix

__all__ = [
    "ExternalRuntimeClient",
    "ExternalRuntimeConfig",
    "NaiveBayesTextClassifier",
    "RandomBaseline",
    "ScoredPrediction",
    "TfidfVocabulary",
    "TrainingRecipe",
    "external_score",
    "fit_tfidf",
    "load_nb_model",
    "predict",
    "save_nb_model",
    "tokenize",
    "train_naive_bayes",
    "vectorize",
    "vectorize_matrix",
    "write_model_manifest",
]
