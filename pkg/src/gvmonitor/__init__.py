"""Social-media monitoring toolkit for gun-violence reports.

The package covers the full pipeline: text normalization and corpus
assembly, a TF-IDF Naive Bayes classifier plus an external-runtime
client, self-training with human audit hooks, evaluation metrics, a
polling monitor with an HTTP API, and panel regression for impact
estimates.
"""

from .errors import (
    ConflictError,
    ConvergenceError,
    CorpusError,
    DatasetError,
    GvmonitorError,
    NotFoundError,
    ProtocolError,
    QueryParseError,
    TransportError,
)

__version__ = "0.1.0"

__all__ = [
    "ConflictError",
    "ConvergenceError",
    "CorpusError",
    "DatasetError",
    "GvmonitorError",
    "NotFoundError",
    "ProtocolError",
    "QueryParseError",
    "TransportError",
    "__version__",
]
