"""Input-validation helpers shared by the estimator classes."""

from __future__ import annotations

from collections.abc import Sequence

from ..textprep import NormalizedMessage


def check_fitted(estimator, attributes: Sequence[str]) -> None:
    """Raise if any fitted attribute is missing (estimator not fitted yet)."""
    missing = [a for a in attributes if not hasattr(estimator, a)]
    if missing:
        raise RuntimeError(
            f"{type(estimator).__name__} is not fitted; call fit() first "
            f"(missing {', '.join(missing)})"
        )


def check_texts(X) -> None:
    """Validate a document sequence: NormalizedMessage or str entries only."""
    if isinstance(X, (str, bytes)):
        raise TypeError("X must be a sequence of documents, not a single string")
    for i, doc in enumerate(X):
        if not isinstance(doc, (NormalizedMessage, str)):
            raise TypeError(
                f"document {i} has type {type(doc).__name__}; "
                "expected NormalizedMessage or str"
            )


def check_threshold(threshold: float) -> None:
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must be in (0, 1), got {threshold}")
