"""Semi-supervised self-training: pseudo-label, audit, augment, retrain.

One cycle scores an unlabeled pool with the current model, draws a seeded
quantile audit sample for human review, optionally applies corrections,
then retrains from scratch on the base set plus pseudo-labeled entries.
"""

from __future__ import annotations

import random
from collections import Counter
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import LABELS, LabeledDataset, LabeledExample, NEGATIVE, POSITIVE
from .errors import DatasetError, GvmonitorError
from .textprep import NormalizedMessage

Trainer = Callable[[LabeledDataset], object]


@dataclass(frozen=True)
class PseudoLabelEntry:
    post_id: str
    score: float
    pseudo_label: str

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score {self.score} outside [0, 1]")
        if self.pseudo_label not in LABELS:
            raise ValueError(f"unknown pseudo_label {self.pseudo_label!r}")


@dataclass(frozen=True)
class PseudoLabelSet:
    """Model-assigned labels for an unlabeled pool."""

    entries: tuple[PseudoLabelEntry, ...]
    source_model_id: str
    pool_name: str

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        counts = Counter(e.post_id for e in self.entries)
        dupes = sorted(pid for pid, n in counts.items() if n > 1)
        if dupes:
            raise DatasetError(f"duplicate pool post_ids: {', '.join(dupes[:5])}")

    def __len__(self) -> int:
        return len(self.entries)

    def label_counts(self) -> dict[str, int]:
        counts = Counter(e.pseudo_label for e in self.entries)
        return {label: counts.get(label, 0) for label in LABELS}

    @property
    def post_ids(self) -> frozenset[str]:
        return frozenset(e.post_id for e in self.entries)


@dataclass(frozen=True)
class AuditSample:
    """Per-(quartile, label) review sample, at most k entries per cell."""

    cells: Mapping[tuple[int, str], tuple[PseudoLabelEntry, ...]]
    k: int

    @property
    def total(self) -> int:
        return sum(len(v) for v in self.cells.values())


def _score_pool(model, pool: Sequence[NormalizedMessage]):
    if hasattr(model, "predict_messages"):
        return model.predict_messages(pool)
    return model.score_messages(pool)


def generate_pseudo_labels(
    model,
    pool: Sequence[NormalizedMessage],
    reserved_ids: frozenset[str] | set[str] = frozenset(),
    pool_name: str = "pool",
    confidence_floor: float | None = None,
) -> PseudoLabelSet:
    """Score every pool message and label it by the model's threshold.

    ``reserved_ids`` holds the post_ids of the model's training data and
    all holdouts; any overlap is an error. The optional confidence floor
    (off by default) keeps only entries with max(score, 1-score) >= floor.
    """
    overlap = sorted({m.post_id for m in pool} & set(reserved_ids))
    if overlap:
        shown = ", ".join(overlap[:10])
        raise DatasetError(f"pool overlaps training or holdout data: {shown}")
    entries = []
    for pred in _score_pool(model, pool):
        if confidence_floor is not None:
            if max(pred.score, 1.0 - pred.score) < confidence_floor:
                continue
        entries.append(PseudoLabelEntry(pred.post_id, pred.score, pred.label))
    model_id = getattr(model, "model_id", None) or getattr(
        getattr(model, "cfg", None), "model_id", "unknown"
    )
    return PseudoLabelSet(tuple(entries), source_model_id=model_id, pool_name=pool_name)


def _quartile_of(score: float, q1: float, q2: float, q3: float) -> int:
    # inclusive lower, exclusive upper, last quartile closed
    if score < q1:
        return 1
    if score < q2:
        return 2
    if score < q3:
        return 3
    return 4


def quantile_audit_sample(p: PseudoLabelSet, k: int, seed: int) -> AuditSample:
    """Draw up to k entries per (quartile, pseudo label) cell, seeded.

    Quartile boundaries are computed within each pseudo-label class — labels
    are monotone in score, so class-wise boundaries are what make all eight
    cells reachable (ten per class and quartile = an 80-entry review).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = random.Random(seed)
    cells: dict[tuple[int, str], tuple[PseudoLabelEntry, ...]] = {}
    for label in (POSITIVE, NEGATIVE):
        class_entries = [e for e in p.entries if e.pseudo_label == label]
        if not class_entries:
            continue
        scores = np.array([e.score for e in class_entries])
        q1, q2, q3 = np.quantile(scores, [0.25, 0.5, 0.75])
        buckets: dict[int, list[PseudoLabelEntry]] = {1: [], 2: [], 3: [], 4: []}
        for e in class_entries:
            buckets[_quartile_of(e.score, q1, q2, q3)].append(e)
        for quartile, bucket in buckets.items():
            if bucket:
                take = rng.sample(bucket, min(k, len(bucket)))
                cells[(quartile, label)] = tuple(take)
    return AuditSample(cells=cells, k=k)


def write_audit_review(
    sample: AuditSample,
    pool: Sequence[NormalizedMessage],
    path: str | Path,
) -> None:
    """Write the review file: post_id, text, score, pseudo_label, blank human_label."""
    texts = {m.post_id: m.text for m in pool}
    lines = ["post_id\ttext\tscore\tpseudo_label\thuman_label"]
    for (quartile, label) in sorted(sample.cells):
        for e in sample.cells[(quartile, label)]:
            lines.append(f"{e.post_id}\t{texts.get(e.post_id, '')}\t{e.score:.6f}\t{e.pseudo_label}\t")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_audit_corrections(path: str | Path) -> dict[str, str]:
    """Read reviewer-filled labels back: {post_id: human_label}, blanks skipped."""
    corrections: dict[str, str] = {}
    lines = Path(path).read_text("utf-8").splitlines()
    for line in lines[1:]:
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 5:
            raise DatasetError(f"malformed review line: {line!r}")
        post_id, _, _, _, human = parts
        human = human.strip()
        if not human:
            continue
        if human not in LABELS:
            raise DatasetError(f"review for {post_id!r} has unknown label {human!r}")
        corrections[post_id] = human
    return corrections


def apply_corrections(p: PseudoLabelSet, corrections: Mapping[str, str]) -> PseudoLabelSet:
    """Override pseudo labels with human review labels, by post_id."""
    unknown = sorted(set(corrections) - p.post_ids)
    if unknown:
        raise DatasetError(f"corrections for unknown post_ids: {', '.join(unknown[:10])}")
    entries = tuple(
        PseudoLabelEntry(e.post_id, e.score, corrections.get(e.post_id, e.pseudo_label))
        for e in p.entries
    )
    return PseudoLabelSet(entries, p.source_model_id, p.pool_name)


def augment_and_retrain(
    base_train: LabeledDataset,
    p: PseudoLabelSet,
    pool: Sequence[NormalizedMessage],
    trainer: Trainer,
):
    """Retrain from scratch on base_train plus the pseudo-labeled entries.

    Returns (retrained model, augmented dataset).
    """
    overlap = sorted(p.post_ids & base_train.post_ids)
    if overlap:
        raise DatasetError(
            f"pseudo labels overlap the base training set: {', '.join(overlap[:10])}"
        )
    by_id = {m.post_id: m for m in pool}
    missing = sorted(pid for pid in p.post_ids if pid not in by_id)
    if missing:
        raise DatasetError(f"pool is missing pseudo-labeled posts: {', '.join(missing[:10])}")
    pseudo_examples = [
        LabeledExample(
            message=by_id[e.post_id], label=e.pseudo_label, label_source="pseudo"
        )
        for e in p.entries
    ]
    augmented = LabeledDataset(
        name=f"{base_train.name}+pseudo",
        examples=tuple(list(base_train.examples) + pseudo_examples),
        cutoff_date=base_train.cutoff_date,
    )
    try:
        return trainer(augmented), augmented
    except GvmonitorError:
        raise
    except Exception as exc:
        raise GvmonitorError(
            f"retraining failed on augmented set {augmented.name!r} "
            f"({len(augmented)} examples): {exc}"
        ) from exc


def run_self_training(
    base_train: LabeledDataset,
    pool: Sequence[NormalizedMessage],
    trainer: Trainer,
    iterations: int = 1,
    k: int = 10,
    seed: int = 0,
    holdout_ids: frozenset[str] | set[str] = frozenset(),
    corrections: Mapping[str, str] | None = None,
):
    """Run the full loop for n iterations; each retrain starts from scratch.

    Returns (final model, last PseudoLabelSet, last AuditSample). Iterations
    share no state beyond the retrained model handle.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    reserved = frozenset(base_train.post_ids) | frozenset(holdout_ids)
    model = trainer(base_train)
    pseudo = None
    audit = None
    for _ in range(iterations):
        pseudo = generate_pseudo_labels(model, pool, reserved_ids=reserved)
        audit = quantile_audit_sample(pseudo, k=k, seed=seed)
        if corrections:
            pseudo = apply_corrections(pseudo, corrections)
        model, _ = augment_and_retrain(base_train, pseudo, pool, trainer)
    return model, pseudo, audit
