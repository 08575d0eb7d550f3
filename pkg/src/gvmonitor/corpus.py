"""Labeled dataset construction from line-delimited corpora.

Builds the main training set (interaction-derived positives plus a seeded
3:1 sample of unlabeled no-location messages) and the two holdout sets used
for evaluation: the interaction holdout and the human-recoded report-month
holdout. Datasets are immutable once built.
"""

from __future__ import annotations

import json
import logging
import random
from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, replace
from datetime import date, datetime, timezone
from pathlib import Path

from .errors import CorpusError, DatasetError
from .textprep import NormalizedMessage, RawPost, normalize

logger = logging.getLogger(__name__)

POSITIVE = "positive"
NEGATIVE = "negative"
LABELS = (POSITIVE, NEGATIVE)
LABEL_SOURCES = ("interaction", "human_coded", "pseudo", "sampled_negative")

_REQUIRED_FIELDS = ("id", "text", "created_at")


@dataclass(frozen=True)
class LabeledExample:
    """One training/eval unit: a normalized message plus label provenance.

    created_at is set for corpus-derived examples (it drives the temporal
    splits); pseudo-labeled examples may omit it.
    """

    message: NormalizedMessage
    label: str
    label_source: str
    created_at: datetime | None = None

    def __post_init__(self):
        if self.label not in LABELS:
            raise DatasetError(f"unknown label {self.label!r}")
        if self.label_source not in LABEL_SOURCES:
            raise DatasetError(f"unknown label_source {self.label_source!r}")
        if self.label_source == "interaction" and self.label != POSITIVE:
            raise DatasetError("interaction-sourced examples are positive by construction")


@dataclass(frozen=True)
class LabeledDataset:
    """An ordered, immutable collection of labeled examples."""

    name: str
    examples: tuple[LabeledExample, ...]
    cutoff_date: date | None = None

    def __post_init__(self):
        object.__setattr__(self, "examples", tuple(self.examples))
        counts = Counter(ex.message.post_id for ex in self.examples)
        dupes = sorted(pid for pid, n in counts.items() if n > 1)
        if dupes:
            shown = ", ".join(dupes[:5])
            raise DatasetError(f"dataset {self.name!r} has duplicate post_ids: {shown}")

    def __len__(self) -> int:
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)

    def count(self, label: str) -> int:
        return sum(1 for ex in self.examples if ex.label == label)

    def label_counts(self) -> dict[str, int]:
        counts = Counter(ex.label for ex in self.examples)
        return {label: counts.get(label, 0) for label in LABELS}

    @property
    def post_ids(self) -> frozenset[str]:
        return frozenset(ex.message.post_id for ex in self.examples)


@dataclass(frozen=True)
class SplitSpec:
    """Train/holdout split: strictly-before-cutoff trains, on/after holds out."""

    cutoff: date
    negative_ratio: int
    seed: int

    def __post_init__(self):
        if self.negative_ratio < 1:
            raise ValueError("negative_ratio must be >= 1")


@dataclass
class CorpusLoadResult:
    """Posts parsed from a corpus file, with the malformed-line tally."""

    posts: list[RawPost]
    skipped: int


def _as_utc(dt: datetime) -> datetime:
    if dt.tzinfo is None:
        return dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def _cutoff_instant(cutoff: date) -> datetime:
    return datetime(cutoff.year, cutoff.month, cutoff.day, tzinfo=timezone.utc)


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 timestamp into an aware UTC datetime."""
    if not isinstance(value, str):
        raise ValueError(f"timestamp must be a string, got {type(value).__name__}")
    return _as_utc(datetime.fromisoformat(value.replace("Z", "+00:00")))


def _has_location(raw: RawPost) -> bool:
    return raw.has_geo_tag or bool((raw.author_location_text or "").strip())


def parse_post_record(record: Mapping) -> RawPost:
    """Turn one decoded corpus record into a RawPost (raises ValueError)."""
    missing = [f for f in _REQUIRED_FIELDS if not record.get(f)]
    if missing:
        raise ValueError(f"missing fields: {', '.join(missing)}")
    return RawPost(
        id=str(record["id"]),
        text=str(record["text"]),
        created_at=parse_timestamp(record["created_at"]),
        author_handle=str(record.get("author_handle") or ""),
        author_location_text=record.get("author_location_text"),
        author_bio=record.get("author_bio"),
        has_geo_tag=bool(record.get("has_geo_tag", False)),
        language_tag=record.get("language_tag"),
        is_reply=bool(record.get("is_reply", False)),
    )


def load_corpus(path: str | Path) -> CorpusLoadResult:
    """Read a UTF-8 line-delimited corpus file.

    Malformed lines are logged and counted, never fatal; an unreadable file
    is.
    """
    path = Path(path)
    try:
        raw_lines = path.read_text("utf-8").splitlines()
    except OSError as exc:
        raise CorpusError(f"cannot read corpus file {path}: {exc}") from exc
    posts: list[RawPost] = []
    skipped = 0
    for lineno, line in enumerate(raw_lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            if not isinstance(record, dict):
                raise ValueError("record is not an object")
            posts.append(parse_post_record(record))
        except (ValueError, KeyError) as exc:
            skipped += 1
            logger.warning("%s:%d: skipping malformed line: %s", path, lineno, exc)
    return CorpusLoadResult(posts=posts, skipped=skipped)


def assemble_training_set(
    positives: list[RawPost],
    unlabeled_pool: list[RawPost],
    spec: SplitSpec,
    name: str = "train",
) -> LabeledDataset:
    """Build the training set: pre-cutoff positives + ratio x sampled negatives.

    Negatives are drawn uniformly (seeded) from the unlabeled pool after
    removing posts that overlap the positives by id, posts on/after the
    cutoff, and posts carrying any location metadata. The assembled set is
    shuffled with the same seed.
    """
    boundary = _cutoff_instant(spec.cutoff)
    kept_pos = [raw for raw in positives if _as_utc(raw.created_at) < boundary]
    positive_ids = {raw.id for raw in positives}
    pool = [
        raw
        for raw in unlabeled_pool
        if raw.id not in positive_ids
        and _as_utc(raw.created_at) < boundary
        and not _has_location(raw)
    ]
    needed = spec.negative_ratio * len(kept_pos)
    if len(pool) < needed:
        raise DatasetError(
            f"negative pool too small: need {needed} posts, only {len(pool)} available"
        )
    rng = random.Random(spec.seed)
    sampled = rng.sample(pool, needed)
    examples = [
        LabeledExample(normalize(raw), POSITIVE, "interaction", _as_utc(raw.created_at))
        for raw in kept_pos
    ] + [
        LabeledExample(normalize(raw), NEGATIVE, "sampled_negative", _as_utc(raw.created_at))
        for raw in sampled
    ]
    rng.shuffle(examples)
    return LabeledDataset(name=name, examples=tuple(examples), cutoff_date=spec.cutoff)


def build_holdout_interactions(
    positives: list[RawPost],
    geo_pool: list[RawPost],
    spec: SplitSpec,
    name: str = "holdout_interactions",
) -> LabeledDataset:
    """Build the interaction holdout from on/after-cutoff posts.

    Positives are the interaction-derived posts on/after the cutoff; the
    negatives are the geo pool minus pre-cutoff posts minus anything present
    among the positives by id.
    """
    boundary = _cutoff_instant(spec.cutoff)
    kept_pos = [raw for raw in positives if _as_utc(raw.created_at) >= boundary]
    positive_ids = {raw.id for raw in positives}
    kept_neg = [
        raw
        for raw in geo_pool
        if _as_utc(raw.created_at) >= boundary and raw.id not in positive_ids
    ]
    examples = [
        LabeledExample(normalize(raw), POSITIVE, "interaction", _as_utc(raw.created_at))
        for raw in kept_pos
    ] + [
        LabeledExample(normalize(raw), NEGATIVE, "sampled_negative", _as_utc(raw.created_at))
        for raw in kept_neg
    ]
    return LabeledDataset(name=name, examples=tuple(examples), cutoff_date=spec.cutoff)


def build_holdout_reports(
    holdout: LabeledDataset,
    recode: Mapping[str, str],
    year: int,
    month: int,
) -> tuple[LabeledDataset, int]:
    """Subset a holdout to one calendar month and apply human recodes.

    Returns the recoded dataset and the number of labels that flipped.
    Every recode id must exist in the input dataset; recoded entries carry
    label_source="human_coded" whether or not the label changed.
    """
    unknown = sorted(set(recode) - holdout.post_ids)
    if unknown:
        shown = ", ".join(unknown[:10])
        raise DatasetError(f"recode ids not present in {holdout.name!r}: {shown}")
    for pid, label in recode.items():
        if label not in LABELS:
            raise DatasetError(f"recode for {pid!r} has unknown label {label!r}")
    kept: list[LabeledExample] = []
    flipped = 0
    for ex in holdout.examples:
        if ex.created_at is None:
            raise DatasetError(
                f"example {ex.message.post_id} has no timestamp; cannot window by month"
            )
        stamp = _as_utc(ex.created_at)
        if stamp.year != year or stamp.month != month:
            continue
        new_label = recode.get(ex.message.post_id)
        if new_label is not None:
            if new_label != ex.label:
                flipped += 1
            ex = replace(ex, label=new_label, label_source="human_coded")
        kept.append(ex)
    name = f"holdout_reports_{year:04d}-{month:02d}"
    return (
        LabeledDataset(name=name, examples=tuple(kept), cutoff_date=holdout.cutoff_date),
        flipped,
    )


def save_dataset(dataset: LabeledDataset, path: str | Path) -> None:
    """Write a dataset as UTF-8 JSON lines (one example per line)."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for ex in dataset.examples:
            msg = ex.message
            fh.write(
                json.dumps(
                    {
                        "post_id": msg.post_id,
                        "text": msg.text,
                        "char_count": msg.char_count,
                        "emoji_count": msg.emoji_count,
                        "contained_url": msg.contained_url,
                        "contained_mention": msg.contained_mention,
                        "label": ex.label,
                        "label_source": ex.label_source,
                        "created_at": ex.created_at.isoformat() if ex.created_at else None,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def load_dataset(path: str | Path, name: str | None = None) -> LabeledDataset:
    """Read a dataset written by :func:`save_dataset` (strict: no bad lines)."""
    path = Path(path)
    try:
        raw_lines = path.read_text("utf-8").splitlines()
    except OSError as exc:
        raise DatasetError(f"cannot read dataset file {path}: {exc}") from exc
    examples = []
    for lineno, line in enumerate(raw_lines, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            msg = NormalizedMessage(
                post_id=rec["post_id"],
                text=rec["text"],
                char_count=int(rec["char_count"]),
                emoji_count=int(rec["emoji_count"]),
                contained_url=bool(rec["contained_url"]),
                contained_mention=bool(rec["contained_mention"]),
            )
            stamp = rec.get("created_at")
            examples.append(
                LabeledExample(
                    message=msg,
                    label=rec["label"],
                    label_source=rec["label_source"],
                    created_at=parse_timestamp(stamp) if stamp else None,
                )
            )
        except (ValueError, KeyError) as exc:
            raise DatasetError(f"{path}:{lineno}: malformed dataset line: {exc}") from exc
    return LabeledDataset(name=name or path.stem, examples=tuple(examples))


def dataset_manifest(dataset: LabeledDataset, spec: SplitSpec | None = None) -> dict:
    """Sidecar metadata for a dataset: name, cutoff, seed, per-label counts."""
    cutoff = dataset.cutoff_date or (spec.cutoff if spec else None)
    manifest = {
        "name": dataset.name,
        "cutoff": cutoff.isoformat() if cutoff else None,
        "seed": spec.seed if spec else None,
        "counts": dataset.label_counts(),
        "total": len(dataset),
    }
    return manifest


def write_manifest(dataset: LabeledDataset, path: str | Path, spec: SplitSpec | None = None) -> None:
    Path(path).write_text(
        json.dumps(dataset_manifest(dataset, spec), indent=2) + "\n", encoding="utf-8"
    )
