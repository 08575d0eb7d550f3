"""Metrics, ROC/AUC, confusion matrices, and the error-profile analysis.

Everything here is pure arithmetic over prediction/truth pairs. The AUC is
computed as an exact integer ratio (trapezoid with tied scores grouped into
a single step), which makes it agree with the pairwise probability
estimator to float precision and makes label-flip symmetry exact.
"""

from __future__ import annotations

import csv
import json
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

from .corpus import LabeledDataset, NEGATIVE, POSITIVE
from .errors import DatasetError
from .textprep import NormalizedMessage


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        for name in ("tp", "fp", "tn", "fn"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def errors(self) -> int:
        return self.fp + self.fn


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    precision: float
    recall_pos: float
    f1_pos: float
    f1_neg: float
    macro_f1: float

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall_pos": self.recall_pos,
            "f1_pos": self.f1_pos,
            "f1_neg": self.f1_neg,
            "macro_f1": self.macro_f1,
        }


@dataclass(frozen=True)
class RocCurve:
    """Threshold-swept ROC points from (0,0) to (1,1) plus the AUC.

    auc_numerator / auc_denominator is the exact rational AUC (denominator
    2 x positives x negatives); ``auc`` is its float value.
    """

    points: tuple[tuple[float, float], ...]
    thresholds: tuple[float, ...]
    auc: float
    auc_numerator: int
    auc_denominator: int


@dataclass(frozen=True)
class ErrorProfile:
    """Shares of misclassified messages that are long or carry emoji."""

    count: int
    long_text_share: float
    emoji_share: float
    train_mean_chars: float


def confusion(preds: Sequence, truth: LabeledDataset) -> ConfusionMatrix:
    """Count tp/fp/tn/fn between predictions and ground truth, by post_id."""
    truth_by_id = {ex.message.post_id: ex.label for ex in truth}
    pred_ids = [p.post_id for p in preds]
    dupes = sorted(pid for pid, n in Counter(pred_ids).items() if n > 1)
    if dupes:
        raise DatasetError(f"duplicate prediction ids: {', '.join(dupes[:5])}")
    if set(pred_ids) != set(truth_by_id):
        missing = sorted(set(truth_by_id) - set(pred_ids))[:5]
        extra = sorted(set(pred_ids) - set(truth_by_id))[:5]
        raise DatasetError(
            f"prediction/truth id mismatch: missing {missing}, unexpected {extra}"
        )
    tp = fp = tn = fn = 0
    for p in preds:
        actual = truth_by_id[p.post_id]
        if p.label == POSITIVE and actual == POSITIVE:
            tp += 1
        elif p.label == POSITIVE and actual == NEGATIVE:
            fp += 1
        elif p.label == NEGATIVE and actual == NEGATIVE:
            tn += 1
        else:
            fn += 1
    return ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn)


def _safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


def metrics(cm: ConfusionMatrix) -> MetricsReport:
    """Standard binary metrics; undefined ratios fall back to 0."""
    if cm.total == 0:
        raise DatasetError("cannot compute metrics on an empty confusion matrix")
    accuracy = (cm.tp + cm.tn) / cm.total
    precision = _safe_div(cm.tp, cm.tp + cm.fp)
    recall_pos = _safe_div(cm.tp, cm.tp + cm.fn)
    f1_pos = _safe_div(2 * precision * recall_pos, precision + recall_pos)
    precision_neg = _safe_div(cm.tn, cm.tn + cm.fn)
    recall_neg = _safe_div(cm.tn, cm.tn + cm.fp)
    f1_neg = _safe_div(2 * precision_neg * recall_neg, precision_neg + recall_neg)
    return MetricsReport(
        accuracy=accuracy,
        precision=precision,
        recall_pos=recall_pos,
        f1_pos=f1_pos,
        f1_neg=f1_neg,
        macro_f1=(f1_pos + f1_neg) / 2.0,
    )


def roc_auc(scored: Sequence[tuple[float, str]]) -> RocCurve:
    """ROC curve by threshold sweep; tied scores collapse into one step.

    The trapezoidal area is accumulated as an integer numerator over the
    denominator 2*P*N, then converted to a float once — so it matches the
    brute-force pairwise estimator (ties counted half) to float precision,
    and flipping every label yields exactly 1 - auc.
    """
    n_pos = sum(1 for _, label in scored if label == POSITIVE)
    n_neg = sum(1 for _, label in scored if label == NEGATIVE)
    bad = sorted({label for _, label in scored} - {POSITIVE, NEGATIVE})
    if bad:
        raise DatasetError(f"unknown truth labels: {bad}")
    if n_pos == 0 or n_neg == 0:
        raise DatasetError("ROC needs both classes present")

    by_score: dict[float, list[int]] = {}
    for score, label in scored:
        cell = by_score.setdefault(float(score), [0, 0])
        cell[0 if label == POSITIVE else 1] += 1

    points = [(0.0, 0.0)]
    thresholds = [float("inf")]
    tp = fp = 0
    numerator = 0  # sum of delta_fp * (tp_before + tp_after)
    for score in sorted(by_score, reverse=True):
        d_tp, d_fp = by_score[score]
        numerator += d_fp * (2 * tp + d_tp)
        tp += d_tp
        fp += d_fp
        points.append((fp / n_neg, tp / n_pos))
        thresholds.append(score)

    # Divide on the >= 0.5 side and derive the other by subtraction from 1.0,
    # which is exact there; flipping all labels then negates the value without
    # rounding drift (auc_flipped == 1.0 - auc holds bit-for-bit).
    denominator = 2 * n_pos * n_neg
    half = denominator // 2
    if numerator == half:
        auc = 0.5
    elif numerator > half:
        auc = numerator / denominator
    else:
        auc = 1.0 - (denominator - numerator) / denominator
    return RocCurve(
        points=tuple(points),
        thresholds=tuple(thresholds),
        auc=auc,
        auc_numerator=numerator,
        auc_denominator=denominator,
    )


def error_profile(
    misclassified: Sequence[NormalizedMessage], train_mean_chars: float
) -> ErrorProfile:
    """Shares of misclassified messages longer than the training mean or with emoji."""
    n = len(misclassified)
    if n == 0:
        return ErrorProfile(0, 0.0, 0.0, train_mean_chars)
    long_text = sum(1 for m in misclassified if m.char_count > train_mean_chars)
    with_emoji = sum(1 for m in misclassified if m.emoji_count > 0)
    return ErrorProfile(
        count=n,
        long_text_share=long_text / n,
        emoji_share=with_emoji / n,
        train_mean_chars=train_mean_chars,
    )


def mean_char_count(dataset: LabeledDataset) -> float:
    if len(dataset) == 0:
        raise DatasetError("cannot average char counts of an empty dataset")
    return sum(ex.message.char_count for ex in dataset) / len(dataset)


def write_roc_csv(curve: RocCurve, path: str | Path) -> None:
    """Plot-ready CSV: threshold,fpr,tpr per swept point."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["threshold", "fpr", "tpr"])
        for threshold, (fpr, tpr) in zip(curve.thresholds, curve.points):
            writer.writerow([threshold, fpr, tpr])


def write_metrics_report(
    report: MetricsReport, cm: ConfusionMatrix, path: str | Path
) -> None:
    """Machine-readable metrics report (JSON) with the confusion counts."""
    payload = {
        "confusion": {"tp": cm.tp, "fp": cm.fp, "tn": cm.tn, "fn": cm.fn},
        "metrics": report.to_dict(),
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def format_metrics(report: MetricsReport, cm: ConfusionMatrix) -> str:
    """Human-readable metrics block for CLI output."""
    lines = [
        f"total      {cm.total}",
        f"tp/fp/tn/fn  {cm.tp}/{cm.fp}/{cm.tn}/{cm.fn}",
        f"accuracy   {report.accuracy:.4f}",
        f"precision  {report.precision:.4f}",
        f"recall+    {report.recall_pos:.4f}",
        f"macro F1   {report.macro_f1:.4f}",
    ]
    return "\n".join(lines)
