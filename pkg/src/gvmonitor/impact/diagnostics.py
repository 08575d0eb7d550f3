"""Fit diagnostics: parallel-trend series and QQ data, as plot-ready CSV."""

from __future__ import annotations

import csv
from collections.abc import Sequence
from dataclasses import dataclass
from datetime import date
from pathlib import Path

import numpy as np
from scipy.stats import norm

from ..errors import DatasetError
from .panel import PanelObservation
from .regression import RegressionFit


@dataclass(frozen=True)
class TrendRow:
    date: date
    group: str  # "treatment" | "control"
    period: str  # "pre" | "post"
    replies: int
    cumulative: int


@dataclass(frozen=True)
class DiagnosticsBundle:
    trend_rows: tuple[TrendRow, ...]
    qq_points: tuple[tuple[float, float], ...]  # (theoretical, observed)


def trend_series(panel: Sequence[PanelObservation]) -> list[TrendRow]:
    """Per-group daily and cumulative reply series, split at the intervention."""
    rows: list[TrendRow] = []
    for treatment, group in ((1, "treatment"), (0, "control")):
        series = sorted(
            (o for o in panel if o.treatment == treatment), key=lambda o: o.date
        )
        running = 0
        for obs in series:
            running += obs.replies
            rows.append(
                TrendRow(
                    date=obs.date,
                    group=group,
                    period="post" if obs.intervention else "pre",
                    replies=obs.replies,
                    cumulative=running,
                )
            )
    return rows


def qq_points(fit: RegressionFit) -> list[tuple[float, float]]:
    """Sorted standardized residuals against standard-normal quantiles."""
    resid = np.asarray(fit.residuals, dtype=np.float64)
    if resid.size < 3:
        raise DatasetError("need at least 3 residuals for a QQ series")
    std = resid.std(ddof=1)
    if std == 0:
        raise DatasetError("residuals are constant; QQ series undefined")
    standardized = np.sort((resid - resid.mean()) / std)
    n = resid.size
    theoretical = norm.ppf((np.arange(1, n + 1) - 0.5) / n)
    return list(zip(theoretical.tolist(), standardized.tolist()))


def diagnostics(fit: RegressionFit, panel: Sequence[PanelObservation]) -> DiagnosticsBundle:
    return DiagnosticsBundle(
        trend_rows=tuple(trend_series(panel)),
        qq_points=tuple(qq_points(fit)),
    )


def write_trend_csv(rows: Sequence[TrendRow], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "group", "period", "replies", "cumulative"])
        for r in rows:
            writer.writerow([r.date.isoformat(), r.group, r.period, r.replies, r.cumulative])


def write_qq_csv(points: Sequence[tuple[float, float]], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["theoretical", "observed"])
        for theoretical, observed in points:
            writer.writerow([theoretical, observed])
