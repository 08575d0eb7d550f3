"""Daily two-region panel construction and the difference-in-means estimate.

The panel has one row per (date, region) over the analysis window: daily
reply counts (zero-filled), event covariates joined by day, and the
intervention flag switching on at the intervention start date.
"""

from __future__ import annotations

import csv
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from datetime import date, datetime, timedelta
from pathlib import Path
from statistics import fmean

from ..errors import DatasetError

PANEL_COLUMNS = (
    "date",
    "region",
    "replies",
    "intervention",
    "treatment",
    "number_cases",
    "number_victims",
    "avg_population",
)


@dataclass(frozen=True)
class PanelObservation:
    date: date
    region: str
    replies: int
    intervention: int
    treatment: int
    number_cases: int
    number_victims: int
    avg_population: float

    def __post_init__(self):
        if self.replies < 0:
            raise ValueError("replies must be non-negative")
        if self.intervention not in (0, 1) or self.treatment not in (0, 1):
            raise ValueError("intervention and treatment are 0/1 flags")


@dataclass(frozen=True)
class EventRecord:
    """One day of event-aggregator data for a region."""

    date: date
    region: str
    number_cases: int
    number_victims: int
    avg_population: float


@dataclass(frozen=True)
class DiDEstimate:
    treat_before: float
    treat_after: float
    ctrl_before: float
    ctrl_after: float
    estimate: float


def _dates_in(window: tuple[date, date]) -> list[date]:
    start, end = window
    if end < start:
        raise DatasetError(f"empty window: {start} to {end}")
    return [start + timedelta(days=i) for i in range((end - start).days + 1)]


def _interaction_day(record) -> date:
    sent_at = record.sent_at
    return sent_at.date() if isinstance(sent_at, datetime) else sent_at


def build_panel(
    interactions: Sequence,
    events: Iterable[EventRecord],
    window: tuple[date, date],
    treatment_region: str,
    control_region: str,
    intervention_start: date,
) -> list[PanelObservation]:
    """Cross (window days x two regions) into panel rows.

    replies = count of interactions per (day, region), zero where silent;
    covariates come from the matching event record, with avg_population
    carried forward from the last observed value on event-free days.
    """
    days = _dates_in(window)
    regions = (treatment_region, control_region)
    reply_counts: Counter[tuple[date, str]] = Counter()
    seen_regions = set()
    for rec in interactions:
        seen_regions.add(rec.region)
        reply_counts[(_interaction_day(rec), rec.region)] += 1
    events_by_key: dict[tuple[date, str], EventRecord] = {}
    for ev in events:
        seen_regions.add(ev.region)
        events_by_key[(ev.date, ev.region)] = ev
    missing = [r for r in regions if r not in seen_regions]
    if missing:
        raise DatasetError(
            f"regions missing from both interactions and events: {', '.join(missing)}"
        )
    panel: list[PanelObservation] = []
    last_population: dict[str, float] = {r: 0.0 for r in regions}
    for day in days:
        for region in regions:
            ev = events_by_key.get((day, region))
            if ev is not None:
                cases, victims = ev.number_cases, ev.number_victims
                last_population[region] = ev.avg_population
            else:
                cases = victims = 0
            panel.append(
                PanelObservation(
                    date=day,
                    region=region,
                    replies=reply_counts.get((day, region), 0),
                    intervention=int(day >= intervention_start),
                    treatment=int(region == treatment_region),
                    number_cases=cases,
                    number_victims=victims,
                    avg_population=last_population[region],
                )
            )
    return panel


def diff_in_means(panel: Sequence[PanelObservation]) -> DiDEstimate:
    """(treat_after - treat_before) - (ctrl_after - ctrl_before) on mean replies."""
    cells: dict[tuple[int, int], list[int]] = {}
    for obs in panel:
        cells.setdefault((obs.treatment, obs.intervention), []).append(obs.replies)
    names = {
        (1, 0): "treatment/before",
        (1, 1): "treatment/after",
        (0, 0): "control/before",
        (0, 1): "control/after",
    }
    for key, label in names.items():
        if not cells.get(key):
            raise DatasetError(f"panel cell {label} is empty")
    tb, ta = fmean(cells[(1, 0)]), fmean(cells[(1, 1)])
    cb, ca = fmean(cells[(0, 0)]), fmean(cells[(0, 1)])
    return DiDEstimate(
        treat_before=tb,
        treat_after=ta,
        ctrl_before=cb,
        ctrl_after=ca,
        estimate=(ta - tb) - (ca - cb),
    )


def describe_overdispersion(panel: Sequence[PanelObservation]) -> tuple[float, float, bool]:
    """(mean, variance, overdispersed?) of daily replies; variance > mean flags."""
    if not panel:
        raise DatasetError("empty panel")
    values = [obs.replies for obs in panel]
    n = len(values)
    mean = sum(values) / n
    variance = sum((v - mean) ** 2 for v in values) / n
    return mean, variance, variance > mean


def save_panel(panel: Sequence[PanelObservation], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PANEL_COLUMNS)
        for obs in panel:
            writer.writerow(
                [
                    obs.date.isoformat(),
                    obs.region,
                    obs.replies,
                    obs.intervention,
                    obs.treatment,
                    obs.number_cases,
                    obs.number_victims,
                    obs.avg_population,
                ]
            )


def load_panel(path: str | Path) -> list[PanelObservation]:
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            rows = list(reader)
    except OSError as exc:
        raise DatasetError(f"cannot read panel file {path}: {exc}") from exc
    panel = []
    for i, row in enumerate(rows, start=2):
        try:
            panel.append(
                PanelObservation(
                    date=date.fromisoformat(row["date"]),
                    region=row["region"],
                    replies=int(row["replies"]),
                    intervention=int(row["intervention"]),
                    treatment=int(row["treatment"]),
                    number_cases=int(row["number_cases"]),
                    number_victims=int(row["number_victims"]),
                    avg_population=float(row["avg_population"]),
                )
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise DatasetError(f"{path}:{i}: malformed panel row: {exc}") from exc
    return panel
