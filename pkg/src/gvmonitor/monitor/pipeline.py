"""Poll -> normalize -> classify -> geo-match -> bucket -> persist.

The tab rule routes every scored post into exactly one of three tabs;
classifier failures quarantine the post instead of dropping it, so the
batch always lands whole. Configuration updates swap atomically and take
effect at the next poll.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, replace
from datetime import datetime, timezone

from ..errors import GvmonitorError, NotFoundError, TransportError
from ..textprep import RawPost, normalize
from .config import MonitorConfig
from .geo import match_region
from .query import matches, parse_keyword_query, unparse
from .sources import make_source
from .store import (
    MonitorStore,
    TAB_NEGATIVE,
    TAB_QUARANTINE,
    TAB_REPORT_IN_REGION,
    TAB_REPORT_NO_GEO,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TabAssignment:
    post_id: str
    tab: str
    score: float | None
    matched_region: str | None
    error: str | None = None

    def __post_init__(self):
        if self.tab == TAB_REPORT_IN_REGION and self.matched_region is None:
            raise ValueError("report_in_region requires a matched region")
        if self.tab == TAB_REPORT_NO_GEO and self.matched_region is not None:
            raise ValueError("report_no_geo must not carry a matched region")


@dataclass(frozen=True)
class InteractionRecord:
    post_id: str
    region: str
    sent_at: datetime
    template_id: str
    operator: str


@dataclass(frozen=True)
class PipelineStatus:
    last_success_at: datetime | None
    last_batch_size: int
    consecutive_failures: int


def assign_tab(
    score: float, threshold: float, matched_region: str | None, region: str
) -> tuple[str, str | None]:
    """The pure tab rule on (score, threshold, matched_region, home region).

    Returns (tab, recorded_region): below threshold is negative; at/above,
    a match equal to the monitor's region files under report_in_region and
    anything else (no match, or a match for some other region) files under
    report_no_geo with no region recorded.
    """
    if score < threshold:
        return TAB_NEGATIVE, None
    if matched_region is not None and matched_region == region:
        return TAB_REPORT_IN_REGION, matched_region
    return TAB_REPORT_NO_GEO, None


def post_url(raw: RawPost) -> str | None:
    """Reconstruct the public post URL when id and handle allow it."""
    if raw.author_handle and raw.id.isdigit():
        return f"https://twitter.com/{raw.author_handle}/status/{raw.id}"
    return None


def poll_once(cfg: MonitorConfig, source, cursor: str | None):
    """Fetch new posts and keep only those matching the keyword query."""
    batch, new_cursor = source.fetch(cursor)
    tree = cfg.parsed_query
    kept = [p for p in batch if matches(tree, p.text)]
    return kept, new_cursor


def classify_and_bucket(
    batch: list[RawPost], model, cfg: MonitorConfig
) -> list[TabAssignment]:
    """Normalize, score, and bucket a batch; classifier errors quarantine."""
    assignments: list[TabAssignment] = []
    for raw in batch:
        msg = normalize(raw)
        try:
            pred = model.predict_message(msg)
        except GvmonitorError as exc:
            assignments.append(
                TabAssignment(
                    post_id=raw.id,
                    tab=TAB_QUARANTINE,
                    score=None,
                    matched_region=None,
                    error=str(exc),
                )
            )
            continue
        matched = match_region(raw.author_location_text, list(cfg.alias_table))
        tab, recorded = assign_tab(pred.score, cfg.threshold, matched, cfg.region)
        assignments.append(
            TabAssignment(
                post_id=raw.id, tab=tab, score=pred.score, matched_region=recorded
            )
        )
    return assignments


class MonitorPipeline:
    """Owns config, model, source, and store; runs poll cycles."""

    def __init__(self, cfg: MonitorConfig, model, store: MonitorStore, source=None):
        self._cfg = cfg
        self._model = model
        self._store = store
        self._source = source if source is not None else make_source(cfg.source)
        self._cfg_lock = threading.Lock()
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None

    @property
    def cfg(self) -> MonitorConfig:
        with self._cfg_lock:
            return self._cfg

    @property
    def store(self) -> MonitorStore:
        return self._store

    def run_cycle(self) -> int:
        """One poll+classify+persist cycle; returns the batch size.

        On source failure the cursor stays put, consecutive_failures is
        bumped, and the transport error propagates to the caller.
        """
        cfg = self.cfg
        cursor = self._store.load_source_cursor()
        try:
            batch, new_cursor = poll_once(cfg, self._source, cursor)
        except TransportError:
            self._store.record_failure()
            raise
        assignments = classify_and_bucket(batch, self._model, cfg)
        by_id = {raw.id: raw for raw in batch}
        rows = []
        for a in assignments:
            raw = by_id[a.post_id]
            rows.append(
                {
                    "post_id": a.post_id,
                    "text": normalize(raw).text,
                    "raw_text": raw.text,
                    "created_at": raw.created_at.astimezone(timezone.utc).isoformat()
                    if raw.created_at.tzinfo
                    else raw.created_at.replace(tzinfo=timezone.utc).isoformat(),
                    "author_handle": raw.author_handle,
                    "author_location_text": raw.author_location_text,
                    "author_bio": raw.author_bio,
                    "url": post_url(raw),
                    "tab": a.tab,
                    "score": a.score,
                    "matched_region": a.matched_region,
                    "error": a.error,
                }
            )
        self._store.insert_batch(rows, new_cursor)
        return len(batch)

    def run_loop(self) -> None:
        """Background polling at cfg.poll_interval until stop() is called."""
        if self._thread is not None:
            return

        def loop():
            while not self._stop.wait(self.cfg.poll_interval):
                try:
                    self.run_cycle()
                except GvmonitorError as exc:
                    logger.warning("poll cycle failed: %s", exc)

        self._thread = threading.Thread(target=loop, name="monitor-poll", daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None

    def status(self) -> PipelineStatus:
        raw = self._store.get_status()
        stamp = raw["last_success_at"]
        return PipelineStatus(
            last_success_at=datetime.fromisoformat(stamp) if stamp else None,
            last_batch_size=raw["last_batch_size"],
            consecutive_failures=raw["consecutive_failures"],
        )

    def update_keywords(self, query: str) -> MonitorConfig:
        """Swap in a new keyword query; rejects (and keeps the old) on parse error."""
        parse_keyword_query(query)  # raises QueryParseError on bad input
        with self._cfg_lock:
            old = self._cfg.keyword_query
            self._cfg = self._cfg.with_query(query)
            new_cfg = self._cfg
        self._store.audit_config_change("keyword_query", old, query)
        return new_cfg

    def record_interaction(self, post_id: str, operator: str) -> tuple[InteractionRecord, str]:
        """Persist one interaction per post and render the reply text."""
        if not operator or not operator.strip():
            raise GvmonitorError("operator must be non-empty")
        cfg = self.cfg
        post = self._store.get_post(post_id)
        if post is None:
            raise NotFoundError(f"post {post_id!r} not found")
        sent_at = datetime.now(timezone.utc)
        self._store.insert_interaction(
            post_id=post_id,
            region=cfg.region,
            sent_at=sent_at,
            template_id=cfg.template_id,
            operator=operator,
        )
        record = InteractionRecord(
            post_id=post_id,
            region=cfg.region,
            sent_at=sent_at,
            template_id=cfg.template_id,
            operator=operator,
        )
        rendered = cfg.interaction_template.format(
            handle=post.author_handle, region=cfg.region
        )
        return record, rendered
