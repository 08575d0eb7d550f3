"""Embedded persistence for the monitor: posts, tabs, interactions, status.

Single-file sqlite in WAL mode. One writer (the poll loop) appends whole
batches in a single transaction, so concurrent API readers see either the
pre-batch or the post-batch state, never a partial batch. Tab pages are
cursor-paginated on (created_at DESC, post_id DESC), which stays stable
while new rows arrive.
"""

from __future__ import annotations

import base64
import json
import sqlite3
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from ..errors import ConflictError, GvmonitorError, NotFoundError

TAB_REPORT_IN_REGION = "report_in_region"
TAB_NEGATIVE = "negative"
TAB_REPORT_NO_GEO = "report_no_geo"
TAB_QUARANTINE = "quarantine"
TABS = (TAB_REPORT_IN_REGION, TAB_NEGATIVE, TAB_REPORT_NO_GEO, TAB_QUARANTINE)

_SCHEMA = """
CREATE TABLE IF NOT EXISTS posts (
    post_id TEXT PRIMARY KEY,
    text TEXT NOT NULL,
    raw_text TEXT NOT NULL,
    created_at TEXT NOT NULL,
    author_handle TEXT NOT NULL DEFAULT '',
    author_location_text TEXT,
    author_bio TEXT,
    url TEXT,
    tab TEXT NOT NULL,
    score REAL,
    matched_region TEXT,
    error TEXT
);
CREATE INDEX IF NOT EXISTS idx_posts_tab_order
    ON posts(tab, created_at DESC, post_id DESC);
CREATE TABLE IF NOT EXISTS interactions (
    post_id TEXT PRIMARY KEY REFERENCES posts(post_id),
    region TEXT NOT NULL,
    sent_at TEXT NOT NULL,
    template_id TEXT NOT NULL,
    operator TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS status (
    id INTEGER PRIMARY KEY CHECK (id = 1),
    last_success_at TEXT,
    last_batch_size INTEGER NOT NULL DEFAULT 0,
    consecutive_failures INTEGER NOT NULL DEFAULT 0
);
CREATE TABLE IF NOT EXISTS source_cursor (
    id INTEGER PRIMARY KEY CHECK (id = 1),
    cursor TEXT
);
CREATE TABLE IF NOT EXISTS config_audit (
    seq INTEGER PRIMARY KEY AUTOINCREMENT,
    changed_at TEXT NOT NULL,
    key TEXT NOT NULL,
    old_value TEXT,
    new_value TEXT
);
"""


@dataclass(frozen=True)
class StoredPost:
    """One persisted post with its tab assignment (a tab page row)."""

    post_id: str
    text: str
    raw_text: str
    created_at: str
    author_handle: str
    author_location_text: str | None
    author_bio: str | None
    url: str | None
    tab: str
    score: float | None
    matched_region: str | None
    error: str | None
    interacted: bool


def encode_cursor(created_at: str, post_id: str) -> str:
    payload = json.dumps([created_at, post_id]).encode("utf-8")
    return base64.urlsafe_b64encode(payload).decode("ascii")


def decode_cursor(cursor: str) -> tuple[str, str]:
    try:
        created_at, post_id = json.loads(base64.urlsafe_b64decode(cursor.encode("ascii")))
        return str(created_at), str(post_id)
    except (ValueError, TypeError) as exc:
        raise GvmonitorError(f"invalid pagination cursor: {cursor!r}") from exc


class MonitorStore:
    """Thread-safe persistence facade. All writes serialize on one lock."""

    def __init__(self, path: str | Path = ":memory:"):
        self._conn = sqlite3.connect(str(path), check_same_thread=False)
        self._conn.row_factory = sqlite3.Row
        self._lock = threading.Lock()
        with self._lock:
            self._conn.execute("PRAGMA journal_mode=WAL")
            self._conn.executescript(_SCHEMA)
            self._conn.execute(
                "INSERT OR IGNORE INTO status (id, last_batch_size, consecutive_failures)"
                " VALUES (1, 0, 0)"
            )
            self._conn.commit()

    def close(self) -> None:
        self._conn.close()

    # -- batch ingestion ----------------------------------------------------

    def insert_batch(
        self,
        rows: list[dict],
        new_cursor: str | None,
        success_at: datetime | None = None,
    ) -> int:
        """Insert a classified batch, advance the source cursor, mark success.

        All one transaction: readers never see a partial batch. Posts whose
        id already exists are ignored (duplicate suppression across polls).
        Returns the number of newly inserted rows.
        """
        inserted = 0
        with self._lock:
            try:
                for row in rows:
                    cur = self._conn.execute(
                        """
                        INSERT OR IGNORE INTO posts
                        (post_id, text, raw_text, created_at, author_handle,
                         author_location_text, author_bio, url, tab, score,
                         matched_region, error)
                        VALUES (:post_id, :text, :raw_text, :created_at,
                                :author_handle, :author_location_text,
                                :author_bio, :url, :tab, :score,
                                :matched_region, :error)
                        """,
                        row,
                    )
                    inserted += cur.rowcount
                if new_cursor is not None:
                    self._conn.execute(
                        "INSERT INTO source_cursor (id, cursor) VALUES (1, ?) "
                        "ON CONFLICT(id) DO UPDATE SET cursor = excluded.cursor",
                        (new_cursor,),
                    )
                stamp = (success_at or datetime.now(timezone.utc)).isoformat()
                self._conn.execute(
                    """
                    UPDATE status SET
                        last_success_at = MAX(COALESCE(last_success_at, ''), ?),
                        last_batch_size = ?,
                        consecutive_failures = 0
                    WHERE id = 1
                    """,
                    (stamp, len(rows)),
                )
                self._conn.commit()
            except sqlite3.Error:
                self._conn.rollback()
                raise
        return inserted

    def record_failure(self) -> None:
        with self._lock:
            self._conn.execute(
                "UPDATE status SET consecutive_failures = consecutive_failures + 1 "
                "WHERE id = 1"
            )
            self._conn.commit()

    # -- cursors and status --------------------------------------------------

    def load_source_cursor(self) -> str | None:
        row = self._conn.execute("SELECT cursor FROM source_cursor WHERE id = 1").fetchone()
        return row["cursor"] if row else None

    def get_status(self) -> dict:
        row = self._conn.execute(
            "SELECT last_success_at, last_batch_size, consecutive_failures "
            "FROM status WHERE id = 1"
        ).fetchone()
        return {
            "last_success_at": row["last_success_at"],
            "last_batch_size": row["last_batch_size"],
            "consecutive_failures": row["consecutive_failures"],
        }

    # -- tab pages ------------------------------------------------------------

    def get_tab(
        self, tab: str, cursor: str | None = None, limit: int = 50
    ) -> tuple[list[StoredPost], str | None]:
        """One page of a tab, newest first; returns (rows, next_cursor)."""
        if tab not in TABS:
            raise NotFoundError(f"unknown tab {tab!r}; expected one of {', '.join(TABS)}")
        if limit < 1:
            raise GvmonitorError("limit must be >= 1")
        params: list = [tab]
        where = "p.tab = ?"
        if cursor:
            created_at, post_id = decode_cursor(cursor)
            where += " AND (p.created_at < ? OR (p.created_at = ? AND p.post_id < ?))"
            params += [created_at, created_at, post_id]
        rows = self._conn.execute(
            f"""
            SELECT p.*, i.post_id IS NOT NULL AS interacted
            FROM posts p LEFT JOIN interactions i ON i.post_id = p.post_id
            WHERE {where}
            ORDER BY p.created_at DESC, p.post_id DESC
            LIMIT ?
            """,
            params + [limit],
        ).fetchall()
        posts = [
            StoredPost(
                post_id=r["post_id"],
                text=r["text"],
                raw_text=r["raw_text"],
                created_at=r["created_at"],
                author_handle=r["author_handle"],
                author_location_text=r["author_location_text"],
                author_bio=r["author_bio"],
                url=r["url"],
                tab=r["tab"],
                score=r["score"],
                matched_region=r["matched_region"],
                error=r["error"],
                interacted=bool(r["interacted"]),
            )
            for r in rows
        ]
        next_cursor = None
        if len(posts) == limit:
            last = posts[-1]
            next_cursor = encode_cursor(last.created_at, last.post_id)
        return posts, next_cursor

    def tab_counts(self) -> dict[str, int]:
        counts = {tab: 0 for tab in TABS}
        for row in self._conn.execute("SELECT tab, COUNT(*) AS n FROM posts GROUP BY tab"):
            counts[row["tab"]] = row["n"]
        return counts

    def get_post(self, post_id: str) -> StoredPost | None:
        r = self._conn.execute(
            """
            SELECT p.*, i.post_id IS NOT NULL AS interacted
            FROM posts p LEFT JOIN interactions i ON i.post_id = p.post_id
            WHERE p.post_id = ?
            """,
            (post_id,),
        ).fetchone()
        if r is None:
            return None
        return StoredPost(
            post_id=r["post_id"],
            text=r["text"],
            raw_text=r["raw_text"],
            created_at=r["created_at"],
            author_handle=r["author_handle"],
            author_location_text=r["author_location_text"],
            author_bio=r["author_bio"],
            url=r["url"],
            tab=r["tab"],
            score=r["score"],
            matched_region=r["matched_region"],
            error=r["error"],
            interacted=bool(r["interacted"]),
        )

    # -- interactions ----------------------------------------------------------

    def insert_interaction(
        self, post_id: str, region: str, sent_at: datetime, template_id: str, operator: str
    ) -> None:
        with self._lock:
            exists = self._conn.execute(
                "SELECT 1 FROM posts WHERE post_id = ?", (post_id,)
            ).fetchone()
            if exists is None:
                raise NotFoundError(f"post {post_id!r} not found")
            try:
                self._conn.execute(
                    "INSERT INTO interactions (post_id, region, sent_at, template_id, operator)"
                    " VALUES (?, ?, ?, ?, ?)",
                    (post_id, region, sent_at.isoformat(), template_id, operator),
                )
                self._conn.commit()
            except sqlite3.IntegrityError as exc:
                self._conn.rollback()
                raise ConflictError(f"post {post_id!r} already has an interaction") from exc

    def daily_interaction_counts(self) -> list[tuple[str, str, int]]:
        """(date, region, count) rows — the raw material for the impact panel."""
        rows = self._conn.execute(
            "SELECT DATE(sent_at) AS day, region, COUNT(*) AS n "
            "FROM interactions GROUP BY day, region ORDER BY day, region"
        ).fetchall()
        return [(r["day"], r["region"], r["n"]) for r in rows]

    # -- config audit -----------------------------------------------------------

    def audit_config_change(self, key: str, old_value: str, new_value: str) -> None:
        with self._lock:
            self._conn.execute(
                "INSERT INTO config_audit (changed_at, key, old_value, new_value)"
                " VALUES (?, ?, ?, ?)",
                (datetime.now(timezone.utc).isoformat(), key, old_value, new_value),
            )
            self._conn.commit()
