"""Post sources for the poll loop: file replay and generic HTTP polling.

A source exposes ``fetch(cursor) -> (posts, new_cursor)``. Cursors are
opaque strings owned by the source; passing the returned cursor back yields
only newer posts, so repeated polls never re-deliver.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

import requests

from ..corpus import parse_post_record
from ..errors import ProtocolError, TransportError
from ..textprep import RawPost
from .config import SourceDescriptor

logger = logging.getLogger(__name__)


class ReplaySource:
    """Replays a line-delimited corpus file; the cursor counts consumed lines."""

    def __init__(self, path: str | Path):
        self.path = Path(path)

    def fetch(self, cursor: str | None) -> tuple[list[RawPost], str]:
        try:
            lines = self.path.read_text("utf-8").splitlines()
        except OSError as exc:
            raise TransportError(f"cannot read replay file {self.path}: {exc}") from exc
        start = int(cursor) if cursor else 0
        posts: list[RawPost] = []
        for offset, line in enumerate(lines[start:], start=start + 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                if not isinstance(record, dict):
                    raise ValueError("record is not an object")
                posts.append(parse_post_record(record))
            except (ValueError, KeyError) as exc:
                logger.warning("%s:%d: skipping malformed line: %s", self.path, offset, exc)
        return posts, str(len(lines))


class HttpSource:
    """Polls an HTTP endpoint returning {"posts": [...], "next_cursor": ...}.

    Sends the cursor as a query parameter and a static bearer token when
    configured. Network failures are retryable transport errors; malformed
    bodies are protocol errors.
    """

    def __init__(
        self,
        url: str,
        token: str | None = None,
        timeout: float = 10.0,
        session: requests.Session | None = None,
    ):
        self.url = url
        self.token = token
        self.timeout = timeout
        self.session = session or requests.Session()

    def fetch(self, cursor: str | None) -> tuple[list[RawPost], str | None]:
        params = {"cursor": cursor} if cursor else {}
        headers = {"Authorization": f"Bearer {self.token}"} if self.token else {}
        try:
            resp = self.session.get(
                self.url, params=params, headers=headers, timeout=self.timeout
            )
        except requests.RequestException as exc:
            raise TransportError(f"poll of {self.url} failed: {exc}") from exc
        if resp.status_code >= 500:
            raise TransportError(f"poll of {self.url} returned {resp.status_code}")
        if resp.status_code >= 400:
            raise ProtocolError(f"poll of {self.url} rejected: {resp.status_code}")
        try:
            body = resp.json()
            records = body["posts"]
            if not isinstance(records, list):
                raise ValueError("posts is not a list")
        except (ValueError, KeyError) as exc:
            raise ProtocolError(f"malformed poll response from {self.url}: {exc}") from exc
        posts: list[RawPost] = []
        for i, record in enumerate(records):
            try:
                if not isinstance(record, dict):
                    raise ValueError("record is not an object")
                posts.append(parse_post_record(record))
            except (ValueError, KeyError) as exc:
                logger.warning("%s: skipping malformed post %d: %s", self.url, i, exc)
        next_cursor = body.get("next_cursor")
        return posts, str(next_cursor) if next_cursor is not None else cursor


def make_source(descriptor: SourceDescriptor):
    if descriptor.kind == "replay":
        return ReplaySource(descriptor.path)
    return HttpSource(descriptor.url, token=descriptor.token)
