"""Client for an external classifier runtime speaking a line protocol.

The runtime (typically a fine-tuned transformer server) is a separate
process reached over child-process pipes or a local TCP socket. Each
request is one UTF-8 JSON line ``{"id": ..., "texts": [...]}`` and each
reply one line ``{"id": ..., "scores": [...]}``. Replies are correlated by
request id — a background reader thread demultiplexes them, so arrival
order does not matter and several requests may be in flight at once.
"""

from __future__ import annotations

import itertools
import json
import socket
import subprocess
import threading
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

from ..corpus import NEGATIVE, POSITIVE
from ..errors import ProtocolError, TransportError
from ..textprep import NormalizedMessage
from .models import ScoredPrediction


@dataclass(frozen=True)
class TrainingRecipe:
    """Hyperparameters the runtime was fine-tuned with (manifest metadata)."""

    learning_rate: float = 2e-5
    dropout: float = 0.05
    early_stopping: bool = True


@dataclass(frozen=True)
class ExternalRuntimeConfig:
    """How to reach the runtime and how to interpret its scores."""

    model_id: str
    command: tuple[str, ...] | None = None
    address: tuple[str, int] | None = None
    max_token_length: int = 128
    batch_size: int = 32
    timeout: float = 10.0
    max_in_flight: int = 4
    threshold: float = 0.5
    recipe: TrainingRecipe = field(default_factory=TrainingRecipe)

    def __post_init__(self):
        if (self.command is None) == (self.address is None):
            raise ValueError("exactly one of command or address must be set")
        if self.max_token_length < 8:
            raise ValueError("max_token_length must be >= 8")
        if self.timeout <= 0:
            raise ValueError("timeout must be > 0")
        if self.command is not None:
            object.__setattr__(self, "command", tuple(self.command))


class _Pending:
    __slots__ = ("event", "scores", "error")

    def __init__(self):
        self.event = threading.Event()
        self.scores = None
        self.error: Exception | None = None


class ExternalRuntimeClient:
    """Long-lived connection to one runtime process or socket endpoint."""

    def __init__(self, cfg: ExternalRuntimeConfig):
        self.cfg = cfg
        self._proc: subprocess.Popen | None = None
        self._sock: socket.socket | None = None
        self._reader_file = None
        self._writer_file = None
        self._reader_thread: threading.Thread | None = None
        self._pending: dict[str, _Pending] = {}
        self._lock = threading.Lock()
        self._write_lock = threading.Lock()
        self._in_flight = threading.Semaphore(cfg.max_in_flight)
        self._ids = itertools.count(1)
        self._closed = False

    def __enter__(self):
        self.start()
        return self

    def __exit__(self, *exc):
        self.close()

    def start(self) -> None:
        cfg = self.cfg
        try:
            if cfg.command is not None:
                self._proc = subprocess.Popen(
                    list(cfg.command),
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    text=True,
                    encoding="utf-8",
                    bufsize=1,
                )
                self._reader_file = self._proc.stdout
                self._writer_file = self._proc.stdin
            else:
                self._sock = socket.create_connection(cfg.address, timeout=cfg.timeout)
                self._sock.settimeout(None)
                self._reader_file = self._sock.makefile("r", encoding="utf-8")
                self._writer_file = self._sock.makefile("w", encoding="utf-8")
        except (OSError, ValueError) as exc:
            raise TransportError(f"cannot reach runtime: {exc}") from exc
        self._reader_thread = threading.Thread(
            target=self._read_loop, name="runtime-reader", daemon=True
        )
        self._reader_thread.start()

    def close(self) -> None:
        self._closed = True
        for f in (self._writer_file, self._reader_file):
            try:
                if f is not None:
                    f.close()
            except OSError:
                pass
        if self._sock is not None:
            try:
                self._sock.close()
            except OSError:
                pass
        if self._proc is not None:
            self._proc.terminate()
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()
        if self._reader_thread is not None and self._reader_thread.is_alive():
            self._reader_thread.join(timeout=2)

    def _read_loop(self) -> None:
        try:
            for line in self._reader_file:
                line = line.strip()
                if not line:
                    continue
                self._handle_reply(line)
        except (OSError, ValueError):
            pass
        # EOF or read failure: fail everything still waiting
        error = TransportError("runtime closed the connection")
        with self._lock:
            pending = list(self._pending.values())
            self._pending.clear()
        for entry in pending:
            entry.error = error
            entry.event.set()

    def _handle_reply(self, line: str) -> None:
        try:
            reply = json.loads(line)
            rid = str(reply["id"])
        except (ValueError, KeyError, TypeError):
            # a reply we cannot attribute to a request; drop it
            return
        with self._lock:
            entry = self._pending.pop(rid, None)
        if entry is None:
            return
        scores = reply.get("scores")
        if not isinstance(scores, list):
            entry.error = ProtocolError(f"reply {rid} has no scores list")
        else:
            entry.scores = scores
        entry.event.set()

    def _request(self, texts: list[str]) -> list[float]:
        if self._reader_thread is None or self._closed:
            raise TransportError("client is not started")
        rid = str(next(self._ids))
        entry = _Pending()
        with self._lock:
            self._pending[rid] = entry
        payload = json.dumps({"id": rid, "texts": texts}, ensure_ascii=False)
        try:
            with self._write_lock:
                self._writer_file.write(payload + "\n")
                self._writer_file.flush()
        except (OSError, ValueError) as exc:
            with self._lock:
                self._pending.pop(rid, None)
            raise TransportError(f"cannot send request {rid}: {exc}") from exc
        if not entry.event.wait(self.cfg.timeout):
            with self._lock:
                self._pending.pop(rid, None)
            raise TransportError(
                f"request {rid} timed out after {self.cfg.timeout}s"
            )
        if entry.error is not None:
            raise entry.error
        scores = entry.scores
        if len(scores) != len(texts):
            raise ProtocolError(
                f"request {rid}: sent {len(texts)} texts, got {len(scores)} scores"
            )
        out = []
        for s in scores:
            if not isinstance(s, (int, float)) or not 0.0 <= float(s) <= 1.0:
                raise ProtocolError(f"request {rid}: score {s!r} outside [0, 1]")
            out.append(float(s))
        return out

    def score_texts(self, texts: Sequence[str]) -> list[float]:
        """Score raw texts, chunked by batch_size; order preserved."""
        texts = list(texts)
        if not texts:
            return []
        scores: list[float] = []
        for start in range(0, len(texts), self.cfg.batch_size):
            chunk = texts[start : start + self.cfg.batch_size]
            with self._in_flight:
                scores.extend(self._request(chunk))
        return scores

    def score_messages(
        self, batch: Sequence[NormalizedMessage]
    ) -> list[ScoredPrediction]:
        scores = self.score_texts([msg.text for msg in batch])
        return [
            ScoredPrediction(
                post_id=msg.post_id,
                score=s,
                label=POSITIVE if s >= self.cfg.threshold else NEGATIVE,
                model_id=self.cfg.model_id,
            )
            for msg, s in zip(batch, scores)
        ]


def external_score(
    cfg: ExternalRuntimeConfig, batch: Sequence[NormalizedMessage]
) -> list[ScoredPrediction]:
    """One-shot scoring: open a client, score the batch, close."""
    if not batch:
        return []
    with ExternalRuntimeClient(cfg) as client:
        return client.score_messages(batch)


def write_model_manifest(cfg: ExternalRuntimeConfig, path: str | Path) -> None:
    """Record model id, threshold, and training hyperparameters."""
    manifest = {
        "model_id": cfg.model_id,
        "threshold": cfg.threshold,
        "max_token_length": cfg.max_token_length,
        "learning_rate": cfg.recipe.learning_rate,
        "dropout": cfg.recipe.dropout,
        "early_stopping": cfg.recipe.early_stopping,
    }
    Path(path).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
