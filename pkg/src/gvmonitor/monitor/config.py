"""Monitor configuration: file loading plus environment overrides.

Every key in the config file can be overridden by an environment variable
with the ``GVMONITOR_`` prefix (e.g. ``GVMONITOR_POLL_INTERVAL=60``).
"""

from __future__ import annotations

import json
import os
from collections.abc import Mapping
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..errors import GvmonitorError
from .geo import AliasEntry, load_alias_table
from .query import parse_keyword_query

ENV_PREFIX = "GVMONITOR_"

DEFAULT_QUERY = "(bala voando) OR tiro OR tiroteio OR baleado"
DEFAULT_TEMPLATE = (
    "Olá! Vimos seu relato. Pode nos contar mais detalhes sobre o ocorrido "
    "em {region}? Sua resposta ajuda a registrar o evento."
)


@dataclass(frozen=True)
class SourceDescriptor:
    """Where posts come from: a replay file or an HTTP polling endpoint."""

    kind: str  # "replay" | "http"
    path: str | None = None
    url: str | None = None
    token: str | None = None

    def __post_init__(self):
        if self.kind not in ("replay", "http"):
            raise ValueError(f"unknown source kind {self.kind!r}")
        if self.kind == "replay" and not self.path:
            raise ValueError("replay source needs a path")
        if self.kind == "http" and not self.url:
            raise ValueError("http source needs a url")


@dataclass(frozen=True)
class MonitorConfig:
    region: str
    keyword_query: str = DEFAULT_QUERY
    poll_interval: float = 300.0
    alias_table: tuple[AliasEntry, ...] = ()
    threshold: float = 0.5
    source: SourceDescriptor = field(
        default_factory=lambda: SourceDescriptor(kind="replay", path="posts.jsonl")
    )
    interaction_template: str = DEFAULT_TEMPLATE
    template_id: str = "standard-followup"
    parsed_query: object = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        if self.poll_interval < 30:
            raise ValueError("poll_interval must be >= 30 seconds")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must be in (0, 1)")
        object.__setattr__(self, "parsed_query", parse_keyword_query(self.keyword_query))
        object.__setattr__(self, "alias_table", tuple(self.alias_table))

    def with_query(self, query: str) -> "MonitorConfig":
        return replace(self, keyword_query=query)


def _env_get(env: Mapping[str, str], key: str) -> str | None:
    return env.get(ENV_PREFIX + key.upper())


def load_config(
    path: str | Path | None = None, env: Mapping[str, str] | None = None
) -> MonitorConfig:
    """Build a MonitorConfig from a JSON file with env-var overrides on top."""
    env = os.environ if env is None else env
    raw: dict = {}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text("utf-8"))
        except OSError as exc:
            raise GvmonitorError(f"cannot read config file {path}: {exc}") from exc
        except ValueError as exc:
            raise GvmonitorError(f"config file {path} is not valid JSON: {exc}") from exc

    def setting(key: str, default=None):
        value = _env_get(env, key)
        return value if value is not None else raw.get(key, default)

    alias_path = setting("alias_table")
    aliases: tuple[AliasEntry, ...] = ()
    if alias_path:
        aliases = load_alias_table(alias_path)
    elif isinstance(raw.get("aliases"), list):
        aliases = tuple((str(p), str(r)) for p, r in raw["aliases"])

    region = setting("region")
    if not region:
        raise GvmonitorError("config needs a region (file key 'region' or GVMONITOR_REGION)")

    # The source may be a nested file object or flat keys; env vars win.
    nested = raw.get("source") if isinstance(raw.get("source"), dict) else {}
    source = SourceDescriptor(
        kind=str(_env_get(env, "source_kind") or nested.get("kind") or raw.get("source_kind") or "replay"),
        path=_env_get(env, "source_path") or nested.get("path") or raw.get("source_path"),
        url=_env_get(env, "source_url") or nested.get("url") or raw.get("source_url"),
        token=_env_get(env, "source_token") or nested.get("token") or raw.get("source_token"),
    )
    return MonitorConfig(
        region=str(region),
        keyword_query=str(setting("keyword_query", DEFAULT_QUERY)),
        poll_interval=float(setting("poll_interval", 300.0)),
        alias_table=tuple(aliases),
        threshold=float(setting("threshold", 0.5)),
        source=source,
        interaction_template=str(setting("interaction_template", DEFAULT_TEMPLATE)),
        template_id=str(setting("template_id", "standard-followup")),
    )
