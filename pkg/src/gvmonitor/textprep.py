"""Deterministic text normalization and exclusion rules.

Every message goes through :func:`normalize` before training or inference:
URLs and @-mentions become placeholder tokens, emojis become ``:short_name:``
text per the bundled table, and whitespace is collapsed. The functions here
are pure and safe to call from any number of workers.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from datetime import datetime
from importlib import resources

URL_TOKEN = "<URL>"
USER_TOKEN = "<USER>"

# Scheme-prefixed links plus the bare shortener form; anything else is left alone.
_URL_RE = re.compile(r"(?:https?://\S+|\bt\.co/\S+)")
_MENTION_RE = re.compile(r"@\w+")
_WS_RE = re.compile(r"\s+")

# Codepoint ranges treated as emoji when absent from the bundled table.
_EMOJI_RANGES = (
    (0x1F000, 0x1FAFF),
    (0x2600, 0x27BF),
    (0x2B00, 0x2BFF),
    (0x2300, 0x23FF),
    (0x2190, 0x21FF),
    (0x2049, 0x2049),
    (0x203C, 0x203C),
    (0x24C2, 0x24C2),
    (0x2934, 0x2935),
    (0x3030, 0x3030),
    (0x303D, 0x303D),
    (0x3297, 0x3299),
)
# Joiners/selectors/tone marks that modify a preceding emoji.
_EMOJI_MODIFIERS = frozenset(
    [0x200D, 0xFE0F, 0xFE0E, 0x20E3] + list(range(0x1F3FB, 0x1F400))
)


@dataclass(frozen=True)
class RawPost:
    """One ingested social post, as read from a corpus file."""

    id: str
    text: str
    created_at: datetime
    author_handle: str = ""
    author_location_text: str | None = None
    author_bio: str | None = None
    has_geo_tag: bool = False
    language_tag: str | None = None
    is_reply: bool = False

    def __post_init__(self):
        if not self.id:
            raise ValueError("post id must be non-empty")
        if not self.text.strip():
            raise ValueError(f"post {self.id}: text must be non-empty")


@dataclass(frozen=True)
class NormalizedMessage:
    """Cleaned text form of a post, plus counters used downstream."""

    post_id: str
    text: str
    char_count: int
    emoji_count: int
    contained_url: bool
    contained_mention: bool


@dataclass(frozen=True)
class ExclusionRuleSet:
    """Which posts to drop before they ever reach a dataset."""

    partner_handles: frozenset[str] = frozenset()
    drop_replies: bool = True
    drop_duplicates: bool = True

    def __post_init__(self):
        lowered = frozenset(h.lower().lstrip("@") for h in self.partner_handles)
        object.__setattr__(self, "partner_handles", lowered)


def _load_emoji_table() -> dict[tuple[int, ...], str]:
    table = {}
    data = resources.files("gvmonitor.data").joinpath("emoji_table.tsv").read_text("utf-8")
    for line in data.splitlines():
        if not line.strip():
            continue
        hexes, name = line.split("\t")
        table[tuple(int(h, 16) for h in hexes.split())] = name
    return table


_EMOJI_TABLE = _load_emoji_table()
_MAX_SEQ_LEN = max(len(k) for k in _EMOJI_TABLE)

# Lowest codepoint that can matter to emoji handling (the ZWJ modifier);
# everything below it — all ASCII and Latin text — is rejected in one compare.
_EMOJI_MIN_CP = min(min(_EMOJI_MODIFIERS), min(lo for lo, _ in _EMOJI_RANGES))
_EMOJI_MIN_CHAR = chr(_EMOJI_MIN_CP)


def _is_emoji_char(cp: int) -> bool:
    if cp < _EMOJI_MIN_CP:
        return False
    if cp in _EMOJI_MODIFIERS:
        return True
    return any(lo <= cp <= hi for lo, hi in _EMOJI_RANGES)


def _replace_emoji(text: str) -> tuple[str, int]:
    """Replace table emoji with ``:name:`` tokens, drop unknown emoji.

    Returns the new text and the number of emoji handled. Consecutive
    replacements get a single separating space; everything else is copied
    verbatim.
    """
    if not text or max(text) < _EMOJI_MIN_CHAR:
        return text, 0
    out: list[str] = []
    count = 0
    i = 0
    n = len(text)
    prev_was_token = False
    while i < n:
        cp = ord(text[i])
        if not _is_emoji_char(cp):
            out.append(text[i])
            prev_was_token = False
            i += 1
            continue
        # longest table match first
        matched = False
        for length in range(min(_MAX_SEQ_LEN, n - i), 0, -1):
            seq = tuple(ord(c) for c in text[i : i + length])
            name = _EMOJI_TABLE.get(seq)
            if name is not None:
                if prev_was_token:
                    out.append(" ")
                out.append(f":{name}:")
                prev_was_token = True
                count += 1
                i += length
                matched = True
                break
        if matched:
            # swallow trailing modifiers (skin tone, VS16) of the matched emoji
            while i < n and ord(text[i]) in _EMOJI_MODIFIERS:
                i += 1
            continue
        # unknown emoji: drop it, counting base characters only
        if cp not in _EMOJI_MODIFIERS:
            count += 1
        i += 1
    return "".join(out), count


def emoji_to_text(text: str) -> str:
    """Replace every emoji sequence in the bundled table with ``:short_name:``.

    Unknown emoji are removed; non-emoji text is returned unchanged.
    """
    return _replace_emoji(text)[0]


def normalize(raw: RawPost) -> NormalizedMessage:
    """Normalize a post's text: placeholder tokens, emoji text, tidy spaces."""
    text = raw.text
    text, n_urls = _URL_RE.subn(URL_TOKEN, text)
    text, n_mentions = _MENTION_RE.subn(USER_TOKEN, text)
    text, n_emoji = _replace_emoji(text)
    text = _WS_RE.sub(" ", text).strip()
    return NormalizedMessage(
        post_id=raw.id,
        text=text,
        char_count=len(text),
        emoji_count=n_emoji,
        contained_url=n_urls > 0,
        contained_mention=n_mentions > 0,
    )


def normalize_text(text: str) -> str:
    """Normalization of a bare string (same rules as :func:`normalize`)."""
    text = _URL_RE.sub(URL_TOKEN, text)
    text = _MENTION_RE.sub(USER_TOKEN, text)
    text = _replace_emoji(text)[0]
    return _WS_RE.sub(" ", text).strip()


def should_exclude(
    raw: RawPost, rules: ExclusionRuleSet, seen_texts: set[str] | frozenset[str] = frozenset()
) -> bool:
    """True when exclusion rules drop this post.

    ``seen_texts`` is the set of previously observed *normalized* texts, so
    posts differing only in URLs, mentions or whitespace count as duplicates.
    """
    lowered = raw.text.lower()
    for handle in rules.partner_handles:
        if f"@{handle}" in lowered:
            return True
    if rules.drop_replies and raw.is_reply:
        return True
    if rules.drop_duplicates and normalize_text(raw.text) in seen_texts:
        return True
    return False


def fold_accents(text: str) -> str:
    """Lowercase and strip combining marks (for accent-insensitive matching)."""
    decomposed = unicodedata.normalize("NFKD", text)
    return "".join(c for c in decomposed if not unicodedata.combining(c)).lower()
