"""Region matching against free-text profile locations.

Profile locations are informal ("zona norte do rio", "RJ - Brasil"), so
matching is substring-based after accent folding and lowercasing. The alias
table is ordered: the first pattern that hits wins.
"""

from __future__ import annotations

from pathlib import Path

from ..errors import CorpusError
from ..textprep import fold_accents

AliasEntry = tuple[str, str]  # (pattern, region id)


def match_region(location_text: str | None, aliases: list[AliasEntry]) -> str | None:
    """First alias whose folded pattern is a substring of the folded text."""
    if not location_text or not location_text.strip():
        return None
    folded = fold_accents(location_text)
    for pattern, region in aliases:
        if pattern and fold_accents(pattern) in folded:
            return region
    return None


def load_alias_table(path: str | Path) -> tuple[AliasEntry, ...]:
    """Read a two-column TSV alias table: pattern<TAB>region_id."""
    path = Path(path)
    try:
        lines = path.read_text("utf-8").splitlines()
    except OSError as exc:
        raise CorpusError(f"cannot read alias table {path}: {exc}") from exc
    entries: list[AliasEntry] = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            raise CorpusError(f"{path}:{lineno}: expected pattern<TAB>region")
        entries.append((parts[0].strip(), parts[1].strip()))
    return tuple(entries)
