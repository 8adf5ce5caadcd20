"""Path-based metadata mining against a gazetteer.

Folder names and filenames carry the only contextual information in the
archive; we tokenize paths and look tokens (and adjacent token pairs) up
in a gazetteer mapping surface terms to canonical metadata values.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .errors import GazetteerError
from .model import METADATA_FIELDS, MetadataRecord, StatueRecord

# A token is a maximal run of ASCII letters/digits, or a maximal run of
# CJK characters (kept whole, not split per character).
_CJK = (
    "㐀-䶿"   # CJK ext A
    "一-鿿"   # CJK unified
    "豈-﫿"   # CJK compat
    "぀-ゟ"   # hiragana
    "゠-ヿ"   # katakana
)
_TOKEN_RE = re.compile(rf"[a-z0-9]+|[{_CJK}]+")


@dataclass
class PathToken:
    text: str
    depth: int      # 0-based folder depth; filename is the deepest component
    start: int      # character offsets into the full path string
    end: int


@dataclass
class PathTokenization:
    path: str
    tokens: list[PathToken] = field(default_factory=list)

    def texts(self) -> list[str]:
        return [t.text for t in self.tokens]


def tokenize_path(path: str) -> PathTokenization:
    """Split a relative path into lowercased alphanumeric tokens.

    Separators are path slashes plus ``_ - . space``; any non-alphanumeric
    character acts as a separator. CJK runs stay whole.
    """
    if not path:
        raise ValueError("path must be non-empty")
    lowered = path.lower()
    result = PathTokenization(path=path)
    pos = 0
    for depth, component in enumerate(lowered.split("/")):
        for m in _TOKEN_RE.finditer(component):
            result.tokens.append(
                PathToken(text=m.group(0), depth=depth, start=pos + m.start(), end=pos + m.end())
            )
        pos += len(component) + 1  # account for the '/'
    return result


class Gazetteer:
    """Surface term -> (field, canonical value) lookup table.

    Surface terms are lowercase; multi-word terms use single spaces.
    No surface term may map to two different fields.
    """

    def __init__(self, entries: dict[str, tuple[str, str]]):
        for term, (fname, _) in entries.items():
            if fname not in METADATA_FIELDS:
                raise GazetteerError(f"unknown field {fname!r} for term {term!r}")
            if term != term.lower():
                raise GazetteerError(f"surface term must be lowercase: {term!r}")
        self.entries = dict(entries)
        self._by_field: dict[str, set[str]] = {f: set() for f in METADATA_FIELDS}
        for fname, value in self.entries.values():
            self._by_field[fname].add(value)

    def lookup(self, term: str) -> tuple[str, str] | None:
        return self.entries.get(term)

    def canonical_values(self, field_name: str) -> set[str]:
        return self._by_field[field_name]

    def is_canonical(self, field_name: str, value: str) -> bool:
        return value in self._by_field.get(field_name, set())

    def suggest(self, field_name: str, prefix: str, limit: int = 5) -> list[str]:
        """Canonical values of a field sharing a prefix with ``prefix``."""
        p = prefix.lower()
        hits = sorted(v for v in self._by_field.get(field_name, set())
                      if v.lower().startswith(p) or p.startswith(v.lower()))
        return hits[:limit]

    @classmethod
    def from_file(cls, path: str | Path) -> "Gazetteer":
        """Load a tab-separated gazetteer: surface \\t field \\t canonical."""
        entries: dict[str, tuple[str, str]] = {}
        text = Path(path).read_text(encoding="utf-8")
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise GazetteerError(f"{path}:{lineno}: expected 3 tab-separated columns")
            term, fname, value = (p.strip() for p in parts)
            term = term.lower()
            if term in entries and entries[term][0] != fname:
                raise GazetteerError(
                    f"{path}:{lineno}: surface term {term!r} maps to two fields"
                )
            entries[term] = (fname, value)
        return cls(entries)


def extract_metadata(path: str, gazetteer: Gazetteer) -> MetadataRecord:
    """Recover a metadata record from one relative path.

    Tokens are matched as unigrams and as adjacent pairs joined by a
    space. For each field the last match along the path wins, so deeper
    folders (and finally the filename) override shallower ones.
    """
    record = MetadataRecord()
    tokens = tokenize_path(path).texts()
    for i, tok in enumerate(tokens):
        if i > 0:
            hit = gazetteer.lookup(f"{tokens[i - 1]} {tok}")
            if hit is not None:
                record.set(hit[0], hit[1])
        hit = gazetteer.lookup(tok)
        if hit is not None:
            record.set(hit[0], hit[1])
    return record


def aggregate_statue_metadata(
    records: list[MetadataRecord],
) -> tuple[MetadataRecord, list[str]]:
    """Fold per-image records into one statue record.

    Per field, the strict-majority value among populated occurrences wins;
    a field with populated values but no strict majority stays unset and
    is reported as a conflict.
    """
    if not records:
        raise ValueError("need at least one record")
    out = MetadataRecord()
    conflicts: list[str] = []
    for fname in METADATA_FIELDS:
        values = [r.get(fname) for r in records if r.get(fname) is not None]
        if not values:
            continue
        counts = Counter(values)
        value, top = counts.most_common(1)[0]
        if top * 2 > len(values):
            out.set(fname, value)
        else:
            conflicts.append(f"{fname}: no majority among {sorted(counts)}")
    return out, conflicts


def coverage_report(statues: list[StatueRecord] | dict[str, StatueRecord]) -> dict[str, int]:
    """Per-field count of statues with that field populated."""
    if isinstance(statues, dict):
        statues = list(statues.values())
    report = {f: 0 for f in METADATA_FIELDS}
    for statue in statues:
        for fname in statue.metadata.populated():
            report[fname] += 1
    return report
