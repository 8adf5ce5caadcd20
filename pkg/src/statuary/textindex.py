"""Inverted text index with tf-idf ranking.

Tokenization is shared with the path parser so that path-derived text
and metadata values index identically. Multi-token queries use AND
semantics; score(d) = sum over query tokens of tf(t, d) * ln(1 + N/df(t)).
"""
from __future__ import annotations

import math
from bisect import insort
from collections import Counter
from dataclasses import dataclass, field

from .errors import FieldError
from .metadata import tokenize_path

ALL_FIELDS = "_all"


def tokenize_text(text: str) -> list[str]:
    """Tokenize free text exactly like a path (slashes are separators too)."""
    if not text:
        return []
    return tokenize_path(text).texts()


@dataclass
class QueryResult:
    entity_id: str
    score: float
    rank: int
    facets: list[tuple[str, str]] = field(default_factory=list)


class InvertedIndex:
    """Per-field postings: field -> token -> sorted [(doc_id, tf), ...]."""

    def __init__(self):
        self.postings: dict[str, dict[str, list[tuple[str, int]]]] = {ALL_FIELDS: {}}
        self.doc_count = 0
        self.doc_ids: set[str] = set()

    def fields(self) -> list[str]:
        return sorted(f for f in self.postings if f != ALL_FIELDS)

    def df(self, token: str, field_name: str = ALL_FIELDS) -> int:
        return len(self.postings.get(field_name, {}).get(token, []))

    def _add_tokens(self, field_name: str, doc_id: str, tokens: list[str]) -> None:
        sub = self.postings.setdefault(field_name, {})
        for token, tf in sorted(Counter(tokens).items()):
            insort(sub.setdefault(token, []), (doc_id, tf))

    def add_document(self, doc_id: str, fields: dict[str, str]) -> None:
        if doc_id in self.doc_ids:
            raise ValueError(f"duplicate document id {doc_id}")
        self.doc_ids.add(doc_id)
        self.doc_count += 1
        all_tokens: list[str] = []
        for field_name, text in fields.items():
            tokens = tokenize_text(text)
            if tokens:
                self._add_tokens(field_name, doc_id, tokens)
            all_tokens.extend(tokens)
        if all_tokens:
            self._add_tokens(ALL_FIELDS, doc_id, all_tokens)


def build_text_index(docs: dict[str, dict[str, str]]) -> InvertedIndex:
    """Index a corpus of documents given as {doc_id: {field: text}}."""
    index = InvertedIndex()
    for doc_id in sorted(docs):
        index.add_document(doc_id, docs[doc_id])
    return index


def text_search(index: InvertedIndex, query: str, k: int,
                field_name: str | None = None) -> list[QueryResult]:
    """Conjunctive tf-idf search over one field (or all text)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    fname = field_name if field_name is not None else ALL_FIELDS
    if fname not in index.postings:
        raise FieldError(f"unknown field {field_name!r}")
    tokens = tokenize_text(query)
    if not tokens:
        return []
    sub = index.postings[fname]
    scores: dict[str, float] | None = None
    for token in set(tokens):
        plist = sub.get(token, [])
        if not plist:
            return []
        idf = math.log(1.0 + index.doc_count / len(plist))
        contrib = {doc_id: tf * idf for doc_id, tf in plist}
        if scores is None:
            scores = contrib
        else:
            scores = {d: s + contrib[d] for d, s in scores.items() if d in contrib}
        if not scores:
            return []
    assert scores is not None
    ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))[:k]
    return [QueryResult(entity_id=d, score=s, rank=r)
            for r, (d, s) in enumerate(ranked, start=1)]


def candidate_docs(index: InvertedIndex, query: str,
                   field_name: str | None = None) -> set[str]:
    """Document ids matching every query token (AND), unranked."""
    fname = field_name if field_name is not None else ALL_FIELDS
    if fname not in index.postings:
        raise FieldError(f"unknown field {field_name!r}")
    tokens = tokenize_text(query)
    if not tokens:
        return set(index.doc_ids)
    sub = index.postings[fname]
    result: set[str] | None = None
    for token in set(tokens):
        docs = {doc_id for doc_id, _ in sub.get(token, [])}
        result = docs if result is None else result & docs
        if not result:
            return set()
    return result or set()
