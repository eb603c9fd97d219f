"""Tweet normalization, tokenization, vectorization and dedup stages 1 and 2."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .attributes import AttributeSchema, FeatureVector, query

_MENTION = re.compile(r"@\w")
_URL_PREFIXES = ("http://", "https://", "www.")
_KEEP = "_-'"


def _is_edge_ok(c: str) -> bool:
    return c.isalnum() or c in _KEEP


def _strip_edges(tok: str, keep_leading_at: bool = False) -> str:
    start, end = 0, len(tok)
    while start < end and not (_is_edge_ok(tok[start]) or (keep_leading_at and tok[start] == "@")):
        start += 1
    while end > start and not _is_edge_ok(tok[end - 1]):
        end -= 1
    return tok[start:end]


def _normalize_token(tok: str) -> str:
    tok = tok.lower()
    if tok.startswith(_URL_PREFIXES):
        return "url"
    core = _strip_edges(tok, keep_leading_at=True)
    if core.startswith(_URL_PREFIXES):
        return "url"
    if _MENTION.match(core):
        return "user"
    core = _strip_edges(core)
    if core.startswith(_URL_PREFIXES):
        return "url"
    return core


def normalize_tweet(raw: str) -> str:
    """Lowercase, replace @mentions by ``user`` and links by ``url``, trim token punctuation.

    >>> normalize_tweet("RT @a @b Hi!")
    'rt user user hi'
    """
    out = []
    for tok in raw.split():
        norm = _normalize_token(tok)
        if norm:
            out.append(norm)
    return " ".join(out)


def tokenize(normalized: str) -> list[str]:
    return normalized.split()


@dataclass(frozen=True)
class TweetRecord:
    raw: str
    normalized: str
    tokens: tuple[str, ...]
    class_label: str

    @classmethod
    def from_raw(cls, raw: str, class_label: str) -> "TweetRecord":
        if not class_label:
            raise ValueError("class_label must be non-empty")
        normalized = normalize_tweet(raw)
        return cls(raw, normalized, tuple(tokenize(normalized)), class_label)


@dataclass
class ClassDataset:
    class_label: str
    rows: list[tuple[TweetRecord, FeatureVector | None]]
    # stage name -> (kept, dropped), in execution order
    stage_counts: dict[str, tuple[int, int]] = field(default_factory=dict)
    skipped: list = field(default_factory=list)

    @classmethod
    def from_lines(cls, class_label: str, lines, skipped=()) -> "ClassDataset":
        rows = [(TweetRecord.from_raw(line, class_label), None) for line in lines]
        ds = cls(class_label, rows, skipped=list(skipped))
        ds.stage_counts["read"] = (len(rows), len(ds.skipped))
        return ds

    @property
    def records(self) -> list[TweetRecord]:
        return [r for r, _ in self.rows]

    @property
    def vectors(self) -> list[FeatureVector]:
        return [v for _, v in self.rows]

    def _record(self, stage: str, before: int):
        self.stage_counts[stage] = (len(self.rows), before - len(self.rows))


def stage1_dedup(records):
    """Keep the first record for each distinct (class, normalized text)."""
    seen = set()
    out = []
    for rec in records:
        key = (rec.class_label, rec.normalized)
        if key not in seen:
            seen.add(key)
            out.append(rec)
    return out


def stage2_drop_unclassified(rows):
    """Drop rows whose feature vector is all zeros."""
    return [(rec, vec) for rec, vec in rows if any(vec)]


def apply_stage1(ds: ClassDataset) -> ClassDataset:
    before = len(ds.rows)
    kept = stage1_dedup(ds.records)
    out = ClassDataset(ds.class_label, [(r, None) for r in kept], dict(ds.stage_counts), ds.skipped)
    out._record("stage1", before)
    return out


def vectorize_dataset(ds: ClassDataset, schema: AttributeSchema) -> ClassDataset:
    rows = [(rec, query(rec.tokens, schema)) for rec, _ in ds.rows]
    out = ClassDataset(ds.class_label, rows, dict(ds.stage_counts), ds.skipped)
    out._record("vectorize", len(rows))
    return out


def apply_stage2(ds: ClassDataset) -> ClassDataset:
    before = len(ds.rows)
    out = ClassDataset(ds.class_label, stage2_drop_unclassified(ds.rows), dict(ds.stage_counts), ds.skipped)
    out._record("stage2", before)
    return out


def preprocess(ds: ClassDataset, schema: AttributeSchema) -> ClassDataset:
    """Stage 1, vectorization and stage 2 in pipeline order."""
    return apply_stage2(vectorize_dataset(apply_stage1(ds), schema))
