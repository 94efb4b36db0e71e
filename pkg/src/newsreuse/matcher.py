"""Same-date blocked sentence matching, temporal filtering, and attribution.

Matching is exhaustive within a calendar-date block and absent across
blocks. Pairs above the similarity threshold are flagged as temporal false
positives when the target article predates the receipt of the source
article, and each surviving target sentence is attributed to its
earliest-received source article.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import date, datetime
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import Corpus, Role
from .embedding import Provider, VectorStore, build_store
from .errors import DuplicateId, MissingVector, RoleMismatch
from .linguistic import (
    AnnotatedSentence,
    Annotator,
    HeuristicTagger,
    Sentence,
    annotate_corpus,
    filter_target_sentences,
    segment_corpus,
)

DEFAULT_THRESHOLD = 0.60


class MatchStatus(Enum):
    TRUE = "true"
    FALSE_POSITIVE = "false_positive"
    EARLIEST = "earliest"


@dataclass(frozen=True)
class MatchRecord:
    target_key: str
    source_key: str
    similarity: float
    target_created_at: datetime
    source_received_at: datetime
    status: MatchStatus = MatchStatus.TRUE


@dataclass(frozen=True)
class DateBlock:
    date: date
    target_keys: tuple[str, ...]
    source_keys: tuple[str, ...]


@dataclass(frozen=True)
class StageCounts:
    target_articles: int
    source_articles: int
    target_sentences: int
    source_sentences: int
    pairs: int


@dataclass
class MatchSet:
    threshold: float
    records: list[MatchRecord]
    accounting: dict[str, StageCounts] = field(default_factory=dict)
    comparisons: int = 0


def article_of(key: str) -> str:
    return key.rsplit("#", 1)[0]


def _stage_counts(records: Iterable[MatchRecord]) -> StageCounts:
    records = list(records)
    return StageCounts(
        target_articles=len({article_of(r.target_key) for r in records}),
        source_articles=len({article_of(r.source_key) for r in records}),
        target_sentences=len({r.target_key for r in records}),
        source_sentences=len({r.source_key for r in records}),
        pairs=len(records),
    )


def build_date_blocks(
    target: Sequence[AnnotatedSentence],
    source: Sequence[Sentence],
    target_corpus: Corpus,
    source_corpus: Corpus,
) -> list[DateBlock]:
    """Group sentence keys by UTC calendar date.

    Target sentences fall on their article's created_at date, source
    sentences on the received_at date; only dates populated on both sides
    yield a block. Keys are sorted within each block for determinism.
    """
    target_times = {a.id: a.created_at for a in target_corpus.articles}
    source_times = {a.id: a.received_at for a in source_corpus.articles}

    by_date_target: dict[date, list[str]] = {}
    for ann in target:
        sent = ann.sentence
        created = target_times[sent.article_id]
        by_date_target.setdefault(created.date(), []).append(sent.key)
    by_date_source: dict[date, list[str]] = {}
    for sent in source:
        received = source_times[sent.article_id]
        by_date_source.setdefault(received.date(), []).append(sent.key)

    blocks = []
    for day in sorted(set(by_date_target) & set(by_date_source)):
        blocks.append(
            DateBlock(
                date=day,
                target_keys=tuple(sorted(by_date_target[day])),
                source_keys=tuple(sorted(by_date_source[day])),
            )
        )
    return blocks


def match_block(
    block: DateBlock,
    store: VectorStore,
    threshold: float,
    *,
    target_times: Mapping[str, datetime],
    source_times: Mapping[str, datetime],
) -> list[MatchRecord]:
    """Exhaustively compare all target x source pairs within one block.

    Emits every pair with cosine similarity strictly above the threshold.
    The timestamp maps are article-level lookups used to populate the
    records for the later temporal stages.
    """
    for key in (*block.target_keys, *block.source_keys):
        if key not in store:
            raise MissingVector(key)
    if not block.target_keys or not block.source_keys:
        return []

    tmat = np.stack([store.entries[k] for k in block.target_keys]).astype(np.float64)
    smat = np.stack([store.entries[k] for k in block.source_keys]).astype(np.float64)
    sims = np.clip(tmat @ smat.T, -1.0, 1.0)

    records = []
    for ti, si in zip(*np.nonzero(sims > threshold)):
        tkey = block.target_keys[ti]
        skey = block.source_keys[si]
        records.append(
            MatchRecord(
                target_key=tkey,
                source_key=skey,
                similarity=float(sims[ti, si]),
                target_created_at=target_times[article_of(tkey)],
                source_received_at=source_times[article_of(skey)],
            )
        )
    return records


def flag_false_positives(records: Iterable[MatchRecord]) -> list[MatchRecord]:
    """Mark pairs where the target article predates the source's receipt.

    The comparison is strict: equal timestamps keep the TRUE status.
    """
    out = []
    for rec in records:
        if rec.target_created_at < rec.source_received_at:
            out.append(replace(rec, status=MatchStatus.FALSE_POSITIVE))
        else:
            out.append(replace(rec, status=MatchStatus.TRUE))
    return out


def select_earliest_source(records: Iterable[MatchRecord]) -> list[MatchRecord]:
    """Keep, per target sentence, only records of the earliest source article.

    Ties on receipt time break to the lexicographically smallest source
    article id. All records pointing at the chosen article survive, so one
    target sentence may retain several sentences of that article.
    """
    records = list(records)
    if any(r.status is MatchStatus.FALSE_POSITIVE for r in records):
        raise ValueError("false positives must be removed before attribution")

    groups: dict[str, list[MatchRecord]] = {}
    for rec in records:
        groups.setdefault(rec.target_key, []).append(rec)

    kept: list[MatchRecord] = []
    for target_key in groups:
        group = groups[target_key]
        chosen = min(
            {(article_of(r.source_key)): r.source_received_at for r in group}.items(),
            key=lambda item: (item[1], item[0]),
        )[0]
        for rec in group:
            if article_of(rec.source_key) == chosen:
                kept.append(replace(rec, status=MatchStatus.EARLIEST))
    kept.sort(key=lambda r: (r.target_key, r.source_key))
    return kept


def _canonical_sort(records: list[MatchRecord]) -> list[MatchRecord]:
    return sorted(records, key=lambda r: (r.target_key, r.source_key))


def match_pipeline(
    target: Corpus,
    source: Corpus,
    provider: Provider,
    threshold: float = DEFAULT_THRESHOLD,
    *,
    annotator: Annotator | None = None,
    parallelism: int = 1,
    filter_sources: bool = False,
) -> MatchSet:
    """Run segmentation, eligibility, embedding, blocking, matching,
    temporal flagging, and earliest-source attribution end to end.

    The returned record list carries final statuses: attributed records are
    EARLIEST, unattributed true matches stay TRUE, and temporal false
    positives are FALSE_POSITIVE, so every accounting row can be recomputed
    from the records alone.
    """
    if target.role is not Role.TARGET or source.role is not Role.SOURCE:
        raise RoleMismatch("match_pipeline expects (target, source) corpora in that order")
    # ids are only unique per corpus; a cross-corpus collision would merge
    # two different sentences under one vector-store key
    overlap = {a.id for a in target.articles} & {a.id for a in source.articles}
    if overlap:
        raise DuplicateId(f"{sorted(overlap)[0]} (present in both corpora)")
    annotator = annotator or HeuristicTagger()

    eligible = filter_target_sentences(target, annotator)
    if filter_sources:
        source_sentences = [a.sentence for a in annotate_corpus(source, annotator) if a.eligible]
    else:
        source_sentences = [s for sents in segment_corpus(source).values() for s in sents]

    keyed = [(a.sentence.key, a.sentence.text) for a in eligible]
    keyed += [(s.key, s.text) for s in source_sentences]
    store = build_store(keyed, provider)

    blocks = build_date_blocks(eligible, source_sentences, target, source)
    target_times = {a.id: a.created_at for a in target.articles}
    source_times = {a.id: a.received_at for a in source.articles}

    def run(block: DateBlock) -> list[MatchRecord]:
        return match_block(
            block, store, threshold, target_times=target_times, source_times=source_times
        )

    if parallelism > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            chunks = list(pool.map(run, blocks))
    else:
        chunks = [run(b) for b in blocks]
    raw = _canonical_sort([rec for chunk in chunks for rec in chunk])

    flagged = flag_false_positives(raw)
    true_records = [r for r in flagged if r.status is MatchStatus.TRUE]
    false_positives = [r for r in flagged if r.status is MatchStatus.FALSE_POSITIVE]
    earliest = select_earliest_source(true_records)

    earliest_keys = {(r.target_key, r.source_key) for r in earliest}
    final = _canonical_sort(
        earliest
        + [r for r in true_records if (r.target_key, r.source_key) not in earliest_keys]
        + false_positives
    )

    accounting = {
        "raw": _stage_counts(raw),
        "true_matches": _stage_counts(true_records),
        "earliest_matches": _stage_counts(earliest),
        "false_positives": _stage_counts(false_positives),
    }
    comparisons = sum(len(b.target_keys) * len(b.source_keys) for b in blocks)
    return MatchSet(threshold=threshold, records=final, accounting=accounting, comparisons=comparisons)


def recompute_accounting(match_set: MatchSet) -> dict[str, StageCounts]:
    """Rebuild the accounting rows from the record statuses."""
    true_like = [r for r in match_set.records if r.status in (MatchStatus.TRUE, MatchStatus.EARLIEST)]
    return {
        "raw": _stage_counts(match_set.records),
        "true_matches": _stage_counts(true_like),
        "earliest_matches": _stage_counts(
            r for r in match_set.records if r.status is MatchStatus.EARLIEST
        ),
        "false_positives": _stage_counts(
            r for r in match_set.records if r.status is MatchStatus.FALSE_POSITIVE
        ),
    }


def attributed_records(match_set: MatchSet) -> list[MatchRecord]:
    return [r for r in match_set.records if r.status is MatchStatus.EARLIEST]


# ---------------------------------------------------------------------------
# Serialization (JSONL of records plus a summary JSON)

def record_to_json(rec: MatchRecord) -> dict:
    return {
        "target_key": rec.target_key,
        "source_key": rec.source_key,
        "similarity": rec.similarity,
        "target_created_at": rec.target_created_at.isoformat(),
        "source_received_at": rec.source_received_at.isoformat(),
        "status": rec.status.value,
    }


def record_from_json(row: dict) -> MatchRecord:
    return MatchRecord(
        target_key=row["target_key"],
        source_key=row["source_key"],
        similarity=float(row["similarity"]),
        target_created_at=datetime.fromisoformat(row["target_created_at"]),
        source_received_at=datetime.fromisoformat(row["source_received_at"]),
        status=MatchStatus(row["status"]),
    )


def write_match_jsonl(match_set: MatchSet, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for rec in match_set.records:
            fh.write(json.dumps(record_to_json(rec), sort_keys=True))
            fh.write("\n")


def read_match_jsonl(path: str | Path, threshold: float = DEFAULT_THRESHOLD) -> MatchSet:
    records = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(record_from_json(json.loads(line)))
    match_set = MatchSet(threshold=threshold, records=records)
    match_set.accounting = recompute_accounting(match_set)
    return match_set


def write_summary_json(match_set: MatchSet, path: str | Path) -> None:
    payload = {
        "threshold": match_set.threshold,
        "comparisons": match_set.comparisons,
        "accounting": {
            stage: vars(counts) for stage, counts in sorted(match_set.accounting.items())
        },
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
