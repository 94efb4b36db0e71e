"""Shared fixture helpers: synthetic corpora with planted reuse."""

from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path

import pytest

from newsreuse.corpus import Article, Corpus, Role


def utc(y: int, mo: int, d: int, h: int = 0, mi: int = 0, s: int = 0, us: int = 0) -> datetime:
    return datetime(y, mo, d, h, mi, s, us, tzinfo=timezone.utc)


# Distinct eligible sentences (>7 word tokens, at least one verb) whose
# pairwise hash-embedding similarities all stay well below the 0.6
# threshold, so planted copies are the only matches in synthetic corpora.
FILLER_SENTENCES = [
    "The prime minister said the government will raise the education budget next year.",
    "Heavy rainfall flooded several streets in the capital during the early morning hours.",
    "Investigators said the committee will publish its final report on the accident soon.",
    "The central bank announced that interest rates will remain unchanged this quarter.",
    "Local farmers reported that the harvest was delayed because of the late spring frost.",
    "The national theatre opened its new season with a play about village life.",
    "Scientists discovered a new species of beetle in the forests of the northern region.",
    "The football club signed a young defender from the second division on Friday.",
]


def target_article(
    article_id: str,
    created_at: datetime,
    body: str,
    language: str = "en",
    agency: str = "NPA",
) -> Article:
    return Article(
        id=article_id,
        role=Role.TARGET,
        agency=agency,
        language=language,
        headline="Headline",
        body=body,
        created_at=created_at,
    )


def source_article(
    article_id: str,
    received_at: datetime,
    body: str,
    language: str = "en",
    agency: str = "WIRE1",
) -> Article:
    return Article(
        id=article_id,
        role=Role.SOURCE,
        agency=agency,
        language=language,
        headline="Headline",
        body=body,
        received_at=received_at,
    )


def target_record(article_id: str, created_at: str, body: str, **extra) -> dict:
    record = {
        "id": article_id,
        "role": "target",
        "agency": "NPA",
        "language": "en",
        "created_at": created_at,
        "headline": "Headline",
        "body": body,
    }
    record.update(extra)
    return record


def source_record(article_id: str, received_at: str, body: str, **extra) -> dict:
    record = {
        "id": article_id,
        "role": "source",
        "agency": "WIRE1",
        "language": "en",
        "received_at": received_at,
        "headline": "Headline",
        "body": body,
    }
    record.update(extra)
    return record


def write_jsonl(path: Path, records: list[dict]) -> Path:
    with path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")
    return path


@pytest.fixture
def planted_corpora() -> tuple[Corpus, Corpus]:
    """One planted copy (t1 s0 == s1 s1), plus unrelated filler.

    Source received 08:00, target created 12:00 on the same date, so the
    planted pair survives the temporal filter.
    """
    planted = FILLER_SENTENCES[0]
    target = Corpus(
        Role.TARGET,
        [
            target_article(
                "t1",
                utc(2023, 10, 7, 12, 0),
                planted + " " + FILLER_SENTENCES[1],
            )
        ],
    )
    source = Corpus(
        Role.SOURCE,
        [
            source_article(
                "s1",
                utc(2023, 10, 7, 8, 0),
                FILLER_SENTENCES[2] + " " + planted,
            )
        ],
    )
    return target, source
