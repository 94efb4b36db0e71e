"""Article data model, text cleaning, and JSONL corpus ingestion.

Two corpora flow through the pipeline: a *target* corpus (the national
agency's own output, timestamped by creation) and a *source* corpus
(foreign-agency articles, timestamped by receipt). Both are ingested from
the same JSONL schema with a ``role`` discriminator.
"""

from __future__ import annotations

import json
import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Iterable

from .errors import (
    BadLanguage,
    BadTimestamp,
    CorpusError,
    DuplicateId,
    MissingField,
    RoleMismatch,
)

logger = logging.getLogger(__name__)

DEFAULT_LANGUAGES = frozenset({"en", "it", "pl", "fr", "de", "sr", "hr"})

TAG_RE = re.compile(r"<[^>]*>")
EMAIL_RE = re.compile(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}")
# Optional "+", optional opening paren, then at least 7 digits with at most
# one space/dash/dot/paren between consecutive digits.
PHONE_RE = re.compile(r"\+?\(?\d(?:[ .()-]?\d){6,}\)?")
WS_RE = re.compile(r"\s+")

# RFC 3339 date-time, fractional seconds and offset optional (naive = UTC).
TIMESTAMP_RE = re.compile(
    r"^\d{4}-\d{2}-\d{2}[Tt ]\d{2}:\d{2}:\d{2}(?:\.\d{1,9})?(?:[Zz]|[+-]\d{2}:\d{2})?$"
)


class Role(Enum):
    TARGET = "target"
    SOURCE = "source"


@dataclass(frozen=True)
class Article:
    """One timestamped news item with a cleaned body."""

    id: str
    role: Role
    agency: str
    language: str
    headline: str
    body: str
    created_at: datetime | None = None
    received_at: datetime | None = None
    category: str | None = None


@dataclass
class Corpus:
    """An ordered, role-homogeneous collection of articles."""

    role: Role
    articles: list[Article] = field(default_factory=list)

    def __post_init__(self) -> None:
        for art in self.articles:
            if art.role is not self.role:
                raise RoleMismatch(
                    f"article {art.id!r} has role {art.role.value}, corpus is {self.role.value}"
                )

    def __len__(self) -> int:
        return len(self.articles)

    def __iter__(self):
        return iter(self.articles)

    def get(self, article_id: str) -> Article | None:
        return self._by_id().get(article_id)

    def _by_id(self) -> dict[str, Article]:
        return {a.id: a for a in self.articles}

    @property
    def language_counts(self) -> Counter:
        return Counter(a.language for a in self.articles)

    @property
    def agency_counts(self) -> Counter:
        return Counter(a.agency for a in self.articles)


def clean_text(raw: str) -> str:
    """Strip HTML tags, email addresses, and phone-like digit spans.

    Tags are replaced by a single space; emails and phone spans are removed;
    whitespace runs collapse to one space and the result is trimmed.
    Whitespace is normalized before the phone scan so digit runs are seen
    with the spacing they will have in the output, which keeps the function
    idempotent.
    """
    text = TAG_RE.sub(" ", raw)
    text = EMAIL_RE.sub("", text)
    text = WS_RE.sub(" ", text)
    text = PHONE_RE.sub("", text)
    return WS_RE.sub(" ", text).strip()


def _parse_timestamp(value: Any, field_name: str) -> datetime:
    if not isinstance(value, str) or not TIMESTAMP_RE.match(value.strip()):
        raise BadTimestamp(f"{field_name}={value!r} is not an RFC 3339 timestamp")
    text = value.strip()
    if text[-1] in "zZ":
        text = text[:-1] + "+00:00"
    # fromisoformat (3.10) wants exactly 3 or 6 fractional digits; RFC 3339
    # allows 1-9, so normalize to microsecond precision
    text = re.sub(r"\.(\d{1,9})", lambda m: "." + m.group(1)[:6].ljust(6, "0"), text, count=1)
    try:
        parsed = datetime.fromisoformat(text)
    except ValueError as exc:
        raise BadTimestamp(f"{field_name}={value!r}: {exc}") from exc
    if parsed.tzinfo is None:
        return parsed.replace(tzinfo=timezone.utc)
    return parsed.astimezone(timezone.utc)


REQUIRED_FIELDS = ("id", "role", "agency", "language", "headline", "body")


def parse_article_record(
    record: dict[str, Any],
    languages: Iterable[str] = DEFAULT_LANGUAGES,
) -> Article:
    """Build an Article from one decoded JSONL object.

    The body and headline are cleaned; timestamps are normalized to UTC.
    Raises MissingField, BadTimestamp, or BadLanguage.
    """
    for name in REQUIRED_FIELDS:
        if record.get(name) in (None, ""):
            raise MissingField(name)

    role_raw = str(record["role"]).lower()
    try:
        role = Role(role_raw)
    except ValueError:
        raise CorpusError(f"unknown role {record['role']!r} (expected target/source)")

    language = str(record["language"]).lower()
    allowed = set(languages)
    if language not in allowed:
        raise BadLanguage(f"language {language!r} not in configured set {sorted(allowed)}")

    created_at = received_at = None
    if role is Role.TARGET and record.get("created_at") in (None, ""):
        raise MissingField("created_at")
    if role is Role.SOURCE and record.get("received_at") in (None, ""):
        raise MissingField("received_at")
    if record.get("created_at") not in (None, ""):
        created_at = _parse_timestamp(record["created_at"], "created_at")
    if record.get("received_at") not in (None, ""):
        received_at = _parse_timestamp(record["received_at"], "received_at")

    return Article(
        id=str(record["id"]),
        role=role,
        agency=str(record["agency"]),
        language=language,
        headline=clean_text(str(record["headline"])),
        body=clean_text(str(record["body"])),
        created_at=created_at,
        received_at=received_at,
        category=record.get("category"),
    )


def load_corpus(
    path: str | Path,
    role: Role,
    languages: Iterable[str] = DEFAULT_LANGUAGES,
) -> Corpus:
    """Load a JSONL corpus, one article per non-empty line.

    Per-record errors are re-raised with the offending line number attached;
    duplicate ids are rejected.
    """
    path = Path(path)
    articles: list[Article] = []
    seen: set[str] = set()
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}: line {lineno}: invalid JSON: {exc}") from exc
            if not isinstance(record, dict):
                raise CorpusError(f"{path}: line {lineno}: expected a JSON object")
            try:
                article = parse_article_record(record, languages)
            except MissingField as exc:
                raise MissingField(exc.field, lineno) from exc
            except CorpusError as exc:
                raise type(exc)(f"{path}: line {lineno}: {exc}") from exc
            if article.role is not role:
                raise RoleMismatch(
                    f"{path}: line {lineno}: article role {article.role.value!r} "
                    f"does not match corpus role {role.value!r}"
                )
            if article.id in seen:
                raise DuplicateId(article.id, lineno)
            seen.add(article.id)
            articles.append(article)
    if not articles:
        logger.warning("corpus %s loaded with 0 articles", path)
    return Corpus(role=role, articles=articles)


def article_to_record(article: Article) -> dict[str, Any]:
    record: dict[str, Any] = {
        "id": article.id,
        "role": article.role.value,
        "agency": article.agency,
        "language": article.language,
        "headline": article.headline,
        "body": article.body,
    }
    if article.created_at is not None:
        record["created_at"] = article.created_at.isoformat()
    if article.received_at is not None:
        record["received_at"] = article.received_at.isoformat()
    if article.category is not None:
        record["category"] = article.category
    return record


def dump_corpus(corpus: Corpus, path: str | Path) -> None:
    """Serialize a corpus back to JSONL (the load_corpus inverse)."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for article in corpus.articles:
            fh.write(json.dumps(article_to_record(article), ensure_ascii=False, sort_keys=True))
            fh.write("\n")
