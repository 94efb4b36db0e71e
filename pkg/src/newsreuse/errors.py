"""Exception hierarchy shared across the pipeline."""

from __future__ import annotations


class NewsReuseError(Exception):
    """Base class for all errors raised by this package."""


class CorpusError(NewsReuseError):
    """Base class for ingestion/parsing failures."""


class MissingField(CorpusError):
    def __init__(self, field: str, line: int | None = None):
        self.field = field
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"missing required field {field!r}{where}")


class BadTimestamp(CorpusError):
    pass


class BadLanguage(CorpusError):
    pass


class DuplicateId(CorpusError):
    def __init__(self, article_id: str, line: int | None = None):
        self.article_id = article_id
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"duplicate article id {article_id!r}{where}")


class RoleMismatch(NewsReuseError):
    pass


class AnnotationMissing(NewsReuseError):
    pass


class EmptyText(NewsReuseError):
    pass


class ProviderUnavailable(NewsReuseError):
    pass


class DimMismatch(NewsReuseError):
    pass


class BadMagic(NewsReuseError):
    pass


class TruncatedFile(NewsReuseError):
    pass


class MissingVector(NewsReuseError):
    def __init__(self, key: str):
        self.key = key
        super().__init__(f"no vector stored for sentence key {key!r}")


class IndexOutOfRange(NewsReuseError):
    pass


class UnknownArticle(NewsReuseError):
    pass


class DegenerateTable(NewsReuseError):
    pass


class EmptyGroup(NewsReuseError):
    pass


class NoSeparation(NewsReuseError):
    pass


class EmptyMatrix(NewsReuseError):
    pass
