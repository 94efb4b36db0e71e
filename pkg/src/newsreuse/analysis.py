"""Positional, relational, and statistical analyses of attributed matches.

Everything here is computed over the attributed (earliest-source) pair set:
position contingency tables, the positional-relationship typology, the
chi-square independence test, reuse rates, and the per-article heatmap
matrices.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .corpus import Corpus, Role
from .errors import DegenerateTable, IndexOutOfRange, RoleMismatch, UnknownArticle
from .linguistic import Sentence, segment_corpus
from .matcher import MatchRecord, MatchSet, MatchStatus, article_of


class PositionBin(Enum):
    BEGINNING = "beginning"
    MIDDLE = "middle"
    END = "end"


BIN_ORDER = (PositionBin.BEGINNING, PositionBin.MIDDLE, PositionBin.END)


class PrType(Enum):
    ONE_TO_ONE = "1:1"
    ONE_TO_MANY = "1:many"
    MANY_TO_ONE = "many:1"
    MANY_TO_MANY = "many:many"


@dataclass(frozen=True)
class ContingencyTable:
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.counts) != len(self.row_labels):
            raise ValueError("row count does not match row labels")
        for row in self.counts:
            if len(row) != len(self.col_labels):
                raise ValueError("column count does not match column labels")
            if any(c < 0 for c in row):
                raise ValueError("counts must be non-negative")

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts)


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    df: int
    p_value: float


@dataclass(frozen=True)
class ReuseRates:
    target_rate: float
    source_rate: float
    target_articles_matched: int
    target_articles_total: int
    source_articles_matched: int
    source_articles_total: int


@dataclass(frozen=True)
class HeatmapMatrix:
    bins: tuple[str, ...]
    article_ids: tuple[str, ...]
    timestamps: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]  # len(bins) rows x len(article_ids) cols


def position_bin(idx: int, n: int) -> PositionBin:
    """Tercile-by-index position of sentence ``idx`` in an ``n``-sentence article."""
    if n < 1 or idx < 0 or idx >= n:
        raise IndexOutOfRange(f"sentence index {idx} outside article of {n} sentences")
    return BIN_ORDER[min(3 * idx // n, 2)]


def _key_position(key: str, counts: Mapping[str, int]) -> PositionBin:
    article_id, _, idx = key.rpartition("#")
    if article_id not in counts:
        raise UnknownArticle(f"article {article_id!r} not present in corpus")
    return position_bin(int(idx), counts[article_id])


def article_sentence_counts(
    corpus: Corpus, sentences: Mapping[str, Sequence[Sentence]] | None = None
) -> dict[str, int]:
    """Full (pre-eligibility-filter) sentence counts per article."""
    sentences = sentences if sentences is not None else segment_corpus(corpus)
    return {article_id: len(sents) for article_id, sents in sentences.items()}


def build_position_table(
    attributed: Sequence[MatchRecord],
    target: Corpus,
    source: Corpus,
    *,
    target_counts: Mapping[str, int] | None = None,
    source_counts: Mapping[str, int] | None = None,
) -> ContingencyTable:
    """3x3 table of attributed pairs: rows = source bin, cols = target bin.

    Positions are computed against each article's full sentence list, so
    bins reflect the article as published rather than the filtered view.
    """
    target_counts = target_counts if target_counts is not None else article_sentence_counts(target)
    source_counts = source_counts if source_counts is not None else article_sentence_counts(source)

    grid = [[0, 0, 0] for _ in range(3)]
    index = {b: i for i, b in enumerate(BIN_ORDER)}
    for rec in attributed:
        r = index[_key_position(rec.source_key, source_counts)]
        c = index[_key_position(rec.target_key, target_counts)]
        grid[r][c] += 1
    return ContingencyTable(
        row_labels=tuple(b.value for b in BIN_ORDER),
        col_labels=tuple(b.value for b in BIN_ORDER),
        counts=tuple(tuple(row) for row in grid),
    )


def classify_pr(
    attributed: Sequence[MatchRecord],
) -> tuple[dict[tuple[str, str], PrType], dict[PrType, float]]:
    """Type each pair by sentence multiplicity and give the pair-share split.

    With k = pairs containing the pair's target sentence and m = pairs
    containing its source sentence: 1:1 when k=1, m=1; 1:many when k>1, m=1;
    many:1 when k=1, m>1; many:many when both exceed one. The distribution
    is percentages over pairs (all four types present, zeros included).
    """
    pairs = [(r.target_key, r.source_key) for r in attributed]
    k = Counter(t for t, _ in pairs)
    m = Counter(s for _, s in pairs)

    mapping: dict[tuple[str, str], PrType] = {}
    for t, s in pairs:
        many_t = k[t] > 1
        many_s = m[s] > 1
        if many_t and many_s:
            mapping[(t, s)] = PrType.MANY_TO_MANY
        elif many_t:
            mapping[(t, s)] = PrType.ONE_TO_MANY
        elif many_s:
            mapping[(t, s)] = PrType.MANY_TO_ONE
        else:
            mapping[(t, s)] = PrType.ONE_TO_ONE

    total = len(pairs)
    tallies = Counter(mapping[p] for p in pairs)
    distribution = {
        pr: (100.0 * tallies.get(pr, 0) / total if total else 0.0) for pr in PrType
    }
    return mapping, distribution


# ---------------------------------------------------------------------------
# Chi-square test of independence
#
# The tail probability is computed here with the standard series /
# continued-fraction expansions of the regularized incomplete gamma
# function rather than pulling in a stats dependency; the test suite checks
# it against an independent reference implementation to < 1e-10.

_GAMMA_EPS = 1e-16
_GAMMA_MAX_ITER = 10_000


def _gamma_p_series(a: float, x: float) -> float:
    ap = a
    total = term = 1.0 / a
    for _ in range(_GAMMA_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _GAMMA_EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))

def _gamma_q_contfrac(a: float, x: float) -> float:
    # modified Lentz's method
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _GAMMA_MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _GAMMA_EPS:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def regularized_gamma_q(a: float, x: float) -> float:
    """Upper regularized incomplete gamma Q(a, x) for a > 0, x >= 0."""
    if a <= 0:
        raise ValueError("shape parameter must be positive")
    if x < 0:
        raise ValueError("x must be non-negative")
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        return max(0.0, min(1.0, 1.0 - _gamma_p_series(a, x)))
    return max(0.0, min(1.0, _gamma_q_contfrac(a, x)))


def chi_square_independence(table: ContingencyTable) -> ChiSquareResult:
    """Pearson chi-square test that the two categorical axes factorize."""
    observed = np.asarray(table.counts, dtype=np.float64)
    n = observed.sum()
    if n <= 0:
        raise DegenerateTable("table has zero grand total")
    row_totals = observed.sum(axis=1)
    col_totals = observed.sum(axis=0)
    if np.any(row_totals == 0) or np.any(col_totals == 0):
        raise DegenerateTable("a zero row or column makes expected counts zero")
    expected = np.outer(row_totals, col_totals) / n
    statistic = float(((observed - expected) ** 2 / expected).sum())
    df = (observed.shape[0] - 1) * (observed.shape[1] - 1)
    if df < 1:
        raise DegenerateTable("table needs at least two rows and two columns")
    p_value = regularized_gamma_q(df / 2.0, statistic / 2.0)
    return ChiSquareResult(statistic=statistic, df=df, p_value=p_value)


# ---------------------------------------------------------------------------
# Rates and heatmaps

def reuse_rates(match_set: MatchSet, target: Corpus, source: Corpus) -> ReuseRates:
    """Share of articles on each side with at least one true-status pair."""
    true_like = [
        r for r in match_set.records if r.status in (MatchStatus.TRUE, MatchStatus.EARLIEST)
    ]
    matched_target = {article_of(r.target_key) for r in true_like}
    matched_source = {article_of(r.source_key) for r in true_like}
    n_target = len(target.articles)
    n_source = len(source.articles)
    return ReuseRates(
        target_rate=len(matched_target) / n_target if n_target else 0.0,
        source_rate=len(matched_source) / n_source if n_source else 0.0,
        target_articles_matched=len(matched_target),
        target_articles_total=n_target,
        source_articles_matched=len(matched_source),
        source_articles_total=n_source,
    )


def heatmap_matrix(
    attributed: Sequence[MatchRecord],
    corpus: Corpus,
    axis: Role,
    *,
    sentence_counts: Mapping[str, int] | None = None,
) -> HeatmapMatrix:
    """Per-article, per-bin counts of attributed pairs on one axis.

    Columns are articles in chronological order (created_at for the target
    axis, received_at for the source axis, ties broken by id), including
    articles with zero reuse. Cells count pairs, so column sums equal the
    article's pair multiplicity.
    """
    if corpus.role is not axis:
        raise RoleMismatch(
            f"corpus role {corpus.role.value!r} does not match requested axis {axis.value!r}"
        )
    sentence_counts = (
        sentence_counts if sentence_counts is not None else article_sentence_counts(corpus)
    )

    def stamp(article):
        return article.created_at if axis is Role.TARGET else article.received_at

    ordered = sorted(corpus.articles, key=lambda a: (stamp(a), a.id))
    col_of = {a.id: i for i, a in enumerate(ordered)}
    grid = [[0] * len(ordered) for _ in range(3)]
    bin_index = {b: i for i, b in enumerate(BIN_ORDER)}
    for rec in attributed:
        key = rec.target_key if axis is Role.TARGET else rec.source_key
        article_id = article_of(key)
        if article_id not in col_of:
            raise UnknownArticle(f"article {article_id!r} not present in corpus")
        grid[bin_index[_key_position(key, sentence_counts)]][col_of[article_id]] += 1

    return HeatmapMatrix(
        bins=tuple(b.value for b in BIN_ORDER),
        article_ids=tuple(a.id for a in ordered),
        timestamps=tuple(stamp(a).isoformat() for a in ordered),
        counts=tuple(tuple(row) for row in grid),
    )
