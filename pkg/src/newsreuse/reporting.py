"""File emitters: accounting and contingency CSVs, heatmap SVG/JSON, and
term frequencies for the most-reused sentences."""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass
from datetime import date, datetime
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from .analysis import ContingencyTable, HeatmapMatrix
from .corpus import Corpus
from .errors import EmptyMatrix, UnknownArticle
from .linguistic import Sentence, is_word_token, segment_corpus, tokenize
from .matcher import MatchRecord, MatchSet

DEFAULT_HEATMAP_MAX = 10

ACCOUNTING_ROWS = (
    ("True matches", "true_matches"),
    ("The earliest matches", "earliest_matches"),
    ("False positives", "false_positives"),
)


@dataclass(frozen=True)
class TermFrequency:
    term: str
    count: int


def emit_accounting(match_set: MatchSet, path: str | Path) -> None:
    """Write the match accounting table.

    Rows: true matches, earliest matches, false positives. The
    earliest-matches row applies only to the source side, so its target
    cells are emitted empty rather than zero.
    """
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["stage", "articles_target", "articles_source", "sentences_target", "sentences_source"]
        )
        for label, stage in ACCOUNTING_ROWS:
            counts = match_set.accounting[stage]
            if stage == "earliest_matches":
                writer.writerow(
                    [label, "", counts.source_articles, "", counts.source_sentences]
                )
            else:
                writer.writerow(
                    [
                        label,
                        counts.target_articles,
                        counts.source_articles,
                        counts.target_sentences,
                        counts.source_sentences,
                    ]
                )


def emit_position_csv(table: ContingencyTable, path: str | Path) -> None:
    """Contingency counts with row labels in the first column."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["source\\target", *table.col_labels])
        for label, row in zip(table.row_labels, table.counts):
            writer.writerow([label, *row])


# ---------------------------------------------------------------------------
# Heatmap SVG

CELL_W = 6
CELL_H = 28
LABEL_W = 78


def heatmap_color(value: float, scale_max: float) -> str:
    """Diverging blue -> white -> red scale anchored at 0, max/2, and max."""
    if scale_max <= 0:
        raise ValueError("scale_max must be positive")
    v = min(max(float(value), 0.0), scale_max)
    mid = scale_max / 2.0
    if v <= mid:
        frac = v / mid if mid else 1.0
        channel = int(round(255 * frac))
        return f"#{channel:02X}{channel:02X}FF"
    frac = (v - mid) / (scale_max - mid)
    channel = int(round(255 * (1.0 - frac)))
    return f"#FF{channel:02X}{channel:02X}"


def emit_heatmap_svg(
    matrix: HeatmapMatrix,
    path: str | Path,
    scale_max: float = DEFAULT_HEATMAP_MAX,
    divider_date: date | None = None,
) -> None:
    """Render the heatmap as rows of rectangles, one column per article.

    Values clamp to the scale maximum. When ``divider_date`` is given, a
    dashed vertical line is drawn before the first article on or after that
    date (e.g. to mark a year boundary in the corpus).
    """
    n_cols = len(matrix.article_ids)
    n_rows = len(matrix.bins)
    if n_cols == 0 or n_rows == 0:
        raise EmptyMatrix("heatmap matrix has no cells")

    width = LABEL_W + n_cols * CELL_W
    height = n_rows * CELL_H + 20
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
    ]
    for r, bin_name in enumerate(matrix.bins):
        y = r * CELL_H
        parts.append(
            f'<text x="4" y="{y + CELL_H // 2 + 4}" font-size="11" '
            f'font-family="sans-serif">{bin_name}</text>'
        )
        for c in range(n_cols):
            color = heatmap_color(matrix.counts[r][c], scale_max)
            parts.append(
                f'<rect x="{LABEL_W + c * CELL_W}" y="{y}" width="{CELL_W}" '
                f'height="{CELL_H}" fill="{color}"/>'
            )
    if divider_date is not None:
        split = n_cols
        for c, stamp in enumerate(matrix.timestamps):
            if datetime.fromisoformat(stamp).date() >= divider_date:
                split = c
                break
        x = LABEL_W + split * CELL_W
        parts.append(
            f'<line x1="{x}" y1="0" x2="{x}" y2="{n_rows * CELL_H}" '
            f'stroke="black" stroke-dasharray="4,3"/>'
        )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")


def emit_heatmap_json(matrix: HeatmapMatrix, path: str | Path) -> None:
    payload = {
        "bins": list(matrix.bins),
        "article_ids": list(matrix.article_ids),
        "timestamps": list(matrix.timestamps),
        "counts": [list(row) for row in matrix.counts],
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# Term frequencies

def default_stopwords() -> frozenset[str]:
    text = (resources.files("newsreuse.data") / "stopwords_en.txt").read_text(encoding="utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


def load_stopwords(path: str | Path | None) -> frozenset[str]:
    if path is None:
        return default_stopwords()
    text = Path(path).read_text(encoding="utf-8")
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())


def emit_term_frequencies(
    attributed: Sequence[MatchRecord],
    target: Corpus,
    top_k_sentences: int,
    stopwords: str | Path | frozenset[str] | None = None,
    path: str | Path | None = None,
    *,
    sentences: Mapping[str, Sequence[Sentence]] | None = None,
) -> list[TermFrequency]:
    """Count terms over the top-k most-reused target sentences.

    Sentences rank by pair multiplicity (ties to the smaller key); terms are
    lowercased, with stopwords, punctuation, pure numbers, and single
    characters dropped. Output sorts by count descending, term ascending.
    """
    if top_k_sentences < 1:
        raise ValueError("top_k_sentences must be at least 1")
    stops = stopwords if isinstance(stopwords, frozenset) else load_stopwords(stopwords)
    sentences = sentences if sentences is not None else segment_corpus(target)

    multiplicity = Counter(r.target_key for r in attributed)
    top_keys = [k for k, _ in sorted(multiplicity.items(), key=lambda kv: (-kv[1], kv[0]))]
    top_keys = top_keys[:top_k_sentences]

    counts: Counter[str] = Counter()
    for key in top_keys:
        article_id, _, idx = key.rpartition("#")
        if article_id not in sentences:
            raise UnknownArticle(f"article {article_id!r} not present in target corpus")
        sentence = sentences[article_id][int(idx)]
        for token in tokenize(sentence.text.lower()):
            if not is_word_token(token) or len(token) < 2:
                continue
            if token in stops or token.isdigit():
                continue
            counts[token] += 1

    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    terms = [TermFrequency(term=t, count=c) for t, c in ranked]
    if path is not None:
        payload = [{"term": t.term, "count": t.count} for t in terms]
        Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return terms
