"""Threshold calibration over known-reuse text-pair corpora.

For each pair of texts the procedure yields three scores: full-text cosine
similarity, the mean similarity of index-aligned sentences (assumed reused
content under a monotonic alignment), and the mean similarity of
non-aligned sentences (unrelated content). Group means of the latter two
motivate the match threshold.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from statistics import fmean
from typing import Iterable, Sequence

from .embedding import Provider, cosine_similarity, embed_batch
from .errors import EmptyGroup, EmptyText, MissingField, NoSeparation
from .linguistic import split_sentences

THRESHOLD_STEP = 0.05


class GroupBy(Enum):
    LANGUAGE = "language"
    PARAPHRASE_LABEL = "paraphrase_label"


@dataclass(frozen=True)
class PairRecord:
    pair_id: str
    language: str
    source_text: str
    target_text: str
    paraphrase_label: bool | None = None


@dataclass(frozen=True)
class CalibrationScores:
    pair_id: str
    full_text: float
    aligned_mean: float | None
    nonaligned_mean: float | None


@dataclass(frozen=True)
class CalibrationReport:
    group: str
    full_text_mean: float
    nonaligned_mean: float | None
    aligned_mean: float | None
    support: int


def load_pairs(path: str | Path) -> list[PairRecord]:
    """Read pair records from JSONL."""
    pairs = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            row = json.loads(line)
            for name in ("pair_id", "language", "source_text", "target_text"):
                if row.get(name) in (None, ""):
                    raise MissingField(name, lineno)
            label = row.get("paraphrase_label")
            pairs.append(
                PairRecord(
                    pair_id=str(row["pair_id"]),
                    language=str(row["language"]).lower(),
                    source_text=str(row["source_text"]),
                    target_text=str(row["target_text"]),
                    paraphrase_label=None if label is None else bool(label),
                )
            )
    return pairs


def score_pair(pair: PairRecord, provider: Provider) -> CalibrationScores:
    """Compute full-text, aligned, and non-aligned similarity for one pair.

    Sentence comparisons are restricted to indices below the shorter side's
    length, so the aligned and non-aligned sets partition the same index
    range. The non-aligned mean is absent when that range has no i != j
    pairs (a single sentence on either side).
    """
    src_sents = [s.text for s in split_sentences(pair.source_text, pair.language)]
    tgt_sents = [s.text for s in split_sentences(pair.target_text, pair.language)]
    if not src_sents or not tgt_sents:
        raise EmptyText(f"pair {pair.pair_id!r} has an empty side")

    texts = [" ".join(src_sents), " ".join(tgt_sents)] + src_sents + tgt_sents
    vectors = embed_batch(texts, provider)
    full_src, full_tgt = vectors[0], vectors[1]
    src_vecs = vectors[2 : 2 + len(src_sents)]
    tgt_vecs = vectors[2 + len(src_sents) :]

    full_text = cosine_similarity(full_src, full_tgt)
    shared = min(len(src_vecs), len(tgt_vecs))
    aligned = [cosine_similarity(src_vecs[i], tgt_vecs[i]) for i in range(shared)]
    nonaligned = [
        cosine_similarity(src_vecs[i], tgt_vecs[j])
        for i in range(shared)
        for j in range(shared)
        if i != j
    ]
    return CalibrationScores(
        pair_id=pair.pair_id,
        full_text=full_text,
        aligned_mean=fmean(aligned) if aligned else None,
        nonaligned_mean=fmean(nonaligned) if nonaligned else None,
    )


def _group_key(pair: PairRecord, group_by: GroupBy) -> str:
    if group_by is GroupBy.LANGUAGE:
        return pair.language
    if pair.paraphrase_label is None:
        raise EmptyGroup(f"pair {pair.pair_id!r} has no paraphrase label to group by")
    return "yes" if pair.paraphrase_label else "no"


def aggregate(
    scores: Sequence[CalibrationScores],
    pairs: Iterable[PairRecord],
    group_by: GroupBy,
) -> list[CalibrationReport]:
    """Per-group arithmetic means; absent values are excluded, not zeroed."""
    by_id = {p.pair_id: p for p in pairs}
    groups: dict[str, list[CalibrationScores]] = {}
    for score in scores:
        if score.pair_id not in by_id:
            raise EmptyGroup(f"score for unknown pair {score.pair_id!r}")
        groups.setdefault(_group_key(by_id[score.pair_id], group_by), []).append(score)
    if not groups:
        raise EmptyGroup("no groups to aggregate")

    reports = []
    for group in sorted(groups):
        members = groups[group]
        aligned = [s.aligned_mean for s in members if s.aligned_mean is not None]
        nonaligned = [s.nonaligned_mean for s in members if s.nonaligned_mean is not None]
        reports.append(
            CalibrationReport(
                group=group,
                full_text_mean=fmean([s.full_text for s in members]),
                nonaligned_mean=fmean(nonaligned) if nonaligned else None,
                aligned_mean=fmean(aligned) if aligned else None,
                support=len(members),
            )
        )
    return reports


def derive_threshold(reports: Sequence[CalibrationReport]) -> float:
    """Midpoint between the worst non-aligned and best aligned group means,
    rounded up to the nearest 0.05.

    Raises NoSeparation when the interval is empty or when no group carries
    both means.
    """
    usable = [r for r in reports if r.aligned_mean is not None and r.nonaligned_mean is not None]
    if not usable:
        raise NoSeparation("no group reports both aligned and non-aligned means")
    worst_nonaligned = max(r.nonaligned_mean for r in usable)
    best_aligned = min(r.aligned_mean for r in usable)
    if worst_nonaligned >= best_aligned:
        raise NoSeparation(
            f"non-aligned mean {worst_nonaligned:.3f} does not separate from "
            f"aligned mean {best_aligned:.3f}"
        )
    midpoint = (worst_nonaligned + best_aligned) / 2.0
    steps = math.ceil(midpoint / THRESHOLD_STEP - 1e-9)
    return round(steps * THRESHOLD_STEP, 2)


def write_calibration_csv(reports: Sequence[CalibrationReport], path: str | Path) -> None:
    """Emit the report table: group, full text, different sentences
    (non-aligned), similar sentences (aligned), support."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["group", "full_text", "different_sentences", "similar_sentences", "support"])
        for report in reports:
            writer.writerow(
                [
                    report.group,
                    f"{report.full_text_mean:.6f}",
                    "" if report.nonaligned_mean is None else f"{report.nonaligned_mean:.6f}",
                    "" if report.aligned_mean is None else f"{report.aligned_mean:.6f}",
                    report.support,
                ]
            )
