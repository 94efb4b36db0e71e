"""Command-line frontend: ingest, run, calibrate, report.

Configuration comes from an optional JSON file with per-flag overrides
(flags win). Exit codes: 0 success, 2 missing input, 3 parse error,
4 provider error, 5 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field, fields, replace
from datetime import date
from pathlib import Path

from . import calibration as calib
from .analysis import (
    build_position_table,
    chi_square_independence,
    classify_pr,
    heatmap_matrix,
    reuse_rates,
)
from .corpus import DEFAULT_LANGUAGES, Corpus, Role, dump_corpus, load_corpus
from .embedding import BuiltinHashProvider, SidecarProvider
from .errors import (
    CorpusError,
    DegenerateTable,
    DimMismatch,
    NewsReuseError,
    NoSeparation,
    ProviderUnavailable,
)
from .linguistic import ExternalAnnotations, HeuristicTagger
from .matcher import (
    MatchSet,
    attributed_records,
    match_pipeline,
    read_match_jsonl,
    write_match_jsonl,
    write_summary_json,
)
from .reporting import (
    DEFAULT_HEATMAP_MAX,
    emit_accounting,
    emit_heatmap_json,
    emit_heatmap_svg,
    emit_position_csv,
    emit_term_frequencies,
    load_stopwords,
)

EXIT_OK = 0
EXIT_MISSING_INPUT = 2
EXIT_PARSE_ERROR = 3
EXIT_PROVIDER_ERROR = 4
EXIT_INVARIANT = 5


@dataclass
class Config:
    threshold: float = 0.60
    embed_dim: int = 384
    provider: str = "builtin"
    sidecar_url: str = "http://127.0.0.1:8601"
    languages: list[str] = field(default_factory=lambda: sorted(DEFAULT_LANGUAGES))
    heatmap_max: int = DEFAULT_HEATMAP_MAX
    heatmap_divider: str | None = None
    parallelism: int = 1
    top_k_sentences: int = 25
    filter_sources: bool = False
    target_corpus: str | None = None
    source_corpus: str | None = None
    annotations: str | None = None
    stopwords: str | None = None
    out_dir: str = "out"

    def validate(self) -> None:
        if not 0.0 < self.threshold < 1.0:
            raise NewsReuseError(f"threshold must be in (0, 1), got {self.threshold}")
        if self.parallelism < 1:
            raise NewsReuseError(f"parallelism must be >= 1, got {self.parallelism}")
        if self.embed_dim < 1:
            raise NewsReuseError(f"embed_dim must be positive, got {self.embed_dim}")
        if self.provider not in ("builtin", "sidecar"):
            raise NewsReuseError(f"provider must be builtin or sidecar, got {self.provider!r}")
        if self.heatmap_max < 1:
            raise NewsReuseError(f"heatmap_max must be positive, got {self.heatmap_max}")


def load_config(path: str | Path | None) -> Config:
    if path is None:
        return Config()
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    known = {f.name for f in fields(Config)}
    unknown = set(raw) - known
    if unknown:
        raise NewsReuseError(f"unknown config keys: {sorted(unknown)}")
    return Config(**raw)


def _apply_overrides(cfg: Config, args: argparse.Namespace) -> Config:
    overrides = {}
    for name in (
        "threshold",
        "provider",
        "sidecar_url",
        "out_dir",
        "parallelism",
        "heatmap_max",
        "top_k_sentences",
        "target_corpus",
        "source_corpus",
        "annotations",
        "stopwords",
    ):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    cfg = replace(cfg, **overrides)
    cfg.validate()
    return cfg


def _make_provider(cfg: Config):
    if cfg.provider == "builtin":
        return BuiltinHashProvider(dim=cfg.embed_dim)
    provider = SidecarProvider(cfg.sidecar_url)
    provider.meta()  # fail fast when the sidecar is down
    return provider


def _make_annotator(cfg: Config):
    if cfg.annotations:
        return ExternalAnnotations(cfg.annotations)
    return HeuristicTagger()


def _require(path: str | None, what: str) -> Path:
    if not path:
        raise NewsReuseError(f"no {what} path configured")
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"{what} file not found: {p}")
    return p


def _json_dump(payload, path: Path) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# Commands

def cmd_ingest(args: argparse.Namespace) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    target = load_corpus(_require(cfg.target_corpus, "target corpus"), Role.TARGET, cfg.languages)
    source = load_corpus(_require(cfg.source_corpus, "source corpus"), Role.SOURCE, cfg.languages)

    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dump_corpus(target, out_dir / "target_clean.jsonl")
    dump_corpus(source, out_dir / "source_clean.jsonl")

    for name, corpus in (("target", target), ("source", source)):
        print(f"{name}: {len(corpus)} articles")
        for language, count in sorted(corpus.language_counts.items()):
            print(f"  {language}: {count}")
        for agency, count in sorted(corpus.agency_counts.items()):
            print(f"  agency {agency}: {count}")
    return EXIT_OK


def _write_reports(match_set: MatchSet, target: Corpus, source: Corpus, cfg: Config) -> None:
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    write_match_jsonl(match_set, out_dir / "matches.jsonl")
    write_summary_json(match_set, out_dir / "summary.json")
    emit_accounting(match_set, out_dir / "accounting.csv")

    attributed = attributed_records(match_set)
    table = build_position_table(attributed, target, source)
    emit_position_csv(table, out_dir / "position_table.csv")

    try:
        chi = chi_square_independence(table)
        chi_payload = {"statistic": chi.statistic, "df": chi.df, "p_value": chi.p_value}
    except DegenerateTable as exc:
        chi_payload = {"statistic": None, "df": None, "p_value": None, "note": str(exc)}
    _json_dump(chi_payload, out_dir / "chi_square.json")

    mapping, distribution = classify_pr(attributed)
    counts: dict[str, int] = {pr.value: 0 for pr in distribution}
    for pr in mapping.values():
        counts[pr.value] += 1
    _json_dump(
        {
            "counts": counts,
            "percentages": {pr.value: distribution[pr] for pr in distribution},
        },
        out_dir / "pr_distribution.json",
    )

    try:
        divider = date.fromisoformat(cfg.heatmap_divider) if cfg.heatmap_divider else None
    except ValueError as exc:
        raise NewsReuseError(f"heatmap_divider must be an ISO date: {exc}") from exc
    for axis, corpus, stem in ((Role.TARGET, target, "heatmap_target"), (Role.SOURCE, source, "heatmap_source")):
        matrix = heatmap_matrix(attributed, corpus, axis)
        emit_heatmap_svg(matrix, out_dir / f"{stem}.svg", scale_max=cfg.heatmap_max, divider_date=divider)
        emit_heatmap_json(matrix, out_dir / f"{stem}.json")

    emit_term_frequencies(
        attributed,
        target,
        top_k_sentences=cfg.top_k_sentences,
        stopwords=load_stopwords(cfg.stopwords),
        path=out_dir / "term_frequencies.json",
    )

    rates = reuse_rates(match_set, target, source)
    _json_dump(vars(rates), out_dir / "reuse_rates.json")


def cmd_run(args: argparse.Namespace) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    target = load_corpus(_require(cfg.target_corpus, "target corpus"), Role.TARGET, cfg.languages)
    source = load_corpus(_require(cfg.source_corpus, "source corpus"), Role.SOURCE, cfg.languages)

    provider = _make_provider(cfg)
    match_set = match_pipeline(
        target,
        source,
        provider,
        threshold=cfg.threshold,
        annotator=_make_annotator(cfg),
        parallelism=cfg.parallelism,
        filter_sources=cfg.filter_sources,
    )
    _write_reports(match_set, target, source, cfg)

    counts = match_set.accounting
    print(f"comparisons: {match_set.comparisons}")
    for stage in ("raw", "true_matches", "earliest_matches", "false_positives"):
        print(f"{stage}: {counts[stage].pairs} pairs")
    print(f"artifacts written to {cfg.out_dir}")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    target = load_corpus(_require(cfg.target_corpus, "target corpus"), Role.TARGET, cfg.languages)
    source = load_corpus(_require(cfg.source_corpus, "source corpus"), Role.SOURCE, cfg.languages)
    matches_path = _require(str(Path(cfg.out_dir) / "matches.jsonl"), "match records")
    match_set = read_match_jsonl(matches_path, threshold=cfg.threshold)
    _write_reports(match_set, target, source, cfg)
    print(f"reports rebuilt in {cfg.out_dir}")
    return EXIT_OK


def cmd_calibrate(args: argparse.Namespace) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    pairs = calib.load_pairs(_require(args.pairs, "pairs"))
    provider = _make_provider(cfg)
    group_by = calib.GroupBy(args.group_by)

    scores = [calib.score_pair(pair, provider) for pair in pairs]
    reports = calib.aggregate(scores, pairs, group_by)

    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    calib.write_calibration_csv(reports, out_dir / "calibration.csv")

    for report in reports:
        non = "" if report.nonaligned_mean is None else f"{report.nonaligned_mean:.4f}"
        ali = "" if report.aligned_mean is None else f"{report.aligned_mean:.4f}"
        print(
            f"{report.group}\tfull={report.full_text_mean:.4f}\tdifferent={non}"
            f"\tsimilar={ali}\tsupport={report.support}"
        )
    try:
        threshold = calib.derive_threshold(reports)
        print(f"recommended_threshold\t{threshold:.2f}")
    except NoSeparation as exc:
        print(f"warning: no threshold recommendation: {exc}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="newsreuse",
        description="Detect sentence-level cross-lingual text reuse between news corpora.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--threshold", type=float, help="similarity threshold (default 0.60)")
        p.add_argument("--provider", choices=["builtin", "sidecar"], help="embedding provider")
        p.add_argument("--sidecar-url", dest="sidecar_url", help="embedding sidecar base URL")
        p.add_argument("--out-dir", dest="out_dir", help="output directory")
        p.add_argument("--parallelism", type=int, help="parallel block workers")
        p.add_argument("--heatmap-max", dest="heatmap_max", type=int, help="heatmap scale maximum")
        p.add_argument(
            "--top-k-sentences", dest="top_k_sentences", type=int,
            help="sentences feeding term frequencies",
        )

    p_ingest = sub.add_parser("ingest", help="load, clean, and persist both corpora")
    common(p_ingest)
    p_ingest.add_argument("--target", dest="target_corpus", help="target corpus JSONL")
    p_ingest.add_argument("--source", dest="source_corpus", help="source corpus JSONL")
    p_ingest.set_defaults(func=cmd_ingest)

    p_run = sub.add_parser("run", help="run the full matching and analysis pipeline")
    common(p_run)
    p_run.add_argument("--target", dest="target_corpus", help="target corpus JSONL")
    p_run.add_argument("--source", dest="source_corpus", help="source corpus JSONL")
    p_run.add_argument("--annotations", help="external annotations JSONL")
    p_run.add_argument("--stopwords", help="stopword list file")
    p_run.set_defaults(func=cmd_run)

    p_report = sub.add_parser("report", help="rebuild analysis artifacts from saved matches")
    common(p_report)
    p_report.add_argument("--target", dest="target_corpus", help="target corpus JSONL")
    p_report.add_argument("--source", dest="source_corpus", help="source corpus JSONL")
    p_report.set_defaults(func=cmd_report)

    p_cal = sub.add_parser("calibrate", help="run the threshold calibration procedure")
    common(p_cal)
    p_cal.add_argument("--pairs", required=True, help="pair records JSONL")
    p_cal.add_argument(
        "--group-by",
        dest="group_by",
        choices=[g.value for g in calib.GroupBy],
        default=calib.GroupBy.LANGUAGE.value,
    )
    p_cal.set_defaults(func=cmd_calibrate)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_INPUT
    except (CorpusError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    except (ProviderUnavailable, DimMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PROVIDER_ERROR
    except NewsReuseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
