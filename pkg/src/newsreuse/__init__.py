"""Sentence-level cross-lingual text reuse detection for newswire corpora."""

from .analysis import (
    ChiSquareResult,
    ContingencyTable,
    HeatmapMatrix,
    PositionBin,
    PrType,
    ReuseRates,
    build_position_table,
    chi_square_independence,
    classify_pr,
    heatmap_matrix,
    position_bin,
    reuse_rates,
)
from .calibration import (
    CalibrationReport,
    CalibrationScores,
    GroupBy,
    PairRecord,
    aggregate,
    derive_threshold,
    load_pairs,
    score_pair,
)
from .corpus import (
    DEFAULT_LANGUAGES,
    Article,
    Corpus,
    Role,
    clean_text,
    dump_corpus,
    load_corpus,
    parse_article_record,
)
from .embedding import (
    BuiltinHashProvider,
    EmbeddingMeta,
    SidecarProvider,
    VectorStore,
    cosine_similarity,
    embed_batch,
    hash_embed,
    store_read,
    store_write,
)
from .linguistic import (
    AnnotatedSentence,
    ExternalAnnotations,
    HeuristicTagger,
    PosTag,
    RejectionReason,
    Sentence,
    Token,
    annotate,
    filter_target_sentences,
    is_eligible,
    split_sentences,
    tokenize,
)
from .matcher import (
    DateBlock,
    MatchRecord,
    MatchSet,
    MatchStatus,
    build_date_blocks,
    flag_false_positives,
    match_block,
    match_pipeline,
    select_earliest_source,
)
from .reporting import (
    TermFrequency,
    emit_accounting,
    emit_heatmap_svg,
    emit_term_frequencies,
)

__version__ = "0.1.0"
