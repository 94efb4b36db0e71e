"""End-to-end matching on a synthetic corpus with planted reuse.

Three things are planted: a clean copy (a true match), a copy whose target
article predates the source's receipt (a temporal false positive), and a
sentence available from two source articles (earliest-source attribution).
"""

from datetime import datetime, timezone

from newsreuse import BuiltinHashProvider, Corpus, Role, match_pipeline
from newsreuse.corpus import Article
from newsreuse.matcher import MatchStatus, article_of


def at(hour: int, minute: int = 0) -> datetime:
    return datetime(2023, 10, 7, hour, minute, tzinfo=timezone.utc)


def target(article_id, created, body):
    return Article(article_id, Role.TARGET, "NPA", "en", "H", body, created_at=created)


def source(article_id, received, body):
    return Article(article_id, Role.SOURCE, "WIRE1", "en", "H", body, received_at=received)


COPY = "The prime minister said the government will raise the education budget next year."
TWO_SOURCE = "Heavy rainfall flooded several streets in the capital during the early morning hours."
EARLY_BIRD = "Investigators said the committee will publish its final report on the accident soon."
FILLER = "The national theatre opened its new season with a play about village life."

targets = Corpus(
    Role.TARGET,
    [
        target("t-copy", at(12), COPY + " " + FILLER),
        target("t-early", at(6), EARLY_BIRD + " " + FILLER),  # created before receipt!
        target("t-two", at(14), TWO_SOURCE + " " + FILLER),
    ],
)
sources = Corpus(
    Role.SOURCE,
    [
        source("s-copy", at(8), COPY),
        source("s-early", at(9), EARLY_BIRD),
        source("s-two-late", at(10), TWO_SOURCE),
        source("s-two-early", at(7, 30), TWO_SOURCE),
    ],
)

result = match_pipeline(targets, sources, BuiltinHashProvider(), threshold=0.6)

print("--- per-stage accounting ---")
for stage in ("raw", "true_matches", "earliest_matches", "false_positives"):
    counts = result.accounting[stage]
    print(
        f"  {stage:18} pairs={counts.pairs}  target articles={counts.target_articles}"
        f"  source articles={counts.source_articles}"
    )

print()
print("--- records ---")
for record in result.records:
    print(
        f"  {record.target_key} <- {record.source_key}"
        f"  sim={record.similarity:.3f}  status={record.status.value}"
    )

print()
fp = [r for r in result.records if r.status is MatchStatus.FALSE_POSITIVE]
print("false positives (target created before source received):",
      [(r.target_key, article_of(r.source_key)) for r in fp])

earliest = [r for r in result.records if r.status is MatchStatus.EARLIEST]
two = [article_of(r.source_key) for r in earliest if r.target_key.startswith("t-two")]
print("t-two attributed to the earlier of the two source articles:", two)
