"""The threshold-calibration procedure on reuse pairs.

Each pair of texts yields three scores: full-text similarity, the mean over
index-aligned sentences (reused content under a monotonic alignment), and
the mean over non-aligned sentences (unrelated content). Group means feed a
threshold recommendation.
"""

from newsreuse import BuiltinHashProvider, GroupBy, PairRecord, aggregate, derive_threshold, score_pair
from newsreuse.calibration import CalibrationReport
from newsreuse.errors import NoSeparation

provider = BuiltinHashProvider()

print("--- scoring pairs (deterministic built-in embedder) ---")
pairs = [
    PairRecord(
        pair_id="reuse-1",
        language="en",
        source_text=(
            "The council approved the housing plan. Work begins in spring. "
            "Residents welcomed the decision."
        ),
        target_text=(
            "The council approved the housing plan on Monday. Work begins in early spring. "
            "Most residents welcomed the decision."
        ),
    ),
    PairRecord(
        pair_id="reuse-2",
        language="en",
        source_text=("Heavy rain flooded the valley. Rescue teams arrived overnight."),
        target_text=("Heavy rain flooded the entire valley. Rescue crews arrived overnight."),
    ),
]
scores = [score_pair(p, provider) for p in pairs]
for s in scores:
    non = "n/a" if s.nonaligned_mean is None else f"{s.nonaligned_mean:.3f}"
    print(f"  {s.pair_id}: full={s.full_text:.3f}  aligned={s.aligned_mean:.3f}  nonaligned={non}")

print()
print("--- aggregation by language ---")
for report in aggregate(scores, pairs, GroupBy.LANGUAGE):
    print(
        f"  {report.group}: full={report.full_text_mean:.3f}"
        f"  similar={report.aligned_mean:.3f}  different={report.nonaligned_mean:.3f}"
        f"  support={report.support}"
    )

print()
print("--- threshold recommendation from reference calibration means ---")
reference_english = CalibrationReport(
    group="en", full_text_mean=0.72, nonaligned_mean=0.37, aligned_mean=0.63, support=500
)
print("  recommended threshold:", derive_threshold([reference_english]))

print()
print("--- no separation -> no recommendation ---")
overlapping = CalibrationReport("x", 0.8, nonaligned_mean=0.65, aligned_mean=0.60, support=10)
try:
    derive_threshold([overlapping])
except NoSeparation as exc:
    print("  NoSeparation:", exc)
