"""Positional analysis: bins, contingency table, chi-square, PR types.

Runs the statistics on a reference set of positional counts and shows the
position machinery on a synthetic attributed pair set.
"""

from newsreuse.analysis import (
    ContingencyTable,
    chi_square_independence,
    classify_pr,
    position_bin,
)
from newsreuse.matcher import MatchRecord, MatchStatus
from datetime import datetime, timezone

print("--- tercile position bins ---")
for n in (1, 5, 9):
    bins = [position_bin(i, n).value[0].upper() for i in range(n)]
    print(f"  n={n}: {' '.join(bins)}")

print()
print("--- chi-square on reference source-bin x target-bin counts ---")
table = ContingencyTable(
    row_labels=("beginning", "middle", "end"),
    col_labels=("beginning", "middle", "end"),
    counts=((31, 217, 135), (130, 204, 144), (42, 72, 112)),
)
result = chi_square_independence(table)
print(f"  statistic={result.statistic:.3f}  df={result.df}  p={result.p_value:.3e}")
print(f"  significant at 0.05: {result.p_value < 0.05}")

print()
print("--- positional-relationship (PR) typology ---")
stamp_t = datetime(2023, 10, 7, 12, tzinfo=timezone.utc)
stamp_s = datetime(2023, 10, 7, 8, tzinfo=timezone.utc)


def pair(t, s):
    return MatchRecord(t, s, 0.9, stamp_t, stamp_s, MatchStatus.EARLIEST)


records = [
    pair("tgt1#0", "src1#0"),
    pair("tgt1#0", "src2#0"),  # tgt1#0 now aligns with two source sentences
    pair("tgt2#0", "src1#0"),  # src1#0 now aligns with two target sentences
    pair("tgt3#0", "src3#0"),  # untouched 1:1
]
mapping, distribution = classify_pr(records)
for (t, s), pr in mapping.items():
    print(f"  ({t}, {s}) -> {pr.value}")
print("  distribution over pairs:")
for pr, share in distribution.items():
    print(f"    {pr.value:10} {share:5.1f}%")
