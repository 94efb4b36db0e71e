"""Sentence segmentation and the eligibility filter.

Target-corpus sentences must have more than 7 word tokens, contain a verb or
auxiliary, not look like a listing header, and not be dominated by numbers.
Source sentences are never filtered.
"""

from newsreuse.linguistic import (
    HeuristicTagger,
    annotate,
    eligibility,
    split_sentences,
    tokenize,
)

tagger = HeuristicTagger()

print("--- sentence segmentation with non-breaking prefixes ---")
text = "Dr. Smith arrived at the U.S. embassy. He spoke to reporters. Nothing was signed."
for sentence in split_sentences(text, "en"):
    print(f"  [{sentence.idx}] {sentence.text}  ({sentence.n_tokens} word tokens)")

print()
print("--- tokenization ---")
for sample in ["Follow us also on:", "don't stop", "7:30am to 2pm: John Doe"]:
    tokens = tokenize(sample)
    print(f"{sample!r:32} -> {tokens}")

print()
print("--- eligibility verdicts ---")
candidates = [
    "Follow us also on:",
    "Below is a schedule of events for Saturday, 1 February:",
    "7:30am to 2pm: John Doe",
    "The prime minister said the government will raise the education budget next year.",
    "Scores were 12 10 9 8 7 6 5 4",
]
for sample in candidates:
    tokens = annotate(tokenize(sample), "en", tagger)
    ok, reason = eligibility(sample, tokens)
    verdict = "eligible" if ok else f"rejected ({reason.value})"
    print(f"  {verdict:28} {sample}")

print()
print("--- coarse tags from the built-in heuristic ---")
tokens = annotate(tokenize("Below is a schedule of events"), "en", tagger)
print(" ".join(f"{t.text}/{t.pos.value}" for t in tokens))
