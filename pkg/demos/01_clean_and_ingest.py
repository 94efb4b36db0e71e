"""Cleaning and ingesting a news corpus.

Articles arrive as JSONL with a role discriminator; bodies are scrubbed of
HTML tags, emails, and phone-like digit spans before anything else sees them.
"""

import json
import tempfile
from pathlib import Path

from newsreuse import Role, clean_text, load_corpus

print("--- text cleaning ---")
samples = [
    "<p>Talks resumed.</p>",
    "Contact a.b@agency.example today",
    "Call +386 1 234 5678 now",
    "Mixed:   <b>bold</b> words,  a@b.example and 020 7946 0000 gone",
]
for raw in samples:
    print(f"{raw!r:60} -> {clean_text(raw)!r}")

print()
print("--- cleaning is idempotent ---")
once = clean_text(samples[3])
print("clean(clean(x)) == clean(x):", clean_text(once) == once)

print()
print("--- ingesting a JSONL corpus ---")
records = [
    {
        "id": "npa-001",
        "role": "target",
        "agency": "NPA",
        "language": "en",
        "created_at": "2023-10-07T08:15:00.000001Z",
        "headline": "Government <b>announces</b> new budget",
        "body": "The government announced a larger budget. Schools will receive most of it.",
    },
    {
        "id": "npa-002",
        "role": "target",
        "agency": "NPA",
        "language": "en",
        "created_at": "2023-10-07T09:30:00Z",
        "headline": "Storm damage reported",
        "body": "Heavy rain flooded the valley. Rescue teams arrived overnight.",
    },
]

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "target.jsonl"
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n")
    corpus = load_corpus(path, Role.TARGET)
    print(f"loaded {len(corpus)} articles")
    print("language counts:", dict(corpus.language_counts))
    first = corpus.articles[0]
    print("headline after cleaning:", first.headline)
    print("created_at normalized to UTC:", first.created_at)
