"""Embedding backends behind the HTTP service.

The model identity is configuration, not contract: any multilingual
sentence-embedding checkpoint works. A deterministic feature-hashing
backend ships for protocol tests and offline development; select it with
``MODEL_ID=debug-hash-<dim>``.
"""

from __future__ import annotations

import math
import unicodedata
from threading import Lock
from typing import Protocol, Sequence

import numpy as np

DEFAULT_MODEL_ID = "sentence-transformers/paraphrase-multilingual-MiniLM-L12-v2"

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


class ModelBackend(Protocol):
    model_id: str
    dim: int
    max_tokens: int | None

    def encode(self, texts: Sequence[str], normalize: bool) -> list[list[float]]:
        ...


class HashBackend:
    """Deterministic character n-gram hashing; no weights needed."""

    def __init__(self, model_id: str, dim: int):
        self.model_id = model_id
        self.dim = dim
        self.max_tokens = None

    def encode(self, texts: Sequence[str], normalize: bool) -> list[list[float]]:
        return [self._one(t, normalize) for t in texts]

    def _one(self, text: str, normalize: bool) -> list[float]:
        padded = "^" + unicodedata.normalize("NFC", text.lower()) + "$"
        counts = [0] * self.dim
        for n in (3, 4, 5):
            for i in range(len(padded) - n + 1):
                h = _FNV_OFFSET
                for byte in padded[i : i + n].encode("utf-8"):
                    h = ((h ^ byte) * _FNV_PRIME) & _MASK64
                counts[h % self.dim] += 1 if h < 2**63 else -1
        if not any(counts):
            counts[0] = 1
        if not normalize:
            return [float(c) for c in counts]
        norm = math.sqrt(sum(c * c for c in counts))
        return [c / norm for c in counts]


class SentenceTransformerBackend:
    """Real multilingual model; encoding is serialized behind a lock."""

    def __init__(self, model_id: str):
        from sentence_transformers import SentenceTransformer

        self.model_id = model_id
        self._model = SentenceTransformer(model_id, device="cpu")
        self.dim = int(self._model.get_sentence_embedding_dimension())
        self.max_tokens = getattr(self._model, "max_seq_length", None)
        self._lock = Lock()

    def encode(self, texts: Sequence[str], normalize: bool) -> list[list[float]]:
        with self._lock:
            vectors = self._model.encode(
                list(texts),
                convert_to_numpy=True,
                normalize_embeddings=normalize,
                show_progress_bar=False,
            )
        return np.asarray(vectors, dtype=np.float32).tolist()


def load_backend(model_id: str) -> ModelBackend:
    if model_id.startswith("debug-hash"):
        suffix = model_id.rsplit("-", 1)[-1]
        dim = int(suffix) if suffix.isdigit() else 384
        return HashBackend(model_id, dim)
    return SentenceTransformerBackend(model_id)
