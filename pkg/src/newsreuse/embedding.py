"""Sentence vectors: providers, cosine similarity, and the EMB1 binary store.

Two providers satisfy the same contract: a fully deterministic character
n-gram feature-hashing embedder (test/desk-scale runs, no model weights)
and an HTTP client for the external multilingual embedding sidecar. All
providers emit L2-normalized float32 vectors, so cosine similarity reduces
to a dot product.
"""

from __future__ import annotations

import math
import struct
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol, Sequence

import numpy as np
import requests

from .errors import (
    BadMagic,
    DimMismatch,
    EmptyText,
    ProviderUnavailable,
    TruncatedFile,
)

DEFAULT_DIM = 384
DEFAULT_MAX_BATCH = 64

FNV_OFFSET = 14695981039346656037
FNV_PRIME = 1099511628211
_MASK64 = (1 << 64) - 1
_NGRAM_SIZES = (3, 4, 5)


@dataclass(frozen=True)
class EmbeddingMeta:
    provider_id: str
    model_id: str
    dim: int


class VectorStore:
    """Write-once mapping from sentence keys ("article_id#idx") to vectors."""

    def __init__(self, meta: EmbeddingMeta):
        self.meta = meta
        self.entries: dict[str, np.ndarray] = {}

    def add(self, key: str, vector: np.ndarray) -> None:
        vec = np.asarray(vector, dtype=np.float32)
        if vec.ndim != 1 or vec.shape[0] != self.meta.dim:
            raise DimMismatch(
                f"vector for {key!r} has dim {vec.shape}, store expects {self.meta.dim}"
            )
        self.entries[key] = vec

    def get(self, key: str) -> np.ndarray | None:
        return self.entries.get(key)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, key: str) -> bool:
        return key in self.entries


def _fnv1a64(data: bytes) -> int:
    h = FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * FNV_PRIME) & _MASK64
    return h


def hash_embed(text: str, dim: int = DEFAULT_DIM) -> np.ndarray:
    """Deterministic signed feature hashing over character n-grams.

    Lowercase, NFC-normalize, pad with "^"/"$", hash every 3/4/5-gram with
    FNV-1a 64-bit, bucket by ``hash % dim`` with sign from the hash's top
    bit, then L2-normalize. Bit-identical across platforms: signs are
    accumulated as integers and normalized with exact float64 arithmetic.
    """
    if not text.strip():
        raise EmptyText("cannot embed empty text")
    padded = "^" + unicodedata.normalize("NFC", text.lower()) + "$"
    counts = [0] * dim
    for n in _NGRAM_SIZES:
        for i in range(len(padded) - n + 1):
            h = _fnv1a64(padded[i : i + n].encode("utf-8"))
            sign = 1 if (h >> 63) == 0 else -1
            counts[h % dim] += sign
    arr = np.asarray(counts, dtype=np.int64)
    sumsq = int(arr @ arr)
    if sumsq == 0:
        # total sign cancellation; fall back to a fixed unit vector
        arr[0] = 1
        sumsq = 1
    return (arr / math.sqrt(sumsq)).astype(np.float32)


class Provider(Protocol):
    provider_id: str
    model_id: str
    dim: int
    max_batch: int

    def embed(self, texts: Sequence[str]) -> list[np.ndarray]:
        ...


class BuiltinHashProvider:
    """The in-process deterministic embedder."""

    provider_id = "builtin-hash"

    def __init__(self, dim: int = DEFAULT_DIM, max_batch: int = DEFAULT_MAX_BATCH):
        self.dim = dim
        self.max_batch = max_batch
        self.model_id = f"fnv1a-ngram-{dim}"

    def embed(self, texts: Sequence[str]) -> list[np.ndarray]:
        return [hash_embed(t, self.dim) for t in texts]

    def meta(self) -> EmbeddingMeta:
        return EmbeddingMeta(self.provider_id, self.model_id, self.dim)


class SidecarProvider:
    """HTTP client for the embedding sidecar service."""

    provider_id = "sidecar"

    def __init__(
        self,
        url: str,
        dim: int | None = None,
        max_batch: int = DEFAULT_MAX_BATCH,
        timeout: float = 60.0,
    ):
        self.url = url.rstrip("/")
        self.dim = dim if dim is not None else 0  # learned from /info or first response
        self.max_batch = max_batch
        self.timeout = timeout
        self.model_id = ""

    def _refresh_info(self) -> None:
        try:
            resp = requests.get(f"{self.url}/info", timeout=self.timeout)
        except requests.RequestException as exc:
            raise ProviderUnavailable(f"sidecar at {self.url} unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise ProviderUnavailable(f"sidecar /info returned {resp.status_code}")
        info = resp.json()
        self.model_id = info.get("model_id", "")
        if self.dim == 0:
            self.dim = int(info.get("dim", 0))

    def embed(self, texts: Sequence[str]) -> list[np.ndarray]:
        if not self.model_id:
            self._refresh_info()
        try:
            resp = requests.post(
                f"{self.url}/embed",
                json={"texts": list(texts), "normalize": True},
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise ProviderUnavailable(f"sidecar at {self.url} unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise ProviderUnavailable(f"sidecar /embed returned {resp.status_code}: {resp.text[:200]}")
        payload = resp.json()
        got_dim = int(payload["dim"])
        if self.dim and got_dim != self.dim:
            raise DimMismatch(f"sidecar returned dim {got_dim}, expected {self.dim}")
        self.dim = got_dim
        self.model_id = payload.get("model_id", self.model_id)
        vectors = [np.asarray(v, dtype=np.float32) for v in payload["vectors"]]
        for vec in vectors:
            if vec.shape[0] != got_dim:
                raise DimMismatch(f"sidecar vector length {vec.shape[0]} != dim {got_dim}")
        return vectors

    def meta(self) -> EmbeddingMeta:
        if not self.model_id:
            self._refresh_info()
        return EmbeddingMeta(self.provider_id, self.model_id, self.dim)


def embed_batch(texts: Sequence[str], provider: Provider) -> list[np.ndarray]:
    """Embed texts order-preservingly, chunking to the provider's batch limit."""
    out: list[np.ndarray] = []
    limit = max(1, provider.max_batch)
    for i in range(0, len(texts), limit):
        out.extend(provider.embed(texts[i : i + limit]))
    return out


def build_store(keyed_texts: Iterable[tuple[str, str]], provider: Provider) -> VectorStore:
    """Embed (key, text) pairs into a fresh VectorStore."""
    keys, texts = [], []
    for key, text in keyed_texts:
        keys.append(key)
        texts.append(text)
    vectors = embed_batch(texts, provider)
    store = VectorStore(provider.meta())
    for key, vec in zip(keys, vectors):
        store.add(key, vec)
    return store


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Dot product of normalized vectors, clamped to [-1, 1].

    Identical vectors short-circuit to exactly 1.0; the float32 rounding of
    stored unit vectors would otherwise land a hair off the identity value.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimMismatch(f"vector dims differ: {a.shape} vs {b.shape}")
    if np.array_equal(a, b):
        return 1.0
    value = float(np.dot(a.astype(np.float64), b.astype(np.float64)))
    return max(-1.0, min(1.0, value))


# ---------------------------------------------------------------------------
# EMB1 binary store
#
# Layout: magic "EMB1", u32 LE dim, u64 LE count, then per entry a u16 LE
# key byte-length, the UTF-8 key, and dim little-endian IEEE-754 float32s.
# Entries are written in sorted key order so rewriting a freshly read store
# reproduces the file byte for byte. Provider/model ids are not persisted.

MAGIC = b"EMB1"


def store_write(store: VectorStore, path: str | Path) -> None:
    path = Path(path)
    with path.open("wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", store.meta.dim))
        fh.write(struct.pack("<Q", len(store.entries)))
        for key in sorted(store.entries):
            encoded = key.encode("utf-8")
            if len(encoded) > 0xFFFF:
                raise ValueError(f"key too long for EMB1 format: {key[:40]!r}...")
            fh.write(struct.pack("<H", len(encoded)))
            fh.write(encoded)
            fh.write(store.entries[key].astype("<f4").tobytes())


def store_read(path: str | Path) -> VectorStore:
    data = Path(path).read_bytes()
    if len(data) < 4 or data[:4] != MAGIC:
        raise BadMagic(f"{path}: not an EMB1 file")
    offset = 4

    def take(count: int, what: str) -> bytes:
        nonlocal offset
        if offset + count > len(data):
            raise TruncatedFile(f"{path}: truncated while reading {what}")
        chunk = data[offset : offset + count]
        offset += count
        return chunk

    (dim,) = struct.unpack("<I", take(4, "dim"))
    (count,) = struct.unpack("<Q", take(8, "entry count"))
    store = VectorStore(EmbeddingMeta(provider_id="", model_id="", dim=dim))
    for _ in range(count):
        (key_len,) = struct.unpack("<H", take(2, "key length"))
        key = take(key_len, "key").decode("utf-8")
        vec = np.frombuffer(take(4 * dim, f"vector for {key!r}"), dtype="<f4").astype(np.float32)
        if key in store.entries:
            raise TruncatedFile(f"{path}: corrupt store, duplicate key {key!r}")
        store.entries[key] = vec
    if offset != len(data):
        raise TruncatedFile(f"{path}: {len(data) - offset} trailing bytes after last entry")
    return store
