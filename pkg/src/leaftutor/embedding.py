"""Text embedders.

The default embedder is fully deterministic and offline: tokens are hashed
into a fixed number of buckets with a keyed hash, counted, and the count
vector is L2-normalized. An external HTTP embedder can be configured instead,
but nothing in the test suite or the default deployment depends on one.
"""

from __future__ import annotations

import hashlib
import math
import re
from typing import Optional, Protocol, Sequence

from .errors import ProviderUnavailable

HASH_DIMENSION = 256

# Keyed so bucket assignment is stable across processes and platforms.
_HASH_KEY = b"leaftutor-hash256-v1"

_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)


class Embedder(Protocol):
    name: str
    dimension: int

    def embed(self, text: str) -> tuple: ...


def _bucket(token: str, dimension: int) -> int:
    digest = hashlib.blake2b(
        token.encode("utf-8"), digest_size=8, key=_HASH_KEY
    ).digest()
    return int.from_bytes(digest, "big") % dimension


class HashEmbedder:
    """Feature-hash embedder: lowercase, split on non-alphanumerics, hash
    each token into a bucket, count, L2-normalize. Empty token set yields
    the all-zeros vector."""

    name = "hash256"

    def __init__(self, dimension: int = HASH_DIMENSION):
        if dimension < 1:
            raise ValueError("dimension must be >= 1")
        self.dimension = dimension

    def embed(self, text: str) -> tuple:
        counts = [0.0] * self.dimension
        for token in _TOKEN.findall(text.lower()):
            counts[_bucket(token, self.dimension)] += 1.0
        norm = math.sqrt(sum(c * c for c in counts))
        if norm == 0.0:
            return tuple(counts)
        return tuple(c / norm for c in counts)


class ExternalEmbedder:
    """HTTP embedder adapter: POSTs ``{"text": ...}`` and expects
    ``{"vector": [...]}`` back. Vectors are re-normalized locally so the
    store's unit-norm invariant holds regardless of the provider."""

    name = "external"

    def __init__(self, endpoint: str, dimension: int = HASH_DIMENSION):
        self.endpoint = endpoint
        self.dimension = dimension

    def embed(self, text: str) -> tuple:
        import httpx

        try:
            response = httpx.post(self.endpoint, json={"text": text}, timeout=30.0)
            response.raise_for_status()
            vector = response.json()["vector"]
        except Exception as exc:
            raise ProviderUnavailable(f"embedding endpoint failed: {exc}") from exc
        if len(vector) != self.dimension:
            raise ProviderUnavailable(
                f"embedding endpoint returned dimension {len(vector)}, "
                f"expected {self.dimension}"
            )
        norm = math.sqrt(sum(float(x) * float(x) for x in vector))
        if norm == 0.0:
            return tuple(float(x) for x in vector)
        return tuple(float(x) / norm for x in vector)


def build_embedder(
    name: str = "hash256",
    endpoint: Optional[str] = None,
    dimension: int = HASH_DIMENSION,
) -> Embedder:
    if name == "hash256":
        return HashEmbedder(dimension)
    if name == "external":
        if not endpoint:
            raise ValueError("external embedder requires an endpoint")
        return ExternalEmbedder(endpoint, dimension)
    raise ValueError(f"unknown embedder: {name!r}")


def cosine(a: Sequence[float], b: Sequence[float]) -> float:
    """Dot product of unit vectors, clamped to [-1, 1]. Zero vectors score
    0 by convention (their dot product already is)."""
    score = 0.0
    for x, y in zip(a, b):
        score += x * y
    return max(-1.0, min(1.0, score))
