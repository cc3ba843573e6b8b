"""Assignment-scoped top-k similarity search over stored chunks.

The index is a flat exhaustive scan: at desk scale (thousands of chunks)
exact scoring is cheap and keeps retrieval equal to a brute-force oracle.
Scores are cosine similarities, which reduce to dot products because stored
vectors are unit-normalized; ties break on chunk_id so rankings are
reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .domain import Chunk, MaterialKind
from .embedding import Embedder, cosine
from .errors import NotFound, UnknownAssignment
from .storage import Store


@dataclass(frozen=True)
class RetrievalQuery:
    assignment_id: str
    query_text: str
    k: int = 6
    kind_filter: Optional[frozenset] = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")


@dataclass(frozen=True)
class ScoredChunk:
    chunk: Chunk
    score: float


class Retriever:
    def __init__(self, store: Store, embedder: Embedder):
        self.store = store
        self.embedder = embedder

    def retrieve(self, q: RetrievalQuery) -> list[ScoredChunk]:
        """Exact top-k by (score desc, chunk_id asc) among the assignment's
        chunks, optionally filtered by material kind. Chunks from other
        assignments never appear."""
        try:
            self.store.get_assignment(q.assignment_id)
        except NotFound:
            raise UnknownAssignment(q.assignment_id) from None
        query_vector = self.embedder.embed(q.query_text)
        scored = []
        for chunk in self.store.all_chunks():
            material = self.store.get_material(chunk.material_id)
            if material.assignment_id != q.assignment_id:
                continue
            if q.kind_filter is not None and material.kind not in q.kind_filter:
                continue
            scored.append(ScoredChunk(chunk, cosine(query_vector, chunk.vector)))
        scored.sort(key=lambda sc: (-sc.score, sc.chunk.chunk_id))
        return scored[: q.k]

    def remove_material(self, material_id: str) -> int:
        """Drop all chunks of a material from the index; 0 for unknown ids."""
        return self.store.remove_chunks_for_material(material_id)

    def material_kind(self, chunk: Chunk) -> MaterialKind:
        return self.store.get_material(chunk.material_id).kind
