"""Turning persisted materials into embedded, stored chunks."""

from __future__ import annotations

import threading
from collections import defaultdict

from .chunking import ChunkingConfig, chunk_text
from .domain import Chunk, Material, new_id
from .embedding import Embedder
from .storage import Store


class IngestionService:
    """Chunks and embeds materials into the store.

    Re-ingesting a material whose content hash is unchanged is a no-op
    (instructors re-upload files; the content hash is the identity of the
    text). Ingestion of the same material is serialized; distinct materials
    may be ingested concurrently.
    """

    def __init__(self, store: Store, embedder: Embedder, cfg: ChunkingConfig = None):
        self.store = store
        self.embedder = embedder
        self.cfg = cfg or ChunkingConfig()
        self._guard = threading.Lock()
        self._material_locks: dict[str, threading.Lock] = defaultdict(threading.Lock)

    def _lock_for(self, material_id: str) -> threading.Lock:
        with self._guard:
            return self._material_locks[material_id]

    def ingest_material(self, material: Material) -> list[Chunk]:
        """Chunk and embed one persisted material; all chunks land in a
        single atomic write. Returns the material's chunks (existing ones
        when the call is a no-op)."""
        with self._lock_for(material.material_id):
            existing = self.store.chunks_for_material(material.material_id)
            if existing:
                # Material records are immutable, so chunks present means the
                # same content hash was already ingested.
                return existing
            chunks = [
                Chunk(
                    chunk_id=new_id(),
                    material_id=material.material_id,
                    seq=seq,
                    text=text,
                    vector=self.embedder.embed(text),
                )
                for seq, text in enumerate(chunk_text(material.content, self.cfg))
            ]
            self.store.put_chunks(material.material_id, chunks)
            return chunks
