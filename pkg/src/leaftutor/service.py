"""Wires the modules into one runnable service core."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import timedelta
from pathlib import Path
from typing import Optional

from .chunking import ChunkingConfig
from .config import ServiceConfig
from .domain import (
    AuthToken,
    Material,
    PrincipalRole,
    new_id,
    utcnow,
    validate_material_upload,
)
from .embedding import build_embedder
from .engine import PedagogicalPolicy, TutorEngine
from .ingestion import IngestionService
from .providers import ExternalChatProvider, LlmProvider, ScriptedProvider
from .retrieval import Retriever
from .sandbox import Sandbox, default_profiles
from .storage import Store

import secrets


@dataclass
class Runtime:
    """Everything a front door (HTTP, CLI, replay driver) needs."""

    config: ServiceConfig
    store: Store
    ingestion: IngestionService
    retriever: Retriever
    sandbox: Sandbox
    engine: TutorEngine

    # ------------------------------------------------------------------
    # principals

    def issue_token(self, role: PrincipalRole, principal: Optional[str] = None) -> AuthToken:
        token = AuthToken(
            token=secrets.token_urlsafe(32),
            principal=principal or new_id(),
            role=role,
            expires_at=utcnow() + timedelta(hours=self.config.token_ttl_hours),
        )
        self.store.put_token(token)
        return token

    def resolve_token(self, raw: str) -> Optional[AuthToken]:
        token = self.store.get_token(raw)
        if token is None or token.expires_at <= utcnow():
            return None
        return token

    # ------------------------------------------------------------------
    # material upload (validate + dedupe + ingest)

    def upload_material(
        self, assignment_id: str, kind: str, filename: str, data: bytes
    ) -> tuple[Material, int]:
        """Validate, store, and ingest one upload. Returns the material and
        the number of chunks created: 0 when an identical file (same kind and
        content hash) was already ingested. A re-upload of the same kind and
        filename with changed content replaces the older version."""
        self.store.get_assignment(assignment_id)
        material = validate_material_upload(
            kind,
            filename,
            data,
            assignment_id=assignment_id,
            max_material_bytes=self.config.max_material_bytes,
        )
        for existing in self.store.list_materials(assignment_id):
            if (
                existing.kind is material.kind
                and existing.content_hash == material.content_hash
            ):
                self.ingestion.ingest_material(existing)
                return existing, 0
        for existing in self.store.list_materials(assignment_id):
            if existing.kind is material.kind and existing.filename == filename:
                self.store.delete_material(existing.material_id)
        self.store.put_material(material)
        chunks = self.ingestion.ingest_material(material)
        return material, len(chunks)


def build_provider(config: ServiceConfig) -> LlmProvider:
    if config.provider_name == "scripted":
        if not config.provider_script_path:
            raise ValueError("scripted provider requires provider.script_path")
        return ScriptedProvider.from_file(config.provider_script_path)
    return ExternalChatProvider(
        endpoint=config.provider_endpoint or "",
        model=config.provider_model,
    )


def build_runtime(
    store_dir,
    config: Optional[ServiceConfig] = None,
    provider: Optional[LlmProvider] = None,
) -> Runtime:
    config = config or ServiceConfig()
    store = Store(Path(store_dir), dimension=config.embedding_dimension)
    embedder = build_embedder(
        config.embedder_name, config.embedder_endpoint, config.embedding_dimension
    )
    ingestion = IngestionService(
        store,
        embedder,
        ChunkingConfig(config.chunk_max_chars, config.overlap_chars),
    )
    retriever = Retriever(store, embedder)
    sandbox = Sandbox(
        profiles=tuple(default_profiles()) + tuple(config.extra_profiles),
        max_workers=config.sandbox_workers,
    )
    if provider is None:
        provider = build_provider(config)
    engine = TutorEngine(
        store,
        retriever,
        provider,
        PedagogicalPolicy(
            forbid_solution_verbatim=config.forbid_solution_verbatim,
            max_history_turns=config.max_history_turns,
        ),
        retrieval_k=config.retrieval_k,
        context_budget_chars=config.context_budget_chars,
        retrieval_budget_chars=config.retrieval_budget_chars,
        provider_deadline_s=config.provider_deadline_s,
    )
    return Runtime(
        config=config,
        store=store,
        ingestion=ingestion,
        retriever=retriever,
        sandbox=sandbox,
        engine=engine,
    )
