"""Service configuration.

Config is a JSON file; every key has a default so an empty file (or none at
all) yields a fully offline deployment: hash embedder, scripted provider
disabled in favor of the external adapter only if configured, and the
built-in language profiles.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .domain import DEFAULT_MAX_MATERIAL_BYTES
from .embedding import HASH_DIMENSION
from .engine import DEFAULT_CONTEXT_BUDGET_CHARS, DEFAULT_RETRIEVAL_BUDGET_CHARS
from .sandbox import (
    DEFAULT_OUTPUT_CAP_BYTES,
    DEFAULT_WALL_MS,
    DEFAULT_WORKERS,
    LanguageProfile,
)


@dataclass
class ServiceConfig:
    chunk_max_chars: int = 1000
    overlap_chars: int = 200
    embedder_name: str = "hash256"
    embedder_endpoint: Optional[str] = None
    embedding_dimension: int = HASH_DIMENSION
    retrieval_k: int = 6
    context_budget_chars: int = DEFAULT_CONTEXT_BUDGET_CHARS
    retrieval_budget_chars: int = DEFAULT_RETRIEVAL_BUDGET_CHARS
    max_material_bytes: int = DEFAULT_MAX_MATERIAL_BYTES
    forbid_solution_verbatim: bool = True
    max_history_turns: int = 8
    token_ttl_hours: int = 24
    wall_ms: int = DEFAULT_WALL_MS
    output_cap_bytes: int = DEFAULT_OUTPUT_CAP_BYTES
    sandbox_workers: int = DEFAULT_WORKERS
    default_run_profile: str = "script"
    extra_profiles: list = field(default_factory=list)
    provider_name: str = "external"
    provider_script_path: Optional[str] = None
    provider_endpoint: Optional[str] = None
    provider_model: str = "default"
    provider_deadline_s: float = 60.0

    @classmethod
    def from_file(cls, path) -> "ServiceConfig":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw: dict) -> "ServiceConfig":
        cfg = cls()
        for key in (
            "chunk_max_chars",
            "overlap_chars",
            "retrieval_k",
            "context_budget_chars",
            "retrieval_budget_chars",
            "max_material_bytes",
            "forbid_solution_verbatim",
            "max_history_turns",
            "token_ttl_hours",
        ):
            if key in raw:
                setattr(cfg, key, raw[key])
        embedder = raw.get("embedder", {})
        cfg.embedder_name = embedder.get("name", cfg.embedder_name)
        cfg.embedder_endpoint = embedder.get("endpoint", cfg.embedder_endpoint)
        cfg.embedding_dimension = embedder.get("dimension", cfg.embedding_dimension)
        sandbox = raw.get("sandbox", {})
        cfg.wall_ms = sandbox.get("wall_ms", cfg.wall_ms)
        cfg.output_cap_bytes = sandbox.get("output_cap_bytes", cfg.output_cap_bytes)
        cfg.sandbox_workers = sandbox.get("workers", cfg.sandbox_workers)
        cfg.default_run_profile = sandbox.get(
            "default_profile", cfg.default_run_profile
        )
        cfg.extra_profiles = [
            LanguageProfile(
                name=p["name"],
                file_extension=p.get("file_extension", ""),
                compile_cmd=tuple(p.get("compile_cmd", ())),
                run_cmd=tuple(p["run_cmd"]),
                runtime_error_patterns=tuple(p.get("runtime_error_patterns", ())),
            )
            for p in sandbox.get("profiles", [])
        ]
        provider = raw.get("provider", {})
        cfg.provider_name = provider.get("name", cfg.provider_name)
        cfg.provider_script_path = provider.get(
            "script_path", cfg.provider_script_path
        )
        cfg.provider_endpoint = provider.get("endpoint", cfg.provider_endpoint)
        cfg.provider_model = provider.get("model", cfg.provider_model)
        cfg.provider_deadline_s = provider.get("deadline_s", cfg.provider_deadline_s)
        return cfg
