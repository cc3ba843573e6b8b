"""LLM provider adapters.

The engine only needs ``complete(bundle) -> str``. The scripted provider is
the deterministic stand-in used by tests and scenario replays; the external
adapter speaks an HTTP chat-completion style protocol with temperature
pinned to 0 so transcripts stay reproducible.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import TYPE_CHECKING, Mapping, Protocol

from .errors import ProviderTimeout, ProviderUnavailable, ScriptMiss

if TYPE_CHECKING:
    from .engine import PromptBundle

ENDPOINT_ENV = "LEAFTUTOR_LLM_ENDPOINT"
KEY_ENV = "LEAFTUTOR_LLM_KEY"

DEFAULT_DEADLINE_S = 60.0


class LlmProvider(Protocol):
    name: str

    def complete(self, bundle: "PromptBundle", *, deadline_s: float = DEFAULT_DEADLINE_S) -> str: ...


def render_context(bundle: "PromptBundle") -> str:
    """Flatten the bundle's labeled sections into one system-side text block."""
    parts = [bundle.system_text]
    for label, text in bundle.context_sections:
        if text:
            parts.append(f"## {label}\n{text}")
    return "\n\n".join(parts)


class ScriptedProvider:
    """Maps literal substrings of the user text to canned responses.

    Entries are checked in declaration order; the first match wins. No match
    raises SCRIPT_MISS so fixture drift fails loudly instead of producing a
    silently wrong transcript.
    """

    name = "scripted"

    def __init__(self, script):
        if isinstance(script, Mapping):
            self._entries = list(script.items())
        else:
            self._entries = [(m, r) for m, r in script]

    @classmethod
    def from_file(cls, path) -> "ScriptedProvider":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(data)

    def complete(self, bundle, *, deadline_s: float = DEFAULT_DEADLINE_S) -> str:
        for matcher, response in self._entries:
            if matcher in bundle.user_text:
                return response
        raise ScriptMiss(f"no script entry matches: {bundle.user_text[:120]!r}")


class ExternalChatProvider:
    """Adapter for an OpenAI-compatible chat-completion endpoint."""

    name = "external"

    def __init__(
        self,
        endpoint: str = "",
        model: str = "default",
        api_key: str = "",
        temperature: float = 0.0,
    ):
        self.endpoint = endpoint or os.environ.get(ENDPOINT_ENV, "")
        self.api_key = api_key or os.environ.get(KEY_ENV, "")
        self.model = model
        self.temperature = temperature

    def complete(self, bundle, *, deadline_s: float = DEFAULT_DEADLINE_S) -> str:
        import httpx

        if not self.endpoint:
            raise ProviderUnavailable(
                f"no LLM endpoint configured (set {ENDPOINT_ENV})"
            )
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        payload = {
            "model": self.model,
            "temperature": self.temperature,
            "messages": [
                {"role": "system", "content": render_context(bundle)},
                {"role": "user", "content": bundle.user_text},
            ],
        }
        try:
            response = httpx.post(
                self.endpoint, json=payload, headers=headers, timeout=deadline_s
            )
            response.raise_for_status()
        except httpx.TimeoutException as exc:
            raise ProviderTimeout(str(exc)) from exc
        except Exception as exc:
            raise ProviderUnavailable(str(exc)) from exc
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise ProviderUnavailable(f"malformed provider response: {exc}") from exc
