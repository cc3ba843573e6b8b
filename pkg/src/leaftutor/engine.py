"""Prompt assembly and the tutoring turn pipeline.

The engine enforces a guide-don't-solve policy: prompts are assembled from
fixed-order labeled sections under hard character budgets, sample-solution
text is withheld unless an instructor opts out, and every answered student
turn is recorded as exactly one tutoring event.
"""

from __future__ import annotations

import threading
from collections import defaultdict
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .domain import (
    ChatTurn,
    Material,
    MaterialKind,
    Role,
    TutorEvent,
    TutorSession,
    new_id,
    utcnow,
)
from .errors import EmptyQuery, NotFound, SessionBusy, TutorError, UnknownSession
from .providers import DEFAULT_DEADLINE_S, LlmProvider
from .retrieval import Retriever, RetrievalQuery, ScoredChunk
from .storage import Store

DEFAULT_CONTEXT_BUDGET_CHARS = 16_000
DEFAULT_RETRIEVAL_BUDGET_CHARS = 6_000

SECTION_LABELS = ("INSTRUCTIONS", "RETRIEVED", "CODE", "EXECUTION", "HISTORY")

TRUNCATION_MARKER = "\n[truncated to fit the context budget]"
SOLUTION_WITHHELD_LINE = "[solution withheld by policy]"

DEFAULT_DIRECTIVES = (
    "Guide the student one step at a time; explain the next step, never the full solution.",
    "Ask a clarifying question whenever the student's goal or error is ambiguous.",
    "Ground every explanation in the provided course materials and say which file or section you used.",
    "When execution output is present, interpret it before proposing any change.",
    "Encourage the student to make the edit themselves and re-run the code.",
)

# Versioned verbatim so prompt bundles are reproducible; bump the version
# when the wording changes and update the snapshot test.
SYSTEM_TEMPLATE_VERSION = 1
SYSTEM_TEMPLATE = """\
You are a patient programming tutor working with a student on a course
assignment. Tutoring rules, in priority order:
{directives}
Context sections follow. INSTRUCTIONS holds the assignment text, RETRIEVED
holds course material excerpts chosen for this question, CODE holds the
student's current files, EXECUTION holds the latest compile/run outcome, and
HISTORY holds the recent conversation."""


@dataclass(frozen=True)
class PedagogicalPolicy:
    directives: tuple = DEFAULT_DIRECTIVES
    forbid_solution_verbatim: bool = True
    max_history_turns: int = 8

    def __post_init__(self):
        if not self.directives:
            raise ValueError("policy must have at least one directive")
        if self.max_history_turns < 0:
            raise ValueError("max_history_turns must be >= 0")


@dataclass(frozen=True)
class PromptBundle:
    system_text: str
    context_sections: tuple  # ((label, text), ...) in SECTION_LABELS order
    user_text: str
    total_chars: int


def render_system_text(policy: PedagogicalPolicy) -> str:
    numbered = "\n".join(
        f"{i}. {rule}" for i, rule in enumerate(policy.directives, start=1)
    )
    return SYSTEM_TEMPLATE.format(directives=numbered)


def _truncate(text: str, limit: int) -> str:
    if len(text) <= limit:
        return text
    if limit <= 0:
        return ""
    if limit <= len(TRUNCATION_MARKER):
        return text[:limit]
    return text[: limit - len(TRUNCATION_MARKER)] + TRUNCATION_MARKER


def render_chunk(chunk_text: str, kind: MaterialKind, filename: str,
                 forbid_solution_verbatim: bool) -> str:
    if kind is MaterialKind.SOLUTION and forbid_solution_verbatim:
        return f"{SOLUTION_WITHHELD_LINE} source file: {filename}\n"
    return chunk_text


def render_execution(result) -> str:
    if result is None:
        return ""
    parts = [f"status: {result.status.value}", f"exit_code: {result.exit_code}"]
    if result.compile_stdout or result.compile_stderr:
        parts.append(f"compile_stdout:\n{result.compile_stdout}")
        parts.append(f"compile_stderr:\n{result.compile_stderr}")
    parts.append(f"run_stdout:\n{result.run_stdout}")
    parts.append(f"run_stderr:\n{result.run_stderr}")
    return "\n".join(parts)


def assemble_prompt(
    session: TutorSession,
    query: str,
    retrieved: Sequence[ScoredChunk],
    policy: PedagogicalPolicy,
    *,
    instruction_materials: Sequence[Material] = (),
    materials_by_id: Optional[dict] = None,
    context_budget_chars: int = DEFAULT_CONTEXT_BUDGET_CHARS,
    retrieval_budget_chars: int = DEFAULT_RETRIEVAL_BUDGET_CHARS,
) -> PromptBundle:
    """Deterministically assemble the provider prompt.

    Sections are filled in fixed priority order (INSTRUCTIONS, RETRIEVED,
    CODE, EXECUTION, HISTORY) against the remaining character budget, so the
    bundle can never exceed ``context_budget_chars``. Retrieved chunks are
    packed whole in rank order and dropped from the first one that would
    overflow the retrieval budget; chunks are never split.
    """
    if not query:
        raise EmptyQuery("query must be non-empty")
    materials_by_id = materials_by_id or {}

    system_text = render_system_text(policy)
    remaining = max(context_budget_chars - len(system_text), 0)
    user_text = _truncate(query, remaining)
    remaining -= len(user_text)

    rendered_chunks = []
    for scored in retrieved:
        material = materials_by_id.get(scored.chunk.material_id)
        kind = material.kind if material else MaterialKind.LECTURE
        filename = material.filename if material else ""
        rendered_chunks.append(
            render_chunk(
                scored.chunk.text, kind, filename, policy.forbid_solution_verbatim
            )
        )

    # INSTRUCTIONS: full text of the assignment's instruction uploads, or a
    # marked prefix when the budget cannot hold them. Room for the top
    # retrieved chunk is reserved first so oversized instructions cannot
    # starve grounding entirely.
    reserve = 0
    if rendered_chunks:
        reserve = min(len(rendered_chunks[0]), retrieval_budget_chars, remaining)
    instructions = "\n\n".join(m.content for m in instruction_materials)
    instructions = _truncate(instructions, remaining - reserve)
    remaining -= len(instructions)

    # RETRIEVED: whole chunks in rank order, dropped (never split) from the
    # first one that would overflow the retrieval budget.
    retrieved_parts = []
    retrieved_total = 0
    retrieval_cap = min(retrieval_budget_chars, remaining)
    for rendered in rendered_chunks:
        if retrieved_total + len(rendered) > retrieval_cap:
            break
        retrieved_parts.append(rendered)
        retrieved_total += len(rendered)
    retrieved_text = "".join(retrieved_parts)
    remaining -= len(retrieved_text)

    code_parts = [
        f"// file: {name}\n{content}\n" for name, content in sorted(session.files.items())
    ]
    code_text = _truncate("".join(code_parts), remaining)
    remaining -= len(code_text)

    execution_text = _truncate(render_execution(session.last_execution), remaining)
    remaining -= len(execution_text)

    history_turns = (
        session.turns[-policy.max_history_turns :] if policy.max_history_turns else ()
    )
    history_text = _truncate(
        "".join(f"{t.role.value}: {t.text}\n" for t in history_turns), remaining
    )

    sections = (
        ("INSTRUCTIONS", instructions),
        ("RETRIEVED", retrieved_text),
        ("CODE", code_text),
        ("EXECUTION", execution_text),
        ("HISTORY", history_text),
    )
    total = len(system_text) + len(user_text) + sum(len(t) for _, t in sections)
    return PromptBundle(
        system_text=system_text,
        context_sections=sections,
        user_text=user_text,
        total_chars=total,
    )


class TutorEngine:
    """Runs the tutoring pipeline: retrieve, assemble, call the provider,
    persist both turns, and log one event per answered student turn."""

    def __init__(
        self,
        store: Store,
        retriever: Retriever,
        provider: LlmProvider,
        policy: Optional[PedagogicalPolicy] = None,
        *,
        retrieval_k: int = 6,
        context_budget_chars: int = DEFAULT_CONTEXT_BUDGET_CHARS,
        retrieval_budget_chars: int = DEFAULT_RETRIEVAL_BUDGET_CHARS,
        provider_deadline_s: float = DEFAULT_DEADLINE_S,
    ):
        self.store = store
        self.retriever = retriever
        self.provider = provider
        self.policy = policy or PedagogicalPolicy()
        self.retrieval_k = retrieval_k
        self.context_budget_chars = context_budget_chars
        self.retrieval_budget_chars = retrieval_budget_chars
        self.provider_deadline_s = provider_deadline_s
        self._guard = threading.Lock()
        self._session_locks: dict[str, threading.Lock] = defaultdict(threading.Lock)

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._guard:
            return self._session_locks[session_id]

    def assemble_for_session(
        self, session: TutorSession, query: str, retrieved: Sequence[ScoredChunk]
    ) -> PromptBundle:
        materials = self.store.list_materials(session.assignment_id)
        return assemble_prompt(
            session,
            query,
            retrieved,
            self.policy,
            instruction_materials=[
                m for m in materials if m.kind is MaterialKind.INSTRUCTIONS
            ],
            materials_by_id={m.material_id: m for m in materials},
            context_budget_chars=self.context_budget_chars,
            retrieval_budget_chars=self.retrieval_budget_chars,
        )

    def tutor_turn(self, session_id: str, query: str) -> ChatTurn:
        """Answer one student query. At most one turn is in flight per
        session; overlapping calls fail fast with SESSION_BUSY."""
        if not query:
            raise EmptyQuery("query must be non-empty")
        lock = self._lock_for(session_id)
        if not lock.acquire(blocking=False):
            raise SessionBusy(f"a turn is already in flight for {session_id}")
        try:
            try:
                session = self.store.get_session(session_id)
            except NotFound:
                raise UnknownSession(session_id) from None
            retrieved = self.retriever.retrieve(
                RetrievalQuery(
                    assignment_id=session.assignment_id,
                    query_text=query,
                    k=self.retrieval_k,
                )
            )
            bundle = self.assemble_for_session(session, query, retrieved)
            student_turn = ChatTurn(
                index=len(session.turns), role=Role.STUDENT, text=query, at=utcnow()
            )
            try:
                reply = self.provider.complete(
                    bundle, deadline_s=self.provider_deadline_s
                )
            except TutorError:
                # The student's question is still part of the transcript even
                # when the provider fails; no event is logged for it.
                self.store.update_session(
                    replace(session, turns=session.turns + (student_turn,))
                )
                raise
            tutor_turn = ChatTurn(
                index=student_turn.index + 1,
                role=Role.TUTOR,
                text=reply,
                at=utcnow(),
            )
            self.store.update_session(
                replace(session, turns=session.turns + (student_turn, tutor_turn))
            )
            self.store.append_event(
                TutorEvent(
                    event_id=new_id(),
                    session_id=session_id,
                    turn_index=student_turn.index,
                    query_text=query,
                    retrieved_chunk_ids=tuple(s.chunk.chunk_id for s in retrieved),
                    prompt_chars=bundle.total_chars,
                    response_chars=len(reply),
                    at=utcnow(),
                )
            )
            return tutor_turn
        finally:
            lock.release()
