"""Shared record types, identifiers, and validation rules.

All records are immutable values: mutation happens by building a new value
(``dataclasses.replace``) and handing it back to the store. Every persisted
type round-trips through ``to_dict``/``from_dict`` with lowercase snake_case
keys; enums serialize as their uppercase names.
"""

from __future__ import annotations

import hashlib
import secrets
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Mapping, Optional

from .errors import NotText, TooLarge, UnsupportedKind

# Crockford base32, lowercased: URL-safe and unambiguous when read aloud.
_ID_ALPHABET = "0123456789abcdefghjkmnpqrstvwxyz"
ID_LENGTH = 26

DEFAULT_MAX_MATERIAL_BYTES = 2 * 1024 * 1024


def new_id() -> str:
    """Random 26-character URL-safe identifier (130 bits of entropy)."""
    return "".join(secrets.choice(_ID_ALPHABET) for _ in range(ID_LENGTH))


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


def content_hash(text: str) -> str:
    """Hex digest derived deterministically from the content bytes."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _dt_to_json(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).isoformat()


def _dt_from_json(raw: str) -> datetime:
    return datetime.fromisoformat(raw)


class MaterialKind(Enum):
    """The four categories an instructor can upload for an assignment."""

    INSTRUCTIONS = "INSTRUCTIONS"
    SOLUTION = "SOLUTION"
    LECTURE = "LECTURE"
    REMARKS = "REMARKS"


class Role(Enum):
    STUDENT = "STUDENT"
    TUTOR = "TUTOR"


class ExecutionStatus(Enum):
    OK = "OK"
    WRONG_OUTPUT = "WRONG_OUTPUT"
    COMPILE_ERROR = "COMPILE_ERROR"
    RUNTIME_ERROR = "RUNTIME_ERROR"
    TIMEOUT = "TIMEOUT"


class PrincipalRole(Enum):
    INSTRUCTOR = "INSTRUCTOR"
    STUDENT = "STUDENT"


@dataclass(frozen=True)
class Course:
    course_id: str
    title: str
    instructor_id: str
    roster: frozenset = field(default_factory=frozenset)

    def to_dict(self) -> dict:
        return {
            "course_id": self.course_id,
            "title": self.title,
            "instructor_id": self.instructor_id,
            "roster": sorted(self.roster),
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Course":
        return cls(
            course_id=d["course_id"],
            title=d["title"],
            instructor_id=d["instructor_id"],
            roster=frozenset(d["roster"]),
        )


@dataclass(frozen=True)
class Assignment:
    assignment_id: str
    course_id: str
    title: str
    created_at: datetime
    # Optional sample output used by the runner to detect WRONG_OUTPUT;
    # absent means runs are never compared against an expected listing.
    expected_output: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "assignment_id": self.assignment_id,
            "course_id": self.course_id,
            "title": self.title,
            "created_at": _dt_to_json(self.created_at),
            "expected_output": self.expected_output,
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Assignment":
        return cls(
            assignment_id=d["assignment_id"],
            course_id=d["course_id"],
            title=d["title"],
            created_at=_dt_from_json(d["created_at"]),
            expected_output=d.get("expected_output"),
        )


@dataclass(frozen=True)
class Material:
    material_id: str
    assignment_id: str
    kind: MaterialKind
    filename: str
    content: str
    content_hash: str
    uploaded_at: datetime

    def __post_init__(self):
        if self.content_hash != content_hash(self.content):
            raise ValueError("content_hash does not match content")

    def to_dict(self) -> dict:
        return {
            "material_id": self.material_id,
            "assignment_id": self.assignment_id,
            "kind": self.kind.value,
            "filename": self.filename,
            "content": self.content,
            "content_hash": self.content_hash,
            "uploaded_at": _dt_to_json(self.uploaded_at),
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Material":
        return cls(
            material_id=d["material_id"],
            assignment_id=d["assignment_id"],
            kind=MaterialKind(d["kind"]),
            filename=d["filename"],
            content=d["content"],
            content_hash=d["content_hash"],
            uploaded_at=_dt_from_json(d["uploaded_at"]),
        )


@dataclass(frozen=True)
class Chunk:
    """One embedded slice of a material; the unit of retrieval."""

    chunk_id: str
    material_id: str
    seq: int
    text: str
    vector: tuple

    def __post_init__(self):
        if not self.text:
            raise ValueError("chunk text must be non-empty")
        if self.seq < 0:
            raise ValueError("seq must be >= 0")
        norm_sq = sum(x * x for x in self.vector)
        if norm_sq != 0.0 and abs(norm_sq**0.5 - 1.0) > 1e-6:
            raise ValueError("vector must be unit-norm or all zeros")

    def to_dict(self) -> dict:
        return {
            "chunk_id": self.chunk_id,
            "material_id": self.material_id,
            "seq": self.seq,
            "text": self.text,
            "vector": list(self.vector),
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Chunk":
        return cls(
            chunk_id=d["chunk_id"],
            material_id=d["material_id"],
            seq=d["seq"],
            text=d["text"],
            vector=tuple(d["vector"]),
        )


@dataclass(frozen=True)
class ChatTurn:
    index: int
    role: Role
    text: str
    at: datetime

    def __post_init__(self):
        if not self.text:
            raise ValueError("turn text must be non-empty")
        if self.index < 0:
            raise ValueError("turn index must be >= 0")

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "role": self.role.value,
            "text": self.text,
            "at": _dt_to_json(self.at),
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "ChatTurn":
        return cls(
            index=d["index"],
            role=Role(d["role"]),
            text=d["text"],
            at=_dt_from_json(d["at"]),
        )


@dataclass(frozen=True)
class ExecutionResult:
    status: ExecutionStatus
    compile_stdout: str = ""
    compile_stderr: str = ""
    run_stdout: str = ""
    run_stderr: str = ""
    exit_code: Optional[int] = None
    wall_ms: int = 0
    truncated: bool = False

    def __post_init__(self):
        if self.status is ExecutionStatus.COMPILE_ERROR and (
            self.run_stdout or self.run_stderr
        ):
            raise ValueError("COMPILE_ERROR results must have empty run streams")

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "compile_stdout": self.compile_stdout,
            "compile_stderr": self.compile_stderr,
            "run_stdout": self.run_stdout,
            "run_stderr": self.run_stderr,
            "exit_code": self.exit_code,
            "wall_ms": self.wall_ms,
            "truncated": self.truncated,
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "ExecutionResult":
        return cls(
            status=ExecutionStatus(d["status"]),
            compile_stdout=d["compile_stdout"],
            compile_stderr=d["compile_stderr"],
            run_stdout=d["run_stdout"],
            run_stderr=d["run_stderr"],
            exit_code=d["exit_code"],
            wall_ms=d["wall_ms"],
            truncated=d["truncated"],
        )


def validate_turn_order(turns: tuple) -> None:
    """Turns are indexed 0..n-1; the first is the student's, and a tutor turn
    always answers the student turn right before it.

    A provider failure leaves the student turn persisted without an answer,
    so consecutive student turns are allowed; consecutive tutor turns are not.
    """
    for i, turn in enumerate(turns):
        if turn.index != i:
            raise ValueError(f"turn {i} has index {turn.index}")
    if turns and turns[0].role is not Role.STUDENT:
        raise ValueError("first turn must be the student's")
    for prev, cur in zip(turns, turns[1:]):
        if cur.role is Role.TUTOR and prev.role is not Role.STUDENT:
            raise ValueError("tutor turn must follow a student turn")


@dataclass(frozen=True)
class TutorSession:
    session_id: str
    assignment_id: str
    student_id: str
    created_at: datetime
    turns: tuple = ()
    files: Mapping[str, str] = field(default_factory=dict)
    last_execution: Optional[ExecutionResult] = None

    def __post_init__(self):
        validate_turn_order(self.turns)

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "assignment_id": self.assignment_id,
            "student_id": self.student_id,
            "created_at": _dt_to_json(self.created_at),
            "turns": [t.to_dict() for t in self.turns],
            "files": dict(self.files),
            "last_execution": (
                self.last_execution.to_dict() if self.last_execution else None
            ),
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "TutorSession":
        last = d.get("last_execution")
        return cls(
            session_id=d["session_id"],
            assignment_id=d["assignment_id"],
            student_id=d["student_id"],
            created_at=_dt_from_json(d["created_at"]),
            turns=tuple(ChatTurn.from_dict(t) for t in d["turns"]),
            files=dict(d["files"]),
            last_execution=ExecutionResult.from_dict(last) if last else None,
        )


@dataclass(frozen=True)
class TutorEvent:
    """One persisted record per answered student turn (the append-only log)."""

    event_id: str
    session_id: str
    turn_index: int
    query_text: str
    retrieved_chunk_ids: tuple
    prompt_chars: int
    response_chars: int
    at: datetime

    def to_dict(self) -> dict:
        return {
            "event_id": self.event_id,
            "session_id": self.session_id,
            "turn_index": self.turn_index,
            "query_text": self.query_text,
            "retrieved_chunk_ids": list(self.retrieved_chunk_ids),
            "prompt_chars": self.prompt_chars,
            "response_chars": self.response_chars,
            "at": _dt_to_json(self.at),
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "TutorEvent":
        return cls(
            event_id=d["event_id"],
            session_id=d["session_id"],
            turn_index=d["turn_index"],
            query_text=d["query_text"],
            retrieved_chunk_ids=tuple(d["retrieved_chunk_ids"]),
            prompt_chars=d["prompt_chars"],
            response_chars=d["response_chars"],
            at=_dt_from_json(d["at"]),
        )


@dataclass(frozen=True)
class AuthToken:
    token: str
    principal: str
    role: PrincipalRole
    expires_at: datetime

    def to_dict(self) -> dict:
        return {
            "token": self.token,
            "principal": self.principal,
            "role": self.role.value,
            "expires_at": _dt_to_json(self.expires_at),
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "AuthToken":
        return cls(
            token=d["token"],
            principal=d["principal"],
            role=PrincipalRole(d["role"]),
            expires_at=_dt_from_json(d["expires_at"]),
        )


def validate_material_upload(
    kind: str,
    filename: str,
    data: bytes,
    *,
    assignment_id: str = "",
    max_material_bytes: int = DEFAULT_MAX_MATERIAL_BYTES,
) -> Material:
    """Validate an upload and build the (unsaved) Material record.

    ``kind`` is matched case-insensitively against the four upload
    categories. Raises UnsupportedKind, TooLarge, or NotText.
    """
    try:
        parsed_kind = MaterialKind[kind.strip().upper()]
    except KeyError:
        raise UnsupportedKind(f"unsupported material kind: {kind!r}") from None
    if len(data) > max_material_bytes:
        raise TooLarge(
            f"material is {len(data)} bytes; cap is {max_material_bytes}"
        )
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        raise NotText("material must be UTF-8 text") from None
    return Material(
        material_id=new_id(),
        assignment_id=assignment_id,
        kind=parsed_kind,
        filename=filename,
        content=text,
        content_hash=content_hash(text),
        uploaded_at=utcnow(),
    )
