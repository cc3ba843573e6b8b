"""File-backed store for all persisted records.

On-disk layout under the store root:

    store.meta        magic + schema_version + embedding dimension
    courses/          one JSON file per course
    assignments/      one JSON file per assignment
    materials/        one JSON file per material
    sessions/         one JSON file per session
    chunks.vec        header line (magic/version/dimension) + one JSON line
                      per chunk; doubles as the flat vector index
    events.jsonl      append-only tutoring-event log
    tokens.json       bearer tokens issued by the bootstrap CLI

Every write goes through write-temp-then-rename, so a crash mid-write never
leaves a partially visible record. The whole store is loaded into memory at
open; reads are served from memory, writes update memory and disk under one
lock. The event log is append-only by construction: this class exposes no
operation that rewrites or deletes past events.
"""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path
from typing import Iterable, Optional

from .domain import (
    Assignment,
    AuthToken,
    Chunk,
    Course,
    Material,
    TutorEvent,
    TutorSession,
)
from .errors import (
    AtomicWriteFailed,
    Conflict,
    IncompatibleSchema,
    IoFailed,
    NotFound,
)

SCHEMA_VERSION = 1
STORE_MAGIC = "leafstore"
VEC_MAGIC = "leafvec"
VEC_VERSION = 1

_RECORD_DIRS = ("courses", "assignments", "materials", "sessions")


def _write_atomic(path: Path, data: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


class Store:
    def __init__(self, root, *, dimension: int = 256):
        self.root = Path(root)
        self._lock = threading.RLock()
        self._courses: dict[str, Course] = {}
        self._assignments: dict[str, Assignment] = {}
        self._materials: dict[str, Material] = {}
        self._sessions: dict[str, TutorSession] = {}
        self._chunks: dict[str, Chunk] = {}
        self._chunk_order: list[str] = []
        self._events: list[TutorEvent] = []
        self._tokens: dict[str, AuthToken] = {}
        self.dimension = dimension
        self._open()

    # ------------------------------------------------------------------
    # open / load

    def _open(self) -> None:
        meta_path = self.root / "store.meta"
        if meta_path.exists():
            meta = json.loads(meta_path.read_text(encoding="utf-8"))
            if meta.get("magic") != STORE_MAGIC:
                raise IncompatibleSchema(f"{self.root} is not a store")
            if meta["schema_version"] > SCHEMA_VERSION:
                raise IncompatibleSchema(
                    f"store schema_version {meta['schema_version']} is newer "
                    f"than supported {SCHEMA_VERSION}"
                )
            self.schema_version = meta["schema_version"]
            self.dimension = meta.get("dimension", self.dimension)
        else:
            self.root.mkdir(parents=True, exist_ok=True)
            self.schema_version = SCHEMA_VERSION
            _write_atomic(
                meta_path,
                json.dumps(
                    {
                        "magic": STORE_MAGIC,
                        "schema_version": SCHEMA_VERSION,
                        "dimension": self.dimension,
                    }
                ),
            )
        for name in _RECORD_DIRS:
            (self.root / name).mkdir(exist_ok=True)
        self._load_records()
        self._load_chunks()
        self._load_events()
        self._load_tokens()

    def _load_records(self) -> None:
        loaders = {
            "courses": (Course.from_dict, self._courses, "course_id"),
            "assignments": (Assignment.from_dict, self._assignments, "assignment_id"),
            "materials": (Material.from_dict, self._materials, "material_id"),
            "sessions": (TutorSession.from_dict, self._sessions, "session_id"),
        }
        for name, (parse, table, key) in loaders.items():
            for path in sorted((self.root / name).glob("*.json")):
                record = parse(json.loads(path.read_text(encoding="utf-8")))
                table[getattr(record, key)] = record

    def _load_chunks(self) -> None:
        path = self.root / "chunks.vec"
        if not path.exists():
            return
        with open(path, encoding="utf-8") as fh:
            header = json.loads(fh.readline())
            if header.get("magic") != VEC_MAGIC:
                raise IncompatibleSchema("chunks.vec has wrong magic")
            if header["version"] > VEC_VERSION:
                raise IncompatibleSchema(
                    f"chunks.vec version {header['version']} is newer than "
                    f"supported {VEC_VERSION}"
                )
            self.dimension = header.get("dimension", self.dimension)
            for line in fh:
                if not line.strip():
                    continue
                chunk = Chunk.from_dict(json.loads(line))
                self._chunks[chunk.chunk_id] = chunk
                self._chunk_order.append(chunk.chunk_id)

    def _load_events(self) -> None:
        path = self.root / "events.jsonl"
        if not path.exists():
            return
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    self._events.append(TutorEvent.from_dict(json.loads(line)))
                except (json.JSONDecodeError, KeyError):
                    # A torn final line from a crash mid-append is ignored.
                    continue

    def _load_tokens(self) -> None:
        path = self.root / "tokens.json"
        if not path.exists():
            return
        for raw in json.loads(path.read_text(encoding="utf-8")):
            token = AuthToken.from_dict(raw)
            self._tokens[token.token] = token

    # ------------------------------------------------------------------
    # generic record helpers

    def _save_record(self, dirname: str, record_id: str, payload: dict) -> None:
        try:
            _write_atomic(
                self.root / dirname / f"{record_id}.json",
                json.dumps(payload, ensure_ascii=False),
            )
        except OSError as exc:
            raise IoFailed(f"writing {dirname}/{record_id}: {exc}") from exc

    # ------------------------------------------------------------------
    # courses

    def put_course(self, course: Course) -> None:
        with self._lock:
            if course.course_id in self._courses:
                raise Conflict(f"course {course.course_id} already exists")
            self._save_record("courses", course.course_id, course.to_dict())
            self._courses[course.course_id] = course

    def update_course(self, course: Course) -> None:
        with self._lock:
            if course.course_id not in self._courses:
                raise NotFound(f"course {course.course_id}")
            self._save_record("courses", course.course_id, course.to_dict())
            self._courses[course.course_id] = course

    def get_course(self, course_id: str) -> Course:
        with self._lock:
            try:
                return self._courses[course_id]
            except KeyError:
                raise NotFound(f"course {course_id}") from None

    def list_courses(self) -> list[Course]:
        with self._lock:
            return sorted(self._courses.values(), key=lambda c: c.course_id)

    # ------------------------------------------------------------------
    # assignments

    def put_assignment(self, assignment: Assignment) -> None:
        with self._lock:
            if assignment.assignment_id in self._assignments:
                raise Conflict(f"assignment {assignment.assignment_id} already exists")
            if assignment.course_id not in self._courses:
                raise NotFound(f"course {assignment.course_id}")
            self._save_record(
                "assignments", assignment.assignment_id, assignment.to_dict()
            )
            self._assignments[assignment.assignment_id] = assignment

    def get_assignment(self, assignment_id: str) -> Assignment:
        with self._lock:
            try:
                return self._assignments[assignment_id]
            except KeyError:
                raise NotFound(f"assignment {assignment_id}") from None

    def list_assignments(self, course_id: Optional[str] = None) -> list[Assignment]:
        with self._lock:
            records = [
                a
                for a in self._assignments.values()
                if course_id is None or a.course_id == course_id
            ]
            return sorted(records, key=lambda a: (a.created_at, a.assignment_id))

    # ------------------------------------------------------------------
    # materials

    def put_material(self, material: Material) -> None:
        with self._lock:
            if material.material_id in self._materials:
                raise Conflict(f"material {material.material_id} already exists")
            if material.assignment_id not in self._assignments:
                raise NotFound(f"assignment {material.assignment_id}")
            self._save_record("materials", material.material_id, material.to_dict())
            self._materials[material.material_id] = material

    def get_material(self, material_id: str) -> Material:
        with self._lock:
            try:
                return self._materials[material_id]
            except KeyError:
                raise NotFound(f"material {material_id}") from None

    def list_materials(self, assignment_id: Optional[str] = None) -> list[Material]:
        with self._lock:
            records = [
                m
                for m in self._materials.values()
                if assignment_id is None or m.assignment_id == assignment_id
            ]
            return sorted(records, key=lambda m: (m.uploaded_at, m.material_id))

    def delete_material(self, material_id: str) -> None:
        """Remove a material record and its chunks (re-upload replacement)."""
        with self._lock:
            if material_id not in self._materials:
                return
            self.remove_chunks_for_material(material_id)
            path = self.root / "materials" / f"{material_id}.json"
            try:
                path.unlink(missing_ok=True)
            except OSError as exc:
                raise IoFailed(f"deleting material {material_id}: {exc}") from exc
            del self._materials[material_id]

    # ------------------------------------------------------------------
    # sessions

    def put_session(self, session: TutorSession) -> None:
        with self._lock:
            if session.session_id in self._sessions:
                raise Conflict(f"session {session.session_id} already exists")
            if session.assignment_id not in self._assignments:
                raise NotFound(f"assignment {session.assignment_id}")
            self._save_record("sessions", session.session_id, session.to_dict())
            self._sessions[session.session_id] = session

    def update_session(self, session: TutorSession) -> None:
        with self._lock:
            if session.session_id not in self._sessions:
                raise NotFound(f"session {session.session_id}")
            self._save_record("sessions", session.session_id, session.to_dict())
            self._sessions[session.session_id] = session

    def get_session(self, session_id: str) -> TutorSession:
        with self._lock:
            try:
                return self._sessions[session_id]
            except KeyError:
                raise NotFound(f"session {session_id}") from None

    def list_sessions(self, assignment_id: Optional[str] = None) -> list[TutorSession]:
        with self._lock:
            records = [
                s
                for s in self._sessions.values()
                if assignment_id is None or s.assignment_id == assignment_id
            ]
            return sorted(records, key=lambda s: (s.created_at, s.session_id))

    # ------------------------------------------------------------------
    # chunks (the flat vector file)

    def _flush_chunks(self) -> None:
        lines = [
            json.dumps(
                {"magic": VEC_MAGIC, "version": VEC_VERSION, "dimension": self.dimension}
            )
        ]
        for chunk_id in self._chunk_order:
            lines.append(json.dumps(self._chunks[chunk_id].to_dict(), ensure_ascii=False))
        try:
            _write_atomic(self.root / "chunks.vec", "\n".join(lines) + "\n")
        except OSError as exc:
            raise AtomicWriteFailed(f"writing chunks.vec: {exc}") from exc

    def put_chunks(self, material_id: str, chunks: Iterable[Chunk]) -> None:
        """Persist all chunks of one material in a single atomic write."""
        chunks = list(chunks)
        with self._lock:
            if material_id not in self._materials:
                raise NotFound(f"material {material_id}")
            for chunk in chunks:
                if chunk.material_id != material_id:
                    raise ValueError("chunk does not belong to the material")
                if len(chunk.vector) != self.dimension:
                    raise ValueError(
                        f"vector dimension {len(chunk.vector)} != store "
                        f"dimension {self.dimension}"
                    )
                if chunk.chunk_id in self._chunks:
                    raise Conflict(f"chunk {chunk.chunk_id} already exists")
            added = [c.chunk_id for c in chunks]
            for chunk in chunks:
                self._chunks[chunk.chunk_id] = chunk
            self._chunk_order.extend(added)
            try:
                self._flush_chunks()
            except AtomicWriteFailed:
                for chunk_id in added:
                    del self._chunks[chunk_id]
                del self._chunk_order[-len(added) :]
                raise

    def chunks_for_material(self, material_id: str) -> list[Chunk]:
        with self._lock:
            found = [
                self._chunks[cid]
                for cid in self._chunk_order
                if self._chunks[cid].material_id == material_id
            ]
            return sorted(found, key=lambda c: c.seq)

    def remove_chunks_for_material(self, material_id: str) -> int:
        with self._lock:
            removed = [
                cid
                for cid in self._chunk_order
                if self._chunks[cid].material_id == material_id
            ]
            if not removed:
                return 0
            for cid in removed:
                del self._chunks[cid]
            self._chunk_order = [c for c in self._chunk_order if c in self._chunks]
            self._flush_chunks()
            return len(removed)

    def all_chunks(self) -> list[Chunk]:
        with self._lock:
            return [self._chunks[cid] for cid in self._chunk_order]

    # ------------------------------------------------------------------
    # event log (append-only)

    def append_event(self, event: TutorEvent) -> None:
        with self._lock:
            line = json.dumps(event.to_dict(), ensure_ascii=False)
            try:
                with open(self.root / "events.jsonl", "a", encoding="utf-8") as fh:
                    fh.write(line + "\n")
                    fh.flush()
                    os.fsync(fh.fileno())
            except OSError as exc:
                raise IoFailed(f"appending event: {exc}") from exc
            self._events.append(event)

    def events(self, session_id: Optional[str] = None) -> list[TutorEvent]:
        with self._lock:
            if session_id is None:
                return list(self._events)
            return [e for e in self._events if e.session_id == session_id]

    def events_for_assignment(self, assignment_id: str) -> list[TutorEvent]:
        with self._lock:
            session_ids = {
                s.session_id
                for s in self._sessions.values()
                if s.assignment_id == assignment_id
            }
            return [e for e in self._events if e.session_id in session_ids]

    # ------------------------------------------------------------------
    # auth tokens

    def put_token(self, token: AuthToken) -> None:
        with self._lock:
            self._tokens[token.token] = token
            payload = json.dumps([t.to_dict() for t in self._tokens.values()])
            try:
                _write_atomic(self.root / "tokens.json", payload)
            except OSError as exc:
                raise IoFailed(f"writing tokens: {exc}") from exc

    def get_token(self, token: str) -> Optional[AuthToken]:
        with self._lock:
            return self._tokens.get(token)
