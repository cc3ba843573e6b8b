"""HTTP surface binding the service core into the instructor/student workflow.

All endpoints live under /api and speak JSON (uploads are multipart). Every
mutating endpoint requires a bearer token whose role authorizes it; see
docs/api.md for the full contract. Chat is request/response: the client
polls the transcript, the server serializes turns per session and answers
overlapping messages with 409.
"""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path, PurePosixPath
from typing import Optional

from fastapi import Depends, FastAPI, File, Form, Header, Request, UploadFile
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .domain import (
    Assignment,
    AuthToken,
    Course,
    PrincipalRole,
    TutorSession,
    new_id,
    utcnow,
)
from .errors import TutorError
from .sandbox import ExecutionJob, ExecutionLimits, check_filename
from .service import Runtime

_STATUS_BY_CODE = {
    "UNSUPPORTED_KIND": 422,
    "EMPTY_QUERY": 422,
    "VALIDATION": 422,
    "NOT_TEXT": 415,
    "TOO_LARGE": 413,
    "NOT_FOUND": 404,
    "UNKNOWN_ASSIGNMENT": 404,
    "UNKNOWN_SESSION": 404,
    "UNKNOWN_PROFILE": 404,
    "SESSION_BUSY": 409,
    "CONFLICT": 409,
    "DUPLICATE_PROFILE": 409,
    "PROVIDER_UNAVAILABLE": 502,
    "SCRIPT_MISS": 502,
    "PROVIDER_TIMEOUT": 504,
    "TOOLCHAIN_MISSING": 503,
}


class HttpError(Exception):
    def __init__(self, status: int, code: str, detail: str = ""):
        self.status = status
        self.code = code
        self.detail = detail or code


class CourseIn(BaseModel):
    title: str


class RosterIn(BaseModel):
    student_id: str


class AssignmentIn(BaseModel):
    title: str
    expected_output: Optional[str] = None


class SessionFileIn(BaseModel):
    filename: str
    content: str


class MessageIn(BaseModel):
    text: str


class RunIn(BaseModel):
    entrypoint: Optional[str] = None
    profile: Optional[str] = None
    stdin_text: Optional[str] = None


def create_app(runtime: Runtime, frontend_dir=None) -> FastAPI:
    app = FastAPI(title="leaftutor", docs_url=None, redoc_url=None)

    # ------------------------------------------------------------------
    # auth

    def require_token(authorization: Optional[str] = Header(default=None)) -> AuthToken:
        if not authorization or not authorization.startswith("Bearer "):
            raise HttpError(401, "UNAUTHORIZED", "missing bearer token")
        token = runtime.resolve_token(authorization[len("Bearer ") :])
        if token is None:
            raise HttpError(401, "UNAUTHORIZED", "unknown or expired token")
        return token

    def require_instructor(token: AuthToken = Depends(require_token)) -> AuthToken:
        if token.role is not PrincipalRole.INSTRUCTOR:
            raise HttpError(403, "FORBIDDEN", "instructor token required")
        return token

    def require_student(token: AuthToken = Depends(require_token)) -> AuthToken:
        if token.role is not PrincipalRole.STUDENT:
            raise HttpError(403, "FORBIDDEN", "student token required")
        return token

    def owned_course(course_id: str, token: AuthToken) -> Course:
        course = runtime.store.get_course(course_id)
        if course.instructor_id != token.principal:
            raise HttpError(403, "FORBIDDEN", "not the course instructor")
        return course

    def owned_assignment(assignment_id: str, token: AuthToken) -> Assignment:
        assignment = runtime.store.get_assignment(assignment_id)
        owned_course(assignment.course_id, token)
        return assignment

    def owned_session(session_id: str, token: AuthToken) -> TutorSession:
        session = runtime.store.get_session(session_id)
        if session.student_id != token.principal:
            raise HttpError(403, "FORBIDDEN", "not the session owner")
        return session

    # ------------------------------------------------------------------
    # error mapping

    @app.exception_handler(HttpError)
    async def _http_error(_request: Request, exc: HttpError):
        return JSONResponse(
            status_code=exc.status, content={"error": exc.code, "detail": exc.detail}
        )

    @app.exception_handler(TutorError)
    async def _tutor_error(_request: Request, exc: TutorError):
        status = _STATUS_BY_CODE.get(exc.code, 500)
        return JSONResponse(
            status_code=status, content={"error": exc.code, "detail": str(exc)}
        )

    # ------------------------------------------------------------------
    # identity

    @app.get("/api/me")
    def whoami(token: AuthToken = Depends(require_token)):
        return {"principal": token.principal, "role": token.role.value}

    # ------------------------------------------------------------------
    # courses and rosters

    @app.post("/api/courses", status_code=201)
    def create_course(body: CourseIn, token: AuthToken = Depends(require_instructor)):
        course = Course(
            course_id=new_id(), title=body.title, instructor_id=token.principal
        )
        runtime.store.put_course(course)
        return course.to_dict()

    @app.get("/api/courses")
    def list_courses(token: AuthToken = Depends(require_token)):
        courses = runtime.store.list_courses()
        if token.role is PrincipalRole.INSTRUCTOR:
            visible = [c for c in courses if c.instructor_id == token.principal]
        else:
            visible = [c for c in courses if token.principal in c.roster]
        return {"courses": [c.to_dict() for c in visible]}

    @app.post("/api/courses/{course_id}/roster", status_code=201)
    def add_to_roster(
        course_id: str,
        body: RosterIn,
        token: AuthToken = Depends(require_instructor),
    ):
        course = owned_course(course_id, token)
        updated = Course(
            course_id=course.course_id,
            title=course.title,
            instructor_id=course.instructor_id,
            roster=course.roster | {body.student_id},
        )
        runtime.store.update_course(updated)
        return updated.to_dict()

    @app.post("/api/courses/{course_id}/assignments", status_code=201)
    def create_assignment(
        course_id: str,
        body: AssignmentIn,
        token: AuthToken = Depends(require_instructor),
    ):
        owned_course(course_id, token)
        assignment = Assignment(
            assignment_id=new_id(),
            course_id=course_id,
            title=body.title,
            created_at=utcnow(),
            expected_output=body.expected_output,
        )
        runtime.store.put_assignment(assignment)
        return assignment.to_dict()

    @app.get("/api/courses/{course_id}/assignments")
    def list_assignments(course_id: str, token: AuthToken = Depends(require_token)):
        course = runtime.store.get_course(course_id)
        if token.role is PrincipalRole.INSTRUCTOR:
            if course.instructor_id != token.principal:
                raise HttpError(403, "FORBIDDEN", "not the course instructor")
        elif token.principal not in course.roster:
            raise HttpError(403, "FORBIDDEN", "not enrolled in this course")
        assignments = runtime.store.list_assignments(course_id)
        return {"assignments": [a.to_dict() for a in assignments]}

    # ------------------------------------------------------------------
    # materials

    @app.post("/api/assignments/{assignment_id}/materials", status_code=201)
    async def upload_material(
        assignment_id: str,
        kind: str = Form(...),
        file: UploadFile = File(...),
        token: AuthToken = Depends(require_instructor),
    ):
        owned_assignment(assignment_id, token)
        data = await file.read()
        material, chunks_created = runtime.upload_material(
            assignment_id, kind, file.filename or "upload.txt", data
        )
        payload = material.to_dict()
        payload["chunks_created"] = chunks_created
        return payload

    @app.get("/api/assignments/{assignment_id}/materials")
    def list_materials(
        assignment_id: str, token: AuthToken = Depends(require_instructor)
    ):
        owned_assignment(assignment_id, token)
        materials = runtime.store.list_materials(assignment_id)
        return {
            "materials": [
                {k: v for k, v in m.to_dict().items() if k != "content"}
                for m in materials
            ]
        }

    # ------------------------------------------------------------------
    # sessions

    @app.post("/api/assignments/{assignment_id}/sessions", status_code=201)
    def create_session(
        assignment_id: str, token: AuthToken = Depends(require_student)
    ):
        assignment = runtime.store.get_assignment(assignment_id)
        course = runtime.store.get_course(assignment.course_id)
        if token.principal not in course.roster:
            raise HttpError(403, "FORBIDDEN", "not enrolled in this course")
        session = TutorSession(
            session_id=new_id(),
            assignment_id=assignment_id,
            student_id=token.principal,
            created_at=utcnow(),
        )
        runtime.store.put_session(session)
        return session.to_dict()

    @app.post("/api/sessions/{session_id}/files")
    def put_session_file(
        session_id: str,
        body: SessionFileIn,
        token: AuthToken = Depends(require_student),
    ):
        session = owned_session(session_id, token)
        try:
            check_filename(body.filename)
        except ValueError as exc:
            raise HttpError(422, "VALIDATION", str(exc)) from None
        files = dict(session.files)
        files[body.filename] = body.content
        runtime.store.update_session(replace(session, files=files))
        return {"session_id": session_id, "files": sorted(files)}

    @app.post("/api/sessions/{session_id}/messages")
    def post_message(
        session_id: str,
        body: MessageIn,
        token: AuthToken = Depends(require_student),
    ):
        owned_session(session_id, token)
        turn = runtime.engine.tutor_turn(session_id, body.text)
        return turn.to_dict()

    @app.post("/api/sessions/{session_id}/run")
    def run_session_code(
        session_id: str,
        body: Optional[RunIn] = None,
        token: AuthToken = Depends(require_student),
    ):
        body = body or RunIn()
        session = owned_session(session_id, token)
        if not session.files:
            raise HttpError(422, "VALIDATION", "session has no files to run")
        profile_name = body.profile or runtime.config.default_run_profile
        profile = runtime.sandbox.get_profile(profile_name)
        entrypoint = body.entrypoint or _infer_entrypoint(
            session.files, profile.file_extension
        )
        if entrypoint is None:
            raise HttpError(
                422, "VALIDATION", "cannot infer entrypoint; pass one explicitly"
            )
        assignment = runtime.store.get_assignment(session.assignment_id)
        job = ExecutionJob(
            files=dict(session.files),
            entrypoint=entrypoint,
            profile=profile_name,
            stdin_text=body.stdin_text,
            expected_output=assignment.expected_output,
            limits=ExecutionLimits(
                wall_ms=runtime.config.wall_ms,
                output_cap_bytes=runtime.config.output_cap_bytes,
            ),
        )
        result = runtime.sandbox.submit(job).result()
        runtime.store.update_session(replace(session, last_execution=result))
        return result.to_dict()

    @app.get("/api/sessions/{session_id}/transcript")
    def get_transcript(session_id: str, token: AuthToken = Depends(require_token)):
        session = runtime.store.get_session(session_id)
        if token.role is PrincipalRole.STUDENT:
            if session.student_id != token.principal:
                raise HttpError(403, "FORBIDDEN", "not the session owner")
        else:
            assignment = runtime.store.get_assignment(session.assignment_id)
            owned_course(assignment.course_id, token)
        return {
            "session_id": session_id,
            "turns": [t.to_dict() for t in session.turns],
            "last_execution": (
                session.last_execution.to_dict() if session.last_execution else None
            ),
            "events": [e.to_dict() for e in runtime.store.events(session_id)],
        }

    # ------------------------------------------------------------------
    # event log

    @app.get("/api/assignments/{assignment_id}/events")
    def list_events(
        assignment_id: str,
        cursor: int = 0,
        limit: int = 50,
        token: AuthToken = Depends(require_instructor),
    ):
        owned_assignment(assignment_id, token)
        limit = max(1, min(limit, 200))
        cursor = max(cursor, 0)
        events = runtime.store.events_for_assignment(assignment_id)
        page = events[cursor : cursor + limit]
        next_cursor = cursor + len(page) if cursor + len(page) < len(events) else None
        return {
            "events": [e.to_dict() for e in page],
            "next_cursor": next_cursor,
            "total": len(events),
        }

    # ------------------------------------------------------------------
    # static frontend (optional)

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="ui")

    return app


def _infer_entrypoint(files, extension: str) -> Optional[str]:
    names = sorted(files)
    if len(names) == 1:
        return names[0]
    candidates = [
        n
        for n in names
        if PurePosixPath(n).stem.lower() == "main"
        and (not extension or n.endswith(extension))
    ]
    if len(candidates) == 1:
        return candidates[0]
    return None
