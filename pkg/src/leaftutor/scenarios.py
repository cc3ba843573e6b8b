"""Executable tutoring scenarios.

A scenario JSON bundles instructor materials, student session files, a
deterministic provider script, and an ordered list of steps:

    {"say": "<student message>"}
    {"expect_reply_contains": "<substring of the latest tutor reply>"}
    {"run": {"expected_status": "WRONG_OUTPUT",
             "expect_stderr_matches": "<regex, optional>"}}

Replay drives the full stack in-process: it bootstraps a course, ingests the
materials, opens a session, and walks the steps, reporting PASS/FAIL per
step. When the scenario's language toolchain is not installed, run steps are
reported SKIPPED and, if the scenario declares a ``script_variant``, the
session code switches to the interpreter-friendly variant so the dialogue
steps still see realistic files.

Reports contain no timestamps or generated ids, so two replays of the same
scenario are byte-identical.
"""

from __future__ import annotations

import json
import re
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path

from .domain import (
    Assignment,
    Course,
    ExecutionStatus,
    MaterialKind,
    PrincipalRole,
    TutorSession,
    new_id,
    utcnow,
)
from .errors import ScenarioInvalid, TutorError
from .providers import ScriptedProvider
from .sandbox import ExecutionJob, toolchain_available
from .service import build_runtime

PASS = "PASS"
FAIL = "FAIL"
SKIPPED = "SKIPPED"


@dataclass(frozen=True)
class Scenario:
    name: str
    base_dir: Path
    materials: tuple  # ((MaterialKind, Path), ...)
    session_files: tuple  # (Path, ...)
    entrypoint: str
    profile: str
    script_path: Path
    steps: tuple
    expected_output: str | None = None
    variant_session_files: tuple = ()
    variant_entrypoint: str = ""


@dataclass
class StepOutcome:
    number: int
    description: str
    status: str
    detail: str = ""


@dataclass
class ReplayReport:
    scenario: str
    steps: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(s.status != FAIL for s in self.steps)

    def render(self) -> str:
        lines = [f"scenario: {self.scenario}"]
        for step in self.steps:
            line = f"  {step.status:7s} step {step.number}: {step.description}"
            if step.detail:
                line += f" [{step.detail}]"
            lines.append(line)
        counts = {status: 0 for status in (PASS, FAIL, SKIPPED)}
        for step in self.steps:
            counts[step.status] += 1
        verdict = PASS if self.passed else FAIL
        lines.append(
            f"result: {verdict} "
            f"({counts[PASS]} passed, {counts[FAIL]} failed, {counts[SKIPPED]} skipped)"
        )
        return "\n".join(lines) + "\n"


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ScenarioInvalid(message)


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioInvalid(f"cannot read scenario {path}: {exc}") from exc
    base = path.parent
    _require(isinstance(raw.get("name"), str) and raw["name"], "scenario needs a name")
    steps = raw.get("steps")
    _require(isinstance(steps, list) and len(steps) > 0, "steps must be non-empty")
    for i, step in enumerate(steps, start=1):
        _require(isinstance(step, dict), f"step {i} must be an object")
        keys = {"say", "run", "expect_reply_contains"} & step.keys()
        _require(len(keys) == 1, f"step {i} must be exactly one of say/run/expect")
        if "run" in step:
            expected = step["run"].get("expected_status")
            _require(
                expected in {s.value for s in ExecutionStatus},
                f"step {i}: invalid expected_status {expected!r}",
            )

    materials = []
    for entry in raw.get("materials", []):
        kind_name, rel = entry
        try:
            kind = MaterialKind[kind_name.upper()]
        except KeyError:
            raise ScenarioInvalid(f"invalid material kind {kind_name!r}") from None
        material_path = base / rel
        _require(material_path.is_file(), f"missing material file {rel}")
        materials.append((kind, material_path))

    session_files = []
    for rel in raw.get("session_files", []):
        file_path = base / rel
        _require(file_path.is_file(), f"missing session file {rel}")
        session_files.append(file_path)

    script_path = base / raw["script_path"]
    _require(script_path.is_file(), f"missing script file {raw['script_path']}")

    expected_output = None
    if raw.get("expected_output_file"):
        expected_path = base / raw["expected_output_file"]
        _require(
            expected_path.is_file(),
            f"missing expected output file {raw['expected_output_file']}",
        )
        expected_output = expected_path.read_text(encoding="utf-8")

    variant = raw.get("script_variant") or {}
    variant_files = []
    for rel in variant.get("session_files", []):
        file_path = base / rel
        _require(file_path.is_file(), f"missing variant session file {rel}")
        variant_files.append(file_path)

    return Scenario(
        name=raw["name"],
        base_dir=base,
        materials=tuple(materials),
        session_files=tuple(session_files),
        entrypoint=raw.get("entrypoint", ""),
        profile=raw.get("profile", "script"),
        script_path=script_path,
        steps=tuple(steps),
        expected_output=expected_output,
        variant_session_files=tuple(variant_files),
        variant_entrypoint=variant.get("entrypoint", ""),
    )


def _quote(text: str, limit: int = 48) -> str:
    snippet = text if len(text) <= limit else text[: limit - 3] + "..."
    return json.dumps(snippet)


def replay(scenario_path, store_dir=None) -> ReplayReport:
    scenario = load_scenario(scenario_path)
    if store_dir is None:
        with tempfile.TemporaryDirectory(prefix="leaftutor-replay-") as tmp:
            return _replay_in(scenario, tmp)
    return _replay_in(scenario, store_dir)


def _replay_in(scenario: Scenario, store_dir) -> ReplayReport:
    runtime = build_runtime(
        store_dir, provider=ScriptedProvider.from_file(scenario.script_path)
    )
    report = ReplayReport(scenario=scenario.name)

    profile = runtime.sandbox.get_profile(scenario.profile)
    runnable = toolchain_available(profile)
    if runnable or not scenario.variant_session_files:
        session_paths = scenario.session_files
        entrypoint = scenario.entrypoint or (
            session_paths[0].name if session_paths else ""
        )
    else:
        session_paths = scenario.variant_session_files
        entrypoint = scenario.variant_entrypoint or session_paths[0].name

    # Stand up the course, assignment, materials, and session.
    instructor = runtime.issue_token(PrincipalRole.INSTRUCTOR)
    student = runtime.issue_token(PrincipalRole.STUDENT)
    course = Course(
        course_id=new_id(),
        title=f"{scenario.name} course",
        instructor_id=instructor.principal,
        roster=frozenset({student.principal}),
    )
    runtime.store.put_course(course)
    assignment = Assignment(
        assignment_id=new_id(),
        course_id=course.course_id,
        title=scenario.name,
        created_at=utcnow(),
        expected_output=scenario.expected_output,
    )
    runtime.store.put_assignment(assignment)
    for kind, material_path in scenario.materials:
        runtime.upload_material(
            assignment.assignment_id,
            kind.value,
            material_path.name,
            material_path.read_bytes(),
        )
    files = {p.name: p.read_text(encoding="utf-8") for p in session_paths}
    session = TutorSession(
        session_id=new_id(),
        assignment_id=assignment.assignment_id,
        student_id=student.principal,
        created_at=utcnow(),
        files=files,
    )
    runtime.store.put_session(session)

    last_reply = ""
    for number, step in enumerate(scenario.steps, start=1):
        if "say" in step:
            description = f"say {_quote(step['say'])}"
            try:
                turn = runtime.engine.tutor_turn(session.session_id, step["say"])
                last_reply = turn.text
                report.steps.append(StepOutcome(number, description, PASS))
            except TutorError as exc:
                report.steps.append(
                    StepOutcome(number, description, FAIL, detail=exc.code)
                )
        elif "expect_reply_contains" in step:
            needle = step["expect_reply_contains"]
            description = f"expect reply contains {_quote(needle)}"
            if needle in last_reply:
                report.steps.append(StepOutcome(number, description, PASS))
            else:
                report.steps.append(
                    StepOutcome(
                        number,
                        description,
                        FAIL,
                        detail=f"reply was {_quote(last_reply, 80)}",
                    )
                )
        else:
            spec = step["run"]
            expected = spec["expected_status"]
            description = f"run expecting {expected}"
            if not runnable:
                report.steps.append(
                    StepOutcome(
                        number,
                        description,
                        SKIPPED,
                        detail=f"{scenario.profile} toolchain unavailable",
                    )
                )
                continue
            job = ExecutionJob(
                files=files,
                entrypoint=entrypoint,
                profile=scenario.profile,
                expected_output=scenario.expected_output,
            )
            result = runtime.sandbox.execute(job)
            current = runtime.store.get_session(session.session_id)
            runtime.store.update_session(replace(current, last_execution=result))
            problems = []
            if result.status.value != expected:
                problems.append(f"status {result.status.value} != {expected}")
            pattern = spec.get("expect_stderr_matches")
            if pattern and not re.search(pattern, result.run_stderr):
                problems.append(f"stderr does not match /{pattern}/")
            if problems:
                report.steps.append(
                    StepOutcome(number, description, FAIL, detail="; ".join(problems))
                )
            else:
                report.steps.append(StepOutcome(number, description, PASS))
    return report
