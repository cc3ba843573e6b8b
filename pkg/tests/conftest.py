from __future__ import annotations

from pathlib import Path

import pytest

from leaftutor.config import ServiceConfig
from leaftutor.domain import (
    Assignment,
    Course,
    Material,
    content_hash,
    new_id,
    utcnow,
)
from leaftutor.providers import ScriptedProvider
from leaftutor.service import Runtime, build_runtime
from leaftutor.storage import Store

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
SCENARIOS = FIXTURES / "scenarios"

DEFAULT_SCRIPT = [
    ("What should I do", "Start with the first requirement in the assignment document and tell me what you have tried."),
    ("location of the list", "println uses the default toString, so override the toString() method to print the elements."),
    ("", "Walk me through what you expected and what happened instead."),
]


@pytest.fixture
def store(tmp_path) -> Store:
    return Store(tmp_path / "store")


@pytest.fixture
def runtime(tmp_path) -> Runtime:
    return build_runtime(
        tmp_path / "store", provider=ScriptedProvider(DEFAULT_SCRIPT)
    )


def make_runtime(root, script=None, config: ServiceConfig = None) -> Runtime:
    provider = ScriptedProvider(script if script is not None else DEFAULT_SCRIPT)
    return build_runtime(root, config=config, provider=provider)


def seed_course(store: Store, *, students=(), instructor_id=None) -> Course:
    course = Course(
        course_id=new_id(),
        title="Data Structures",
        instructor_id=instructor_id or new_id(),
        roster=frozenset(students),
    )
    store.put_course(course)
    return course


def seed_assignment(store: Store, course: Course, *, expected_output=None) -> Assignment:
    assignment = Assignment(
        assignment_id=new_id(),
        course_id=course.course_id,
        title="Assignment",
        created_at=utcnow(),
        expected_output=expected_output,
    )
    store.put_assignment(assignment)
    return assignment


def seed_material(store: Store, assignment: Assignment, text: str, *, kind, filename="notes.md") -> Material:
    material = Material(
        material_id=new_id(),
        assignment_id=assignment.assignment_id,
        kind=kind,
        filename=filename,
        content=text,
        content_hash=content_hash(text),
        uploaded_at=utcnow(),
    )
    store.put_material(material)
    return material
