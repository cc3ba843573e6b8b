"""Operator CLI: bootstrap principals, ingest materials, replay scenarios,
and serve the HTTP API.

Exit codes: 0 success, 1 step/file failures, 2 usage errors (including
invalid scenarios).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .config import ServiceConfig
from .domain import PrincipalRole
from .errors import ScenarioInvalid, TutorError
from .scenarios import replay as replay_scenario
from .service import build_runtime


def _load_config(config_path) -> ServiceConfig:
    if config_path:
        return ServiceConfig.from_file(config_path)
    return ServiceConfig()


@click.group()
def main():
    """Self-hosted tutoring service operator tool."""


@main.command("bootstrap-instructor")
@click.option("--name", required=True, help="Display name for the instructor.")
@click.option("--store", "store_dir", default="leaftutor-store", show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def bootstrap_instructor(name, store_dir, config_path):
    """Create an instructor principal and print its bearer token."""
    runtime = build_runtime(store_dir, _load_config(config_path))
    token = runtime.issue_token(PrincipalRole.INSTRUCTOR)
    click.echo(
        json.dumps(
            {
                "name": name,
                "instructor_id": token.principal,
                "token": token.token,
                "expires_at": token.expires_at.isoformat(),
            }
        )
    )


@main.command("bootstrap-student")
@click.option("--name", required=True, help="Display name for the student.")
@click.option("--store", "store_dir", default="leaftutor-store", show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def bootstrap_student(name, store_dir, config_path):
    """Create a student principal and print its bearer token."""
    runtime = build_runtime(store_dir, _load_config(config_path))
    token = runtime.issue_token(PrincipalRole.STUDENT)
    click.echo(
        json.dumps(
            {
                "name": name,
                "student_id": token.principal,
                "token": token.token,
                "expires_at": token.expires_at.isoformat(),
            }
        )
    )


@main.command()
@click.option("--assignment", "assignment_id", required=True)
@click.option("--kind", required=True, help="INSTRUCTIONS | SOLUTION | LECTURE | REMARKS")
@click.option("--store", "store_dir", default="leaftutor-store", show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.argument("paths", nargs=-1, required=True, type=click.Path(exists=True))
def ingest(assignment_id, kind, store_dir, config_path, paths):
    """Upload and ingest material files; prints chunks created per file."""
    from .domain import MaterialKind

    if kind.strip().upper() not in MaterialKind.__members__:
        raise click.UsageError(f"unsupported kind: {kind!r}")
    runtime = build_runtime(store_dir, _load_config(config_path))
    failures = 0
    for raw_path in paths:
        path = Path(raw_path)
        try:
            _, created = runtime.upload_material(
                assignment_id, kind, path.name, path.read_bytes()
            )
            click.echo(f"{path}: {created} chunks")
        except (TutorError, OSError) as exc:
            failures += 1
            click.echo(f"{path}: ERROR {exc}", err=True)
    if failures:
        sys.exit(1)


@main.command("replay")
@click.argument("scenario", type=click.Path(exists=True))
@click.option("--store", "store_dir", default=None, help="Defaults to a temp dir.")
def replay_cmd(scenario, store_dir):
    """Replay a scenario end-to-end and report PASS/FAIL per step."""
    try:
        report = replay_scenario(scenario, store_dir=store_dir)
    except ScenarioInvalid as exc:
        raise click.UsageError(f"SCENARIO_INVALID: {exc}")
    click.echo(report.render(), nl=False)
    if not report.passed:
        sys.exit(1)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--listen", default="127.0.0.1:8000", show_default=True)
@click.option("--store", "store_dir", default="leaftutor-store", show_default=True)
@click.option("--frontend", "frontend_dir", type=click.Path(), default=None,
              help="Directory of built UI assets to serve at /.")
def serve(config_path, listen, store_dir, frontend_dir):
    """Run the HTTP API."""
    import uvicorn

    from .api import create_app
    from .service import build_provider

    config = _load_config(config_path)
    runtime = build_runtime(store_dir, config, provider=build_provider(config))
    app = create_app(runtime, frontend_dir=frontend_dir)
    host, _, port = listen.rpartition(":")
    if not host or not port.isdigit():
        raise click.UsageError(f"--listen must be addr:port, got {listen!r}")
    uvicorn.run(app, host=host, port=int(port))


if __name__ == "__main__":
    main()
