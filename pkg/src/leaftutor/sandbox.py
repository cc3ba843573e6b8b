"""Sandboxed compile/run harness for student code.

Each job is staged into a fresh temporary directory, compiled (when the
language profile has a compile step) and run with a wall-clock limit and an
output byte cap, then classified:

    COMPILE_ERROR   nonzero compile exit (run phase skipped)
    TIMEOUT         wall limit expired; the process group is killed
    RUNTIME_ERROR   nonzero run exit, or stderr matching a profile pattern
    WRONG_OUTPUT    expected output present and normalized stdout differs
    OK              everything else

Commands are argv arrays resolved from templates; no shell is ever involved.
Isolation is process-level (fresh directory, hard kill, no shell). OS-level
containment such as containers or syscall filtering is a deployment concern
to layer on top of the service, not part of this harness.
"""

from __future__ import annotations

import os
import re
import shutil
import signal
import subprocess
import sys
import tempfile
import threading
import time
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path, PurePosixPath
from typing import Mapping, Optional

from .domain import ExecutionResult, ExecutionStatus
from .errors import (
    DuplicateProfile,
    StagingFailed,
    ToolchainMissing,
    UnknownProfile,
)

DEFAULT_WALL_MS = 10_000
DEFAULT_OUTPUT_CAP_BYTES = 65_536
DEFAULT_WORKERS = 4

# Kill grace allowed beyond the wall limit before we consider enforcement
# broken; asserted by the timing tests.
KILL_GRACE_MS = 500

_SHELL_METACHARACTERS = set(";&|<>`$*?\n\r\"'\\")


def _check_command(tokens: tuple) -> None:
    for token in tokens:
        if any(ch in _SHELL_METACHARACTERS for ch in token):
            raise ValueError(f"shell metacharacter in command token: {token!r}")


@dataclass(frozen=True)
class LanguageProfile:
    """How to compile and run one language. ``compile_cmd`` may be empty for
    interpreter-only languages. Templates take {dir}, {main} (entrypoint
    filename), and {main_stem} (filename without extension)."""

    name: str
    file_extension: str
    compile_cmd: tuple = ()
    run_cmd: tuple = ()
    runtime_error_patterns: tuple = ()

    def __post_init__(self):
        if not self.run_cmd:
            raise ValueError("run_cmd must be non-empty")
        _check_command(self.compile_cmd)
        _check_command(self.run_cmd)


@dataclass(frozen=True)
class ExecutionLimits:
    wall_ms: int = DEFAULT_WALL_MS
    output_cap_bytes: int = DEFAULT_OUTPUT_CAP_BYTES

    def __post_init__(self):
        if self.wall_ms < 1 or self.output_cap_bytes < 1:
            raise ValueError("limits must be positive")


def check_filename(name: str) -> None:
    """Reject absolute paths, traversal, and other unstageable names."""
    path = PurePosixPath(name)
    if not name or name != str(path):
        raise ValueError(f"bad filename: {name!r}")
    if path.is_absolute() or ".." in path.parts or "\\" in name:
        raise ValueError(f"filename must be relative without traversal: {name!r}")


@dataclass(frozen=True)
class ExecutionJob:
    files: Mapping[str, str]
    entrypoint: str
    profile: str
    stdin_text: Optional[str] = None
    expected_output: Optional[str] = None
    limits: ExecutionLimits = field(default_factory=ExecutionLimits)

    def __post_init__(self):
        if self.entrypoint not in self.files:
            raise ValueError(f"entrypoint {self.entrypoint!r} not in files")
        for name in self.files:
            check_filename(name)


def normalize_output(text: str) -> str:
    """CRLF to LF, strip trailing whitespace per line, drop trailing blank
    lines; used for expected-output comparison."""
    lines = [line.rstrip() for line in text.replace("\r\n", "\n").split("\n")]
    while lines and lines[-1] == "":
        lines.pop()
    return "\n".join(lines)


def classify_run(
    exit_code: int,
    run_stdout: str,
    run_stderr: str,
    expected_output: Optional[str],
    runtime_error_patterns: tuple,
) -> ExecutionStatus:
    """Pure classification of a completed (non-timeout) run."""
    if exit_code != 0:
        return ExecutionStatus.RUNTIME_ERROR
    for pattern in runtime_error_patterns:
        if re.search(pattern, run_stderr):
            return ExecutionStatus.RUNTIME_ERROR
    if expected_output is not None and normalize_output(run_stdout) != normalize_output(
        expected_output
    ):
        return ExecutionStatus.WRONG_OUTPUT
    return ExecutionStatus.OK


def _resolve(template: tuple, workdir: str, entrypoint: str) -> list[str]:
    stem = PurePosixPath(entrypoint).stem
    return [
        token.format(dir=workdir, main=entrypoint, main_stem=stem)
        for token in template
    ]


class _StreamCap:
    """Drains one pipe on a thread, keeping at most ``cap`` bytes."""

    def __init__(self, stream, cap: int):
        self.cap = cap
        self.data = b""
        self.hit_cap = False
        self._thread = threading.Thread(target=self._drain, args=(stream,), daemon=True)
        self._thread.start()

    def _drain(self, stream) -> None:
        while True:
            block = stream.read(65536)
            if not block:
                break
            room = self.cap - len(self.data)
            if room > 0:
                self.data += block[:room]
            if len(block) > max(room, 0):
                self.hit_cap = True
        stream.close()

    def finish(self) -> tuple[str, bool]:
        self._thread.join()
        return self.data.decode("utf-8", errors="replace"), self.hit_cap


def _run_capped(
    argv: list[str],
    workdir: str,
    stdin_text: Optional[str],
    wall_ms: int,
    cap: int,
) -> tuple[Optional[int], str, str, bool, bool]:
    """Run argv with caps; returns (exit_code, stdout, stderr, any_cap_hit,
    timed_out). exit_code is None when the wall limit fired."""
    try:
        proc = subprocess.Popen(
            argv,
            cwd=workdir,
            stdin=subprocess.PIPE if stdin_text is not None else subprocess.DEVNULL,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            start_new_session=True,
        )
    except FileNotFoundError:
        raise ToolchainMissing(f"command not found: {argv[0]}") from None
    out_cap = _StreamCap(proc.stdout, cap)
    err_cap = _StreamCap(proc.stderr, cap)
    if stdin_text is not None:
        def _feed():
            try:
                proc.stdin.write(stdin_text.encode("utf-8"))
                proc.stdin.close()
            except OSError:
                pass

        threading.Thread(target=_feed, daemon=True).start()
    timed_out = False
    try:
        exit_code = proc.wait(timeout=wall_ms / 1000.0)
    except subprocess.TimeoutExpired:
        timed_out = True
        try:
            os.killpg(proc.pid, signal.SIGKILL)
        except (ProcessLookupError, PermissionError):
            proc.kill()
        proc.wait()
        exit_code = None
    stdout, out_hit = out_cap.finish()
    stderr, err_hit = err_cap.finish()
    return exit_code, stdout, stderr, out_hit or err_hit, timed_out


class Sandbox:
    """Registry of language profiles plus a bounded execution pool."""

    def __init__(self, profiles=(), max_workers: int = DEFAULT_WORKERS):
        self._profiles: dict[str, LanguageProfile] = {}
        self._pool = ThreadPoolExecutor(
            max_workers=max_workers, thread_name_prefix="leafexec"
        )
        for profile in profiles:
            self.register_profile(profile)

    def register_profile(self, profile: LanguageProfile) -> None:
        if profile.name in self._profiles:
            raise DuplicateProfile(profile.name)
        self._profiles[profile.name] = profile

    def get_profile(self, name: str) -> LanguageProfile:
        try:
            return self._profiles[name]
        except KeyError:
            raise UnknownProfile(name) from None

    def submit(self, job: ExecutionJob) -> Future:
        """Queue a job on the worker pool (FIFO beyond capacity)."""
        return self._pool.submit(self.execute, job)

    def execute(self, job: ExecutionJob) -> ExecutionResult:
        profile = self.get_profile(job.profile)
        workdir = tempfile.mkdtemp(prefix="leafexec-")
        started = time.monotonic()
        try:
            try:
                for name, content in job.files.items():
                    target = Path(workdir) / name
                    target.parent.mkdir(parents=True, exist_ok=True)
                    target.write_text(content, encoding="utf-8")
            except OSError as exc:
                raise StagingFailed(str(exc)) from exc

            cap = job.limits.output_cap_bytes
            compile_stdout = compile_stderr = ""
            cap_hit = False
            if profile.compile_cmd:
                argv = _resolve(profile.compile_cmd, workdir, job.entrypoint)
                exit_code, compile_stdout, compile_stderr, cap_hit, timed_out = (
                    _run_capped(argv, workdir, None, job.limits.wall_ms, cap)
                )
                wall = int((time.monotonic() - started) * 1000)
                if timed_out:
                    return ExecutionResult(
                        status=ExecutionStatus.TIMEOUT,
                        compile_stdout=compile_stdout,
                        compile_stderr=compile_stderr,
                        exit_code=None,
                        wall_ms=wall,
                        truncated=cap_hit,
                    )
                if exit_code != 0:
                    return ExecutionResult(
                        status=ExecutionStatus.COMPILE_ERROR,
                        compile_stdout=compile_stdout,
                        compile_stderr=compile_stderr,
                        exit_code=exit_code,
                        wall_ms=wall,
                        truncated=cap_hit,
                    )

            argv = _resolve(profile.run_cmd, workdir, job.entrypoint)
            run_started = time.monotonic()
            exit_code, run_stdout, run_stderr, run_cap_hit, timed_out = _run_capped(
                argv, workdir, job.stdin_text, job.limits.wall_ms, cap
            )
            truncated = cap_hit or run_cap_hit
            wall = int((time.monotonic() - run_started) * 1000)
            if timed_out:
                status = ExecutionStatus.TIMEOUT
            else:
                status = classify_run(
                    exit_code,
                    run_stdout,
                    run_stderr,
                    job.expected_output,
                    profile.runtime_error_patterns,
                )
            return ExecutionResult(
                status=status,
                compile_stdout=compile_stdout,
                compile_stderr=compile_stderr,
                run_stdout=run_stdout,
                run_stderr=run_stderr,
                exit_code=exit_code,
                wall_ms=wall,
                truncated=truncated,
            )
        finally:
            shutil.rmtree(workdir, ignore_errors=True)


def default_profiles() -> tuple:
    """The reference Java profile plus a toolchain-free interpreter profile
    used wherever a compiler may be absent."""
    return (
        LanguageProfile(
            name="java",
            file_extension=".java",
            compile_cmd=("javac", "{main}"),
            run_cmd=("java", "{main_stem}"),
            runtime_error_patterns=(r"Exception in thread",),
        ),
        LanguageProfile(
            name="script",
            file_extension=".py",
            compile_cmd=(),
            run_cmd=(sys.executable, "{main}"),
            runtime_error_patterns=(r"Traceback \(most recent call last\)",),
        ),
    )


def toolchain_available(profile: LanguageProfile) -> bool:
    binaries = {profile.run_cmd[0]}
    if profile.compile_cmd:
        binaries.add(profile.compile_cmd[0])
    return all(shutil.which(b) is not None for b in binaries)
