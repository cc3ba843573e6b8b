import sys
import time
from concurrent.futures import wait

import pytest

from leaftutor.domain import ExecutionStatus
from leaftutor.errors import DuplicateProfile, ToolchainMissing, UnknownProfile
from leaftutor.sandbox import (
    ExecutionJob,
    ExecutionLimits,
    LanguageProfile,
    Sandbox,
    classify_run,
    default_profiles,
    normalize_output,
    toolchain_available,
)

JAVA = default_profiles()[0]
java_missing = not toolchain_available(JAVA)

# A profile with a real compile stage that needs nothing beyond the
# interpreter running this suite.
CHECKED_PY = LanguageProfile(
    name="checked-py",
    file_extension=".py",
    compile_cmd=(sys.executable, "-m", "py_compile", "{main}"),
    run_cmd=(sys.executable, "{main}"),
    runtime_error_patterns=(r"Traceback \(most recent call last\)",),
)


@pytest.fixture
def sandbox():
    box = Sandbox(profiles=default_profiles())
    box.register_profile(CHECKED_PY)
    return box


def _job(files, entrypoint="main.py", profile="script", **kwargs):
    return ExecutionJob(files=files, entrypoint=entrypoint, profile=profile, **kwargs)


# ---------------------------------------------------------------------------
# normalization and pure classification


def test_normalize_output_crlf_and_trailing_whitespace():
    assert normalize_output("a \r\nb\t\n\n\n") == "a\nb"


def test_normalize_output_keeps_interior_blank_lines():
    assert normalize_output("a\n\nb\n") == "a\n\nb"


@pytest.mark.parametrize(
    "exit_code,stdout,stderr,expected_output,patterns,status",
    [
        (0, "hi\n", "", None, (), ExecutionStatus.OK),
        (0, "hi\n", "", "hi", (), ExecutionStatus.OK),
        (0, "hi \r\n\n", "", "hi", (), ExecutionStatus.OK),
        (0, "bye\n", "", "hi", (), ExecutionStatus.WRONG_OUTPUT),
        (1, "hi\n", "", "hi", (), ExecutionStatus.RUNTIME_ERROR),
        (139, "", "segfault", None, (), ExecutionStatus.RUNTIME_ERROR),
        (0, "hi\n", "warning: Exception in thread", None, (r"Exception in thread",), ExecutionStatus.RUNTIME_ERROR),
        (0, "hi\n", "clean", "hi", (r"Exception in thread",), ExecutionStatus.OK),
    ],
)
def test_classification_table(exit_code, stdout, stderr, expected_output, patterns, status):
    assert classify_run(exit_code, stdout, stderr, expected_output, patterns) is status


# ---------------------------------------------------------------------------
# profile registry


def test_unknown_profile(sandbox):
    with pytest.raises(UnknownProfile):
        sandbox.execute(_job({"main.py": "print(1)"}, profile="cobol"))


def test_duplicate_profile(sandbox):
    with pytest.raises(DuplicateProfile):
        sandbox.register_profile(CHECKED_PY)


def test_profile_rejects_shell_metacharacters():
    with pytest.raises(ValueError):
        LanguageProfile(name="bad", file_extension=".sh", run_cmd=("sh", "-c", "rm -rf *"))


def test_job_rejects_path_traversal():
    with pytest.raises(ValueError):
        ExecutionJob(
            files={"../escape.py": "x", "main.py": "x"},
            entrypoint="main.py",
            profile="script",
        )


def test_job_requires_entrypoint_present():
    with pytest.raises(ValueError):
        ExecutionJob(files={"a.py": "x"}, entrypoint="main.py", profile="script")


def test_toolchain_missing(sandbox):
    sandbox.register_profile(
        LanguageProfile(
            name="ghost-lang",
            file_extension=".g",
            run_cmd=("leaftutor-no-such-binary-anywhere", "{main}"),
        )
    )
    with pytest.raises(ToolchainMissing):
        sandbox.execute(_job({"main.g": "x"}, entrypoint="main.g", profile="ghost-lang"))


# ---------------------------------------------------------------------------
# script-profile execution paths


def test_ok_without_expected_output(sandbox):
    result = sandbox.execute(_job({"main.py": "print('hello')"}))
    assert result.status is ExecutionStatus.OK
    assert result.run_stdout == "hello\n"
    assert result.exit_code == 0
    assert result.compile_stdout == "" and result.compile_stderr == ""


def test_ok_with_matching_expected_output(sandbox):
    result = sandbox.execute(
        _job({"main.py": "print('3 7 9')"}, expected_output="3 7 9\n")
    )
    assert result.status is ExecutionStatus.OK


def test_wrong_output(sandbox):
    result = sandbox.execute(
        _job({"main.py": "print(object())"}, expected_output="3 7 9\n")
    )
    assert result.status is ExecutionStatus.WRONG_OUTPUT


def test_runtime_error(sandbox):
    result = sandbox.execute(_job({"main.py": "raise IndexError('boom')"}))
    assert result.status is ExecutionStatus.RUNTIME_ERROR
    assert "IndexError" in result.run_stderr


def test_compile_error_via_checked_profile(sandbox):
    result = sandbox.execute(
        _job({"main.py": "def broken(:\n  pass"}, profile="checked-py")
    )
    assert result.status is ExecutionStatus.COMPILE_ERROR
    assert result.compile_stderr != ""
    assert result.run_stdout == "" and result.run_stderr == ""


def test_compile_phase_skipped_without_compile_cmd(sandbox):
    result = sandbox.execute(_job({"main.py": "print('ok')"}))
    assert result.compile_stdout == "" and result.compile_stderr == ""
    assert result.status is ExecutionStatus.OK


def test_timeout_enforced_within_grace(sandbox):
    job = _job(
        {"main.py": "import time; time.sleep(30)"},
        limits=ExecutionLimits(wall_ms=400),
    )
    started = time.monotonic()
    result = sandbox.execute(job)
    elapsed_ms = (time.monotonic() - started) * 1000
    assert result.status is ExecutionStatus.TIMEOUT
    assert result.exit_code is None
    assert elapsed_ms <= 400 + 500


def test_stdin_fed_to_program(sandbox):
    result = sandbox.execute(
        _job({"main.py": "print(input()[::-1])"}, stdin_text="abcdef\n")
    )
    assert result.status is ExecutionStatus.OK
    assert result.run_stdout == "fedcba\n"


def test_output_truncated_at_exact_cap(sandbox):
    cap = 4096
    job = _job(
        {"main.py": "import sys; sys.stdout.write('x' * 100000)"},
        limits=ExecutionLimits(output_cap_bytes=cap),
    )
    result = sandbox.execute(job)
    assert len(result.run_stdout.encode("utf-8")) == cap
    assert result.truncated is True


def test_truncated_false_under_cap(sandbox):
    result = sandbox.execute(_job({"main.py": "print('small')"}))
    assert result.truncated is False


def test_concurrent_jobs_are_isolated(sandbox):
    probe = (
        "import os, time\n"
        "open('mine_{n}.txt', 'w').write('x')\n"
        "time.sleep(0.3)\n"
        "print(sorted(f for f in os.listdir('.') if f.endswith('.txt')))\n"
    )
    futures = [
        sandbox.submit(_job({"main.py": probe.format(n=n)})) for n in ("a", "b")
    ]
    wait(futures)
    outputs = [f.result() for f in futures]
    assert outputs[0].run_stdout.strip() == "['mine_a.txt']"
    assert outputs[1].run_stdout.strip() == "['mine_b.txt']"


def test_workdir_removed_after_run(sandbox, tmp_path):
    result = sandbox.execute(_job({"main.py": "import os; print(os.getcwd())"}))
    workdir = result.run_stdout.strip()
    import os

    assert not os.path.exists(workdir)


def test_files_staged_in_subdirectories(sandbox):
    files = {
        "main.py": "print(open('data/values.txt').read().strip())",
        "data/values.txt": "42",
    }
    result = sandbox.execute(_job(files))
    assert result.status is ExecutionStatus.OK
    assert result.run_stdout == "42\n"


# ---------------------------------------------------------------------------
# java profile (toolchain-gated)


@pytest.mark.skipif(java_missing, reason="java toolchain not installed")
def test_java_compile_error():
    box = Sandbox(profiles=default_profiles())
    result = box.execute(
        ExecutionJob(
            files={"Main.java": "public class Main { void broken() { int x = }"},
            entrypoint="Main.java",
            profile="java",
        )
    )
    assert result.status is ExecutionStatus.COMPILE_ERROR
    assert result.compile_stderr != ""


@pytest.mark.skipif(java_missing, reason="java toolchain not installed")
def test_java_runtime_error_matches_pattern():
    import re
    from pathlib import Path

    base = Path(__file__).resolve().parent.parent / "fixtures/scenarios/files/runtime/java"
    files = {p.name: p.read_text() for p in base.glob("*.java")}
    box = Sandbox(profiles=default_profiles())
    result = box.execute(
        ExecutionJob(files=files, entrypoint="Main.java", profile="java")
    )
    assert result.status is ExecutionStatus.RUNTIME_ERROR
    assert re.search("ArrayIndexOutOfBoundsException", result.run_stderr)


@pytest.mark.skipif(java_missing, reason="java toolchain not installed")
def test_java_wrong_output_fixture():
    from pathlib import Path

    base = Path(__file__).resolve().parent.parent / "fixtures/scenarios/files/wrong_output"
    files = {p.name: p.read_text() for p in (base / "java").glob("*.java")}
    expected = (base / "expected_output.txt").read_text()
    box = Sandbox(profiles=default_profiles())
    result = box.execute(
        ExecutionJob(
            files=files,
            entrypoint="Main.java",
            profile="java",
            expected_output=expected,
        )
    )
    assert result.status is ExecutionStatus.WRONG_OUTPUT
