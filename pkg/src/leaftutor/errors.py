"""Error types shared across the service.

Every error carries a stable machine-readable ``code`` so the HTTP layer and
the CLI can map failures without string-matching messages.
"""

from __future__ import annotations


class TutorError(Exception):
    """Base class for all service errors."""

    code = "INTERNAL"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)


class UnsupportedKind(TutorError):
    code = "UNSUPPORTED_KIND"


class NotText(TutorError):
    code = "NOT_TEXT"


class TooLarge(TutorError):
    code = "TOO_LARGE"


class UnknownAssignment(TutorError):
    code = "UNKNOWN_ASSIGNMENT"


class EmptyQuery(TutorError):
    code = "EMPTY_QUERY"


class UnknownSession(TutorError):
    code = "UNKNOWN_SESSION"


class SessionBusy(TutorError):
    code = "SESSION_BUSY"


class ProviderUnavailable(TutorError):
    code = "PROVIDER_UNAVAILABLE"


class ProviderTimeout(TutorError):
    code = "PROVIDER_TIMEOUT"


class ScriptMiss(TutorError):
    code = "SCRIPT_MISS"


class UnknownProfile(TutorError):
    code = "UNKNOWN_PROFILE"


class DuplicateProfile(TutorError):
    code = "DUPLICATE_PROFILE"


class ToolchainMissing(TutorError):
    code = "TOOLCHAIN_MISSING"


class StagingFailed(TutorError):
    code = "STAGING_FAILED"


class NotFound(TutorError):
    code = "NOT_FOUND"


class Conflict(TutorError):
    code = "CONFLICT"


class IoFailed(TutorError):
    code = "IO_FAILED"


class AtomicWriteFailed(TutorError):
    code = "ATOMIC_WRITE_FAILED"


class IncompatibleSchema(TutorError):
    code = "INCOMPATIBLE_SCHEMA"


class ScenarioInvalid(TutorError):
    code = "SCENARIO_INVALID"
