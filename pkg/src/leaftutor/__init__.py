"""leaftutor: a self-hostable tutoring service.

Grounds LLM guidance in instructor-uploaded assignment materials, runs
student code in a sandbox, classifies the outcome, and records every
tutoring request in an append-only log.
"""

__version__ = "0.1.0"
