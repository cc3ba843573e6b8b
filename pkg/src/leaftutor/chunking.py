"""Splitting material text into retrieval-sized chunks.

The splitter works on paragraph blocks (a paragraph plus its trailing blank
lines), greedily merging whole blocks up to ``chunk_max_chars``. A block that
is itself oversized is cut with a sliding window that steps by
``chunk_max_chars - overlap_chars``, so consecutive window pieces share
``overlap_chars`` of text. Concatenating the chunks with those overlaps
stripped reproduces the source exactly; nothing is ever normalized away.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

_PARAGRAPH_BREAK = re.compile(r"\n{2,}")


@dataclass(frozen=True)
class ChunkingConfig:
    chunk_max_chars: int = 1000
    overlap_chars: int = 200

    def __post_init__(self):
        if self.chunk_max_chars < 100:
            raise ValueError("chunk_max_chars must be >= 100")
        if not 0 <= self.overlap_chars < self.chunk_max_chars:
            raise ValueError("overlap_chars must be in [0, chunk_max_chars)")


def paragraph_blocks(text: str) -> list[str]:
    """Partition ``text`` into paragraph blocks, each keeping its trailing
    blank-line run, so that ``"".join(blocks) == text``."""
    blocks = []
    start = 0
    for match in _PARAGRAPH_BREAK.finditer(text):
        blocks.append(text[start : match.end()])
        start = match.end()
    if start < len(text):
        blocks.append(text[start:])
    return blocks


def chunk_text(text: str, cfg: ChunkingConfig = ChunkingConfig()) -> list[str]:
    """Split ``text`` into ordered chunk strings.

    Whitespace-only input yields no chunks. Each chunk is at most
    ``cfg.chunk_max_chars`` long; only oversized paragraphs introduce
    overlapping chunks.
    """
    if not text.strip():
        return []
    stride = cfg.chunk_max_chars - cfg.overlap_chars
    chunks: list[str] = []
    pending = ""
    for block in paragraph_blocks(text):
        if len(block) > cfg.chunk_max_chars:
            if pending:
                chunks.append(pending)
                pending = ""
            start = 0
            while start < len(block):
                chunks.append(block[start : start + cfg.chunk_max_chars])
                start += stride
        elif len(pending) + len(block) <= cfg.chunk_max_chars:
            pending += block
        else:
            chunks.append(pending)
            pending = block
    if pending:
        chunks.append(pending)
    return chunks
