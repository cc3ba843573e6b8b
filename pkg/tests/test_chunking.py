import pytest
from hypothesis import given, settings, strategies as st

from leaftutor.chunking import ChunkingConfig, chunk_text, paragraph_blocks
from oracles import oracle_chunk_spans, reconstruct_from_spans

DEFAULT = ChunkingConfig()


def test_empty_input_yields_no_chunks():
    assert chunk_text("", DEFAULT) == []


def test_whitespace_only_yields_no_chunks():
    assert chunk_text(" \n\n\t  \n", DEFAULT) == []


def test_short_text_is_one_chunk():
    text = "x" * 800
    assert chunk_text(text, DEFAULT) == [text]


def test_oversized_paragraph_uses_stride_walk():
    # Frozen from the arithmetic-walk oracle: a 2500-char paragraph with
    # max=1000/overlap=200 splits at offsets 0, 800, 1600, 2400.
    text = "".join(chr(ord("a") + (i % 26)) for i in range(2500))
    chunks = chunk_text(text, ChunkingConfig(1000, 200))
    assert chunks == [text[0:1000], text[800:1800], text[1600:2500], text[2400:2500]]


def test_paragraph_blocks_partition_source():
    text = "alpha\n\nbeta\n\n\ngamma\ntail"
    blocks = paragraph_blocks(text)
    assert "".join(blocks) == text
    assert blocks == ["alpha\n\n", "beta\n\n\n", "gamma\ntail"]


def test_merges_paragraphs_up_to_limit():
    cfg = ChunkingConfig(100, 10)
    text = ("p" * 40 + "\n\n") * 3  # three 42-char blocks
    chunks = chunk_text(text, cfg)
    # 42 + 42 fits in 100, adding the third would overflow.
    assert chunks == [text[:84], text[84:]]


def test_config_validation():
    with pytest.raises(ValueError):
        ChunkingConfig(chunk_max_chars=50)
    with pytest.raises(ValueError):
        ChunkingConfig(chunk_max_chars=100, overlap_chars=100)
    with pytest.raises(ValueError):
        ChunkingConfig(chunk_max_chars=100, overlap_chars=-1)


documents = st.text(
    alphabet=st.sampled_from(list("ab c\n.")), min_size=0, max_size=4000
)
configs = st.builds(
    ChunkingConfig,
    chunk_max_chars=st.integers(100, 400),
    overlap_chars=st.integers(0, 99),
)


@given(documents, configs)
@settings(max_examples=150)
def test_matches_oracle_spans(text, cfg):
    spans = oracle_chunk_spans(text, cfg.chunk_max_chars, cfg.overlap_chars)
    assert chunk_text(text, cfg) == [text[s:e] for s, e in spans]


@given(documents, configs)
@settings(max_examples=150)
def test_overlap_stripped_concatenation_reproduces_source(text, cfg):
    chunks = chunk_text(text, cfg)
    spans = oracle_chunk_spans(text, cfg.chunk_max_chars, cfg.overlap_chars)
    if not text.strip():
        assert chunks == []
        return
    assert reconstruct_from_spans(chunks, spans) == text


@given(documents, configs)
@settings(max_examples=100)
def test_chunk_length_bounds(text, cfg):
    for chunk in chunk_text(text, cfg):
        assert 1 <= len(chunk) <= cfg.chunk_max_chars


@given(documents)
@settings(max_examples=50)
def test_deterministic(text):
    assert chunk_text(text, DEFAULT) == chunk_text(text, DEFAULT)
