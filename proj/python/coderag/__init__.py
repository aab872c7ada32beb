"""Python bindings for the coderag retrieval-augmented code completion toolkit."""

from ._core import (
    DataError,
    Error,
    FormatError,
    LexicalIndex,
    ProtocolError,
    ProviderError,
    QualityGateError,
    bleu,
    copy_oracle_answer,
    cosine,
    count_tokens,
    edit_similarity,
    exact_match,
    index_terms,
    mock_embed,
    normalize_line,
    protocol,
    score,
    segment,
    similarity_prompt,
    tokens,
)

__all__ = [
    "DataError",
    "Error",
    "FormatError",
    "LexicalIndex",
    "ProtocolError",
    "ProviderError",
    "QualityGateError",
    "bleu",
    "copy_oracle_answer",
    "cosine",
    "count_tokens",
    "edit_similarity",
    "exact_match",
    "index_terms",
    "mock_embed",
    "normalize_line",
    "protocol",
    "score",
    "segment",
    "similarity_prompt",
    "tokens",
]
