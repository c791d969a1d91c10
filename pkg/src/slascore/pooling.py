"""Two-stage hierarchical pooling: frames -> chunk vector -> utterance vector.

Means are accumulated in double precision regardless of how the states
were stored, which keeps mean-of-means equal to the flat mean whenever
every chunk contributes the same number of rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backends import ChunkKey
from .errors import EmptyInputError, ShapeError
from .logmel import MelFilterbank, log_mel
from .text import PrefixSpec, TokenSequence, build_decoder_input


@dataclass(frozen=True)
class ChunkEmbedding:
    values: np.ndarray
    kind: str  # "acoustic" | "linguistic"
    chunk_index: int


@dataclass(frozen=True)
class UtteranceEmbedding:
    values: np.ndarray
    kind: str
    n_chunks: int


def mean_pool_rows(states: np.ndarray) -> np.ndarray:
    """Component-wise mean over the rows of a T x d matrix."""
    states = np.asarray(states, dtype=np.float64)
    if states.ndim != 2:
        raise ShapeError(f"expected a rank-2 matrix, got shape {states.shape}")
    if states.shape[0] == 0:
        raise EmptyInputError("cannot pool an empty state matrix")
    return states.mean(axis=0)


def mean_pool_chunks(embeddings: list[ChunkEmbedding]) -> UtteranceEmbedding:
    """Component-wise mean over chunk embeddings of a single kind."""
    if not embeddings:
        raise EmptyInputError("cannot pool zero chunk embeddings")
    kind = embeddings[0].kind
    dim = embeddings[0].values.shape
    for emb in embeddings[1:]:
        if emb.kind != kind:
            raise ShapeError(f"mixed embedding kinds: {emb.kind} vs {kind}")
        if emb.values.shape != dim:
            raise ShapeError(f"mixed embedding dims: {emb.values.shape} vs {dim}")
    stacked = np.stack([np.asarray(e.values, dtype=np.float64) for e in embeddings])
    return UtteranceEmbedding(values=stacked.mean(axis=0), kind=kind, n_chunks=len(embeddings))


def utterance_acoustic(
    chunks,
    backend,
    utterance_id: str | None = None,
    filterbank: MelFilterbank | None = None,
) -> UtteranceEmbedding:
    """log-mel -> encoder -> frame pooling per chunk, then chunk pooling."""
    if not chunks:
        raise EmptyInputError("no chunks to embed")
    per_chunk = []
    for chunk in chunks:
        key = ChunkKey(utterance_id, chunk.index) if utterance_id is not None else None
        spec = log_mel(chunk, filterbank=filterbank)
        states = backend.encoder_forward(spec, key=key)
        per_chunk.append(
            ChunkEmbedding(
                values=mean_pool_rows(states.values), kind="acoustic", chunk_index=chunk.index
            )
        )
    return mean_pool_chunks(per_chunk)


def utterance_linguistic(
    chunks,
    transcripts: list[str],
    tokenizer,
    backend,
    prefix: PrefixSpec | None = None,
    utterance_id: str | None = None,
    filterbank: MelFilterbank | None = None,
    exclude_prefix_from_pool: bool = False,
) -> UtteranceEmbedding:
    """Pseudo-teacher-forced decoder states pooled per chunk, then pooled again.

    Pooling covers every decoder position including the prefix tokens;
    ``exclude_prefix_from_pool`` drops the prefix rows instead (untested
    variant, off by default).
    """
    if not chunks:
        raise EmptyInputError("no chunks to embed")
    if len(transcripts) != len(chunks):
        raise ShapeError(f"{len(transcripts)} transcripts for {len(chunks)} chunks")
    if prefix is None:
        prefix = PrefixSpec()
    per_chunk = []
    for chunk, transcript in zip(chunks, transcripts):
        key = ChunkKey(utterance_id, chunk.index) if utterance_id is not None else None
        spec = log_mel(chunk, filterbank=filterbank)
        enc = backend.encoder_forward(spec, key=key)
        tokens = build_decoder_input(prefix, tokenizer.tokenize(transcript))
        _check_vocab(tokens, tokenizer)
        states = backend.decoder_forward(tokens, enc, key=key)
        rows = states.values
        if exclude_prefix_from_pool:
            if rows.shape[0] <= len(prefix.ids):
                raise EmptyInputError(
                    f"chunk {chunk.index}: no transcript rows left after dropping the prefix"
                )
            rows = rows[len(prefix.ids) :]
        per_chunk.append(
            ChunkEmbedding(
                values=mean_pool_rows(rows), kind="linguistic", chunk_index=chunk.index
            )
        )
    return mean_pool_chunks(per_chunk)


def _check_vocab(tokens: TokenSequence, tokenizer) -> None:
    vocab_size = getattr(tokenizer, "vocab_size", None)
    if vocab_size is None:
        return
    for tok in tokens.ids:
        if not (0 <= tok < vocab_size):
            raise ShapeError(f"token id {tok} outside vocabulary of size {vocab_size}")
