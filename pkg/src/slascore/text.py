"""Decoder input construction without autoregressive decoding.

Each chunk's decoder input is the fixed control prefix followed by the
chunk's transcription tokens; the whole sequence is fed to the decoder in
a single forward pass (pseudo-teacher forcing).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError, TensorLookupError

# Standard non-timestamp control prefix of the speech backbone:
# start-of-transcript, English, transcribe, no-timestamps.
DEFAULT_PREFIX_IDS = (50258, 50259, 50359, 50363)

# Multilingual vocabulary size; control ids above must stay below this.
DEFAULT_VOCAB_SIZE = 51865


@dataclass(frozen=True)
class TokenSequence:
    ids: tuple[int, ...]
    provenance: str  # "prefix" | "transcript" | "combined"

    def __len__(self) -> int:
        return len(self.ids)


@dataclass(frozen=True)
class PrefixSpec:
    start_token: int = DEFAULT_PREFIX_IDS[0]
    language_token: int = DEFAULT_PREFIX_IDS[1]
    task_token: int = DEFAULT_PREFIX_IDS[2]
    no_timestamps_token: int = DEFAULT_PREFIX_IDS[3]

    @property
    def ids(self) -> tuple[int, ...]:
        return (
            self.start_token,
            self.language_token,
            self.task_token,
            self.no_timestamps_token,
        )

    def as_sequence(self) -> TokenSequence:
        return TokenSequence(ids=self.ids, provenance="prefix")


class ByteTokenizer:
    """Reference tokenizer mapping UTF-8 bytes to ids 0-255.

    The vocabulary size is the backbone's so control/prefix ids remain
    valid sequence members even though text only ever maps to 0-255.
    """

    name = "byte"
    vocab_size = DEFAULT_VOCAB_SIZE

    def tokenize(self, text: str) -> TokenSequence:
        return TokenSequence(ids=tuple(text.encode("utf-8")), provenance="transcript")

    def detokenize(self, tokens: TokenSequence) -> str:
        return bytes(tokens.ids).decode("utf-8")


def load_tokenizer(spec: str):
    """Resolve a tokenizer from its config selector. Only ``byte`` ships here;
    real vocab assets arrive alongside exported embeddings."""
    if spec == "byte":
        return ByteTokenizer()
    raise ConfigError(f"unknown tokenizer asset: {spec!r}")


def build_decoder_input(prefix: PrefixSpec, transcript_tokens: TokenSequence) -> TokenSequence:
    """z = [prefix; transcript]. The transcript may be empty (silent chunk)."""
    return TokenSequence(ids=prefix.ids + tuple(transcript_tokens.ids), provenance="combined")


@dataclass
class ManifestTranscriptProvider:
    """Per-chunk text lookup backed by manifest ``transcript`` fields.

    A string value is a whole-utterance transcript; a list gives one text
    per chunk. Entries without a transcript resolve to silent chunks.
    """

    texts: dict[str, str | list[str] | None] = field(default_factory=dict)

    def lookup(self, utterance_id: str) -> str | list[str] | None:
        if utterance_id not in self.texts:
            raise TensorLookupError(f"no transcript entry for utterance {utterance_id!r}")
        return self.texts[utterance_id]


@dataclass
class ExportDirTranscriptProvider:
    """Reads per-chunk texts written next to exported tensors."""

    root: Path

    def lookup(self, utterance_id: str) -> str | list[str] | None:
        utt_dir = Path(self.root) / utterance_id
        if not utt_dir.is_dir():
            raise TensorLookupError(f"no exported data for utterance {utterance_id!r}")
        paths = sorted(utt_dir.glob("chunk_*.txt"))
        if not paths:
            return None
        return [p.read_text(encoding="utf-8") for p in paths]


def split_words_proportionally(text: str, shares: list[float]) -> list[str]:
    """Split whitespace words into len(shares) texts, proportional to shares.

    Boundaries are placed by rounding the cumulative share, so the split is
    deterministic and the pieces concatenate back to the original words.
    """
    words = text.split()
    total = float(sum(shares))
    if total <= 0:
        raise DataError("proportional split needs positive total share")
    cuts = [0]
    cum = 0.0
    for share in shares[:-1]:
        cum += share
        cuts.append(int(np.floor(len(words) * cum / total + 0.5)))
    cuts.append(len(words))
    return [" ".join(words[cuts[i] : cuts[i + 1]]) for i in range(len(shares))]


def chunk_transcripts(provider, utterance_id: str, k: int, cfg) -> list[str]:
    """Resolve K per-chunk texts for one utterance.

    Per-chunk lists pass through unchanged; a whole-utterance string is
    split proportionally to each chunk's non-overlapped duration (stride
    samples per chunk, plus the full window for the last one); a missing
    transcript yields K empty texts.
    """
    value = provider.lookup(utterance_id)
    if value is None:
        return [""] * k
    if isinstance(value, list):
        if len(value) != k:
            raise DataError(
                f"utterance {utterance_id!r}: {len(value)} chunk transcripts for {k} chunks"
            )
        return [str(v) for v in value]
    if k == 1:
        return [str(value)]
    shares = [float(cfg.stride)] * (k - 1) + [float(cfg.chunk_len)]
    return split_words_proportionally(str(value), shares)
