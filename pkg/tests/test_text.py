import numpy as np
import pytest

from slascore.audio import SegmentationConfig
from slascore.backends import MockBackend
from slascore.errors import ConfigError, DataError, TensorLookupError
from slascore.pooling import utterance_linguistic
from slascore.text import (
    ByteTokenizer,
    ManifestTranscriptProvider,
    PrefixSpec,
    TokenSequence,
    build_decoder_input,
    chunk_transcripts,
    load_tokenizer,
    split_words_proportionally,
)


def proportional_split_oracle(text: str, shares):
    """Brute force: walk words placing cut points at rounded cumulative shares."""
    words = text.split()
    total = sum(shares)
    bounds = [0]
    cum = 0.0
    for s in shares[:-1]:
        cum += s
        bounds.append(int(np.floor(len(words) * cum / total + 0.5)))
    bounds.append(len(words))
    return [" ".join(words[a:b]) for a, b in zip(bounds, bounds[1:])]


class TestBuildDecoderInput:
    def test_concatenation(self):
        prefix = PrefixSpec()
        transcript = TokenSequence(ids=(15947, 11), provenance="transcript")
        z = build_decoder_input(prefix, transcript)
        assert z.ids == (50258, 50259, 50359, 50363, 15947, 11)
        assert z.provenance == "combined"

    def test_empty_transcript(self):
        z = build_decoder_input(PrefixSpec(), TokenSequence(ids=(), provenance="transcript"))
        assert len(z) == 4
        assert z.ids == PrefixSpec().ids

    def test_length_additivity(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            n = int(rng.integers(0, 30))
            transcript = TokenSequence(
                ids=tuple(int(v) for v in rng.integers(0, 256, size=n)), provenance="transcript"
            )
            z = build_decoder_input(PrefixSpec(), transcript)
            assert len(z) == 4 + n
            assert z.ids[:4] == PrefixSpec().ids
            assert z.ids[4:] == transcript.ids


class TestByteTokenizer:
    def test_ascii_mapping(self):
        assert ByteTokenizer().tokenize("ab").ids == (97, 98)

    def test_empty(self):
        assert ByteTokenizer().tokenize("").ids == ()

    def test_round_trip_ascii(self):
        tok = ByteTokenizer()
        for s in ("hello world", "The picture shows...", "", "a"):
            assert tok.detokenize(tok.tokenize(s)) == s

    def test_loader(self):
        assert load_tokenizer("byte").name == "byte"
        with pytest.raises(ConfigError):
            load_tokenizer("vocab:does-not-exist.json")


class TestChunkTranscripts:
    CFG = SegmentationConfig(chunk_len=30, stride=25)

    def test_per_chunk_list_passthrough(self):
        provider = ManifestTranscriptProvider({"u": ["one", "two", "three"]})
        assert chunk_transcripts(provider, "u", 3, self.CFG) == ["one", "two", "three"]

    def test_list_length_mismatch(self):
        provider = ManifestTranscriptProvider({"u": ["one", "two"]})
        with pytest.raises(DataError):
            chunk_transcripts(provider, "u", 3, self.CFG)

    def test_whole_text_equal_shares(self):
        # Zero-overlap config -> equal shares -> 30 words split 10/10/10.
        cfg = SegmentationConfig(chunk_len=10, stride=10)
        words = " ".join(f"w{i}" for i in range(30))
        provider = ManifestTranscriptProvider({"u": words})
        parts = chunk_transcripts(provider, "u", 3, cfg)
        assert [len(p.split()) for p in parts] == [10, 10, 10]
        assert " ".join(parts) == words

    def test_whole_text_matches_oracle(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            k = int(rng.integers(1, 6))
            stride = int(rng.integers(1, 50))
            chunk_len = stride + int(rng.integers(0, 50))
            cfg = SegmentationConfig(chunk_len=chunk_len, stride=stride)
            n_words = int(rng.integers(0, 60))
            text = " ".join(f"w{i}" for i in range(n_words))
            provider = ManifestTranscriptProvider({"u": text})
            got = chunk_transcripts(provider, "u", k, cfg)
            shares = [float(stride)] * (k - 1) + [float(chunk_len)]
            expected = [text] if k == 1 else proportional_split_oracle(text, shares)
            assert got == expected
            assert " ".join(got).split() == text.split()

    def test_k_equals_one_unchanged(self):
        provider = ManifestTranscriptProvider({"u": "exactly as written"})
        assert chunk_transcripts(provider, "u", 1, self.CFG) == ["exactly as written"]

    def test_missing_utterance(self):
        provider = ManifestTranscriptProvider({})
        with pytest.raises(TensorLookupError):
            chunk_transcripts(provider, "ghost", 2, self.CFG)

    def test_absent_transcript_gives_silent_chunks(self):
        provider = ManifestTranscriptProvider({"u": None})
        assert chunk_transcripts(provider, "u", 2, self.CFG) == ["", ""]


class CountingBackend(MockBackend):
    def __init__(self):
        super().__init__()
        self.decoder_calls = 0

    def decoder_forward(self, tokens, enc, key=None):
        self.decoder_calls += 1
        return super().decoder_forward(tokens, enc, key=key)


def test_exactly_one_decoder_call_per_chunk():
    # Pseudo-teacher forcing never decodes autoregressively.
    from tests.test_pooling import make_chunks

    backend = CountingBackend()
    chunks = make_chunks(3, seed=21)
    utterance_linguistic(chunks, ["a", "b", "c"], ByteTokenizer(), backend)
    assert backend.decoder_calls == 3


def test_split_words_proportionally_rejects_zero_total():
    with pytest.raises(DataError):
        split_words_proportionally("a b", [0.0, 0.0])
