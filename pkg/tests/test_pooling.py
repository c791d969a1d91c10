import numpy as np
import pytest

from slascore.audio import Chunk, SegmentationConfig, AudioSignal, segment
from slascore.backends import MockBackend
from slascore.errors import EmptyInputError, ShapeError
from slascore.logmel import log_mel
from slascore.pooling import (
    ChunkEmbedding,
    mean_pool_chunks,
    mean_pool_rows,
    utterance_acoustic,
    utterance_linguistic,
)
from slascore.text import ByteTokenizer


def emb(values, kind="acoustic", idx=1):
    return ChunkEmbedding(values=np.asarray(values, dtype=np.float64), kind=kind, chunk_index=idx)


class TestMeanPoolRows:
    def test_constant_rows_fixed_point(self):
        v = np.array([1.5, -2.0, 0.25])
        out = mean_pool_rows(np.tile(v, (7, 1)))
        np.testing.assert_array_equal(out, v)

    def test_simple_arithmetic(self):
        out = mean_pool_rows(np.array([[1.0, 3.0], [3.0, 1.0]]))
        np.testing.assert_array_equal(out, [2.0, 2.0])

    def test_row_permutation_invariant(self):
        rng = np.random.default_rng(5)
        m = rng.normal(size=(20, 6))
        np.testing.assert_allclose(
            mean_pool_rows(m), mean_pool_rows(m[rng.permutation(20)]), rtol=1e-12
        )

    def test_empty_rejected(self):
        with pytest.raises(EmptyInputError):
            mean_pool_rows(np.zeros((0, 4)))


class TestMeanPoolChunks:
    def test_single_chunk_identity(self):
        out = mean_pool_chunks([emb([1.0, 2.0])])
        np.testing.assert_array_equal(out.values, [1.0, 2.0])
        assert out.n_chunks == 1

    def test_opposite_vectors_cancel(self):
        v = np.array([0.5, -1.0, 2.0])
        out = mean_pool_chunks([emb(v), emb(-v, idx=2)])
        np.testing.assert_array_equal(out.values, np.zeros(3))

    def test_against_direct_summation_oracle(self):
        rng = np.random.default_rng(6)
        vs = [rng.normal(size=16) for _ in range(3)]
        oracle = sum(vs) / 3.0
        out = mean_pool_chunks([emb(v, idx=i + 1) for i, v in enumerate(vs)])
        np.testing.assert_allclose(out.values, oracle, atol=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(EmptyInputError):
            mean_pool_chunks([])

    def test_mixed_kind_rejected(self):
        with pytest.raises(ShapeError):
            mean_pool_chunks([emb([1.0]), emb([2.0], kind="linguistic", idx=2)])


def make_chunks(k: int, chunk_len: int = 32000, seed: int = 0):
    """k overlapping chunks of deterministic audio."""
    stride = chunk_len * 3 // 4
    n = chunk_len + (k - 1) * stride
    rng = np.random.default_rng(seed)
    signal = AudioSignal(samples=rng.normal(scale=0.1, size=n), sample_rate=16000)
    cfg = SegmentationConfig(chunk_len=chunk_len, stride=stride)
    chunks = segment(signal, cfg)
    assert len(chunks) == k
    return chunks


class TestUtterancePipelines:
    def test_identical_chunks_equal_single(self):
        backend = MockBackend()
        chunks = make_chunks(1)
        sample = chunks[0].samples
        twice = [
            Chunk(index=1, start_offset=0, samples=sample),
            Chunk(index=2, start_offset=0, samples=sample),
        ]
        single = utterance_acoustic(chunks, backend)
        double = utterance_acoustic(twice, backend)
        np.testing.assert_allclose(single.values, double.values, rtol=1e-12)
        assert double.n_chunks == 2

    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6])
    def test_hierarchical_equals_flat_mean(self, k):
        # Equal frame counts per chunk make mean-of-means equal the flat mean.
        backend = MockBackend()
        chunks = make_chunks(k, seed=k)
        hierarchical = utterance_acoustic(chunks, backend)
        all_rows = np.concatenate(
            [backend.encoder_forward(log_mel(c)).values for c in chunks], axis=0
        )
        flat = all_rows.mean(axis=0)
        deviation = np.abs(hierarchical.values - flat) / np.maximum(np.abs(flat), 1e-12)
        assert deviation.max() <= 1e-6

    def test_chunk_order_permutation_invariance(self):
        backend = MockBackend()
        chunks = make_chunks(4, seed=9)
        fwd = utterance_acoustic(chunks, backend)
        rev = utterance_acoustic(list(reversed(chunks)), backend)
        np.testing.assert_allclose(fwd.values, rev.values, rtol=1e-12)

    def test_norm_bounded_by_max_row_norm(self):
        backend = MockBackend()
        chunks = make_chunks(3, seed=10)
        out = utterance_acoustic(chunks, backend)
        max_row = max(
            np.linalg.norm(backend.encoder_forward(log_mel(c)).values, axis=1).max()
            for c in chunks
        )
        assert np.linalg.norm(out.values) <= max_row + 1e-12

    def test_linguistic_mirrors_acoustic(self):
        backend = MockBackend()
        tokenizer = ByteTokenizer()
        chunks = make_chunks(2, seed=11)
        texts = ["hello there", "more words here"]
        out = utterance_linguistic(chunks, texts, tokenizer, backend)
        assert out.kind == "linguistic"
        assert out.values.shape == (16,)
        assert out.n_chunks == 2
        # deterministic
        again = utterance_linguistic(chunks, texts, tokenizer, backend)
        np.testing.assert_array_equal(out.values, again.values)

    def test_linguistic_transcript_count_mismatch(self):
        backend = MockBackend()
        with pytest.raises(ShapeError):
            utterance_linguistic(make_chunks(2, seed=1), ["only one"], ByteTokenizer(), backend)

    def test_exclude_prefix_changes_result(self):
        backend = MockBackend()
        tokenizer = ByteTokenizer()
        chunks = make_chunks(1, seed=12)
        with_prefix = utterance_linguistic(chunks, ["abc"], tokenizer, backend)
        without = utterance_linguistic(
            chunks, ["abc"], tokenizer, backend, exclude_prefix_from_pool=True
        )
        assert not np.allclose(with_prefix.values, without.values)
