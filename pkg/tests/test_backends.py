import numpy as np
import pytest

from slascore.backends import ChunkKey, FileBackend, MockBackend
from slascore.errors import ShapeError, TensorIntegrityError, TensorLookupError
from slascore.logmel import LogMelSpectrogram
from slascore.tensorio import write_tensor
from slascore.text import TokenSequence


def spec_of(values: np.ndarray) -> LogMelSpectrogram:
    return LogMelSpectrogram(values=np.asarray(values, dtype=np.float64))


def tokens_of(ids) -> TokenSequence:
    return TokenSequence(ids=tuple(ids), provenance="combined")


class TestMockEncoder:
    def test_silence_gives_constant_rows(self):
        spec = spec_of(np.full((100, 80), -1.5))
        states = MockBackend().encoder_forward(spec)
        j = np.arange(1, 17)
        expected = np.sin(0.1 * j) * (-1.5) + 0.01 * np.cos(0.1 * j)
        assert states.values.shape == (50, 16)
        np.testing.assert_allclose(states.values, np.tile(expected, (50, 1)), rtol=1e-12)

    def test_stride_two_row_count(self):
        spec = spec_of(np.zeros((3000, 80)))
        assert MockBackend().encoder_forward(spec).values.shape == (1500, 16)

    def test_matches_formula_on_random_input(self):
        rng = np.random.default_rng(42)
        x = rng.normal(size=(10, 8))
        states = MockBackend().encoder_forward(spec_of(x))
        j = np.arange(1, 17)
        a, b = np.sin(0.1 * j), 0.01 * np.cos(0.1 * j)
        for t in range(5):
            m = 0.5 * (x[2 * t] + x[2 * t + 1]).mean()
            np.testing.assert_allclose(states.values[t], a * m + b, rtol=1e-12)


class TestMockDecoder:
    def test_single_token_zero_encoder(self):
        backend = MockBackend()
        enc = backend.encoder_forward(spec_of(np.zeros((4, 8))))
        enc_zero = type(enc)(values=np.zeros_like(enc.values))
        states = backend.decoder_forward(tokens_of([0]), enc_zero)
        j = np.arange(1, 17)
        np.testing.assert_allclose(states.values[0], np.sin(j * 1e-3), rtol=1e-12)

    def test_row_count_matches_tokens(self):
        backend = MockBackend()
        enc = backend.encoder_forward(spec_of(np.ones((6, 4))))
        states = backend.decoder_forward(tokens_of([5, 6, 7]), enc)
        assert states.values.shape == (3, 16)

    def test_permuting_encoder_rows_is_invariant(self):
        backend = MockBackend()
        rng = np.random.default_rng(3)
        enc = backend.encoder_forward(spec_of(rng.normal(size=(20, 8))))
        perm = type(enc)(values=enc.values[rng.permutation(10)])
        a = backend.decoder_forward(tokens_of([1, 2]), enc).values
        b = backend.decoder_forward(tokens_of([1, 2]), perm).values
        np.testing.assert_allclose(a, b, rtol=1e-12)

    def test_empty_tokens_rejected(self):
        backend = MockBackend()
        enc = backend.encoder_forward(spec_of(np.zeros((4, 8))))
        with pytest.raises(ShapeError):
            backend.decoder_forward(tokens_of([]), enc)


class TestFileBackend:
    def _store(self, tmp_path, enc=None, dec=None, utt="u000", idx=1):
        utt_dir = tmp_path / utt
        utt_dir.mkdir(parents=True, exist_ok=True)
        if enc is not None:
            write_tensor(utt_dir / f"chunk_{idx:03d}.enc.tensor", "enc", enc)
        if dec is not None:
            write_tensor(utt_dir / f"chunk_{idx:03d}.dec.tensor", "dec", dec)
        return FileBackend(tmp_path)

    def test_round_trip_bit_identical(self, tmp_path):
        rng = np.random.default_rng(11)
        enc = rng.normal(size=(50, 16)).astype(np.float32)
        backend = self._store(tmp_path, enc=enc)
        spec = spec_of(np.zeros((100, 80)))
        out = backend.encoder_forward(spec, key=ChunkKey("u000", 1))
        assert out.values.astype(np.float32).tobytes() == enc.tobytes()

    def test_reads_are_stable(self, tmp_path):
        rng = np.random.default_rng(12)
        enc = rng.normal(size=(8, 4)).astype(np.float32)
        backend = self._store(tmp_path, enc=enc)
        spec = spec_of(np.zeros((16, 80)))
        a = backend.encoder_forward(spec, key=ChunkKey("u000", 1)).values
        b = backend.encoder_forward(spec, key=ChunkKey("u000", 1)).values
        np.testing.assert_array_equal(a, b)

    def test_missing_key_is_lookup_error(self, tmp_path):
        backend = self._store(tmp_path, enc=np.zeros((4, 2), dtype=np.float32))
        with pytest.raises(TensorLookupError, match="chunk 2"):
            backend.encoder_forward(spec_of(np.zeros((8, 80))), key=ChunkKey("u000", 2))

    def test_missing_key_requires_key(self, tmp_path):
        backend = self._store(tmp_path, enc=np.zeros((4, 2), dtype=np.float32))
        with pytest.raises(TensorLookupError, match="key"):
            backend.encoder_forward(spec_of(np.zeros((8, 80))))

    def test_row_count_mismatch_is_integrity_error(self, tmp_path):
        backend = self._store(tmp_path, enc=np.zeros((10, 4), dtype=np.float32))
        with pytest.raises(TensorIntegrityError, match="rows"):
            backend.encoder_forward(spec_of(np.zeros((8, 80))), key=ChunkKey("u000", 1))

    def test_width_mismatch_is_integrity_error(self, tmp_path):
        utt_dir = tmp_path / "u000"
        utt_dir.mkdir()
        write_tensor(utt_dir / "chunk_001.enc.tensor", "e", np.zeros((4, 4), dtype=np.float32))
        write_tensor(utt_dir / "chunk_001.dec.tensor", "d", np.zeros((3, 8), dtype=np.float32))
        backend = FileBackend(tmp_path)
        enc = backend.encoder_forward(spec_of(np.zeros((8, 80))), key=ChunkKey("u000", 1))
        with pytest.raises(TensorIntegrityError, match="hidden dim"):
            backend.decoder_forward(tokens_of([1]), enc, key=ChunkKey("u000", 1))

    def test_non_finite_is_integrity_error(self, tmp_path):
        enc = np.full((4, 2), np.nan, dtype=np.float32)
        backend = self._store(tmp_path, enc=enc)
        with pytest.raises(TensorIntegrityError, match="finite"):
            backend.encoder_forward(spec_of(np.zeros((8, 80))), key=ChunkKey("u000", 1))

    def test_missing_root_rejected(self, tmp_path):
        with pytest.raises(TensorLookupError):
            FileBackend(tmp_path / "absent")
