"""Encoder/decoder hidden-state backends.

The transformer itself lives behind this boundary: a backend consumes a
log-mel spectrogram (encoder side) or a decoder input token sequence plus
the chunk's encoder states (decoder side) and returns hidden-state
matrices. Two implementations are provided:

* :class:`MockBackend` - a fixed closed form with no RNG, so feature
  goldens reproduce bit-for-bit in any implementation;
* :class:`FileBackend` - reads tensors exported offline by a real model,
  laid out as ``<root>/<utterance_id>/chunk_<iii>.<enc|dec>.tensor``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ShapeError, TensorIntegrityError, TensorLookupError
from .logmel import LogMelSpectrogram
from .tensorio import read_tensor

MOCK_HIDDEN_DIM = 16


@dataclass(frozen=True)
class BackendDescriptor:
    name: str
    hidden_dim: int
    downsample_factor: int = 2


@dataclass(frozen=True)
class ChunkKey:
    """Identifies one chunk of one utterance inside a file-backed store."""

    utterance_id: str
    chunk_index: int  # 1-based


@dataclass(frozen=True)
class EncoderStates:
    """(frames / downsample) x d matrix of final encoder states."""

    values: np.ndarray


@dataclass(frozen=True)
class DecoderStates:
    """(decoder input length) x d matrix of final decoder states."""

    values: np.ndarray


class MockBackend:
    """Deterministic reference backend (d = 16, time stride 2).

    Encoder: ``H[t, j] = a_j * m_t + b_j`` where ``m_t`` is the mean over
    mel bins of frames 2t and 2t+1 averaged, ``a_j = sin(0.1 (j+1))``, and
    ``b_j = 0.01 cos(0.1 (j+1))``.

    Decoder: row p is ``E[z_p] + g`` where ``E[k, j] = sin((k+1)(j+1) 1e-3)``
    and ``g`` is the column mean of the chunk's encoder states.
    """

    def __init__(self):
        self.descriptor = BackendDescriptor(name="mock", hidden_dim=MOCK_HIDDEN_DIM)
        j = np.arange(1, MOCK_HIDDEN_DIM + 1, dtype=np.float64)
        self._a = np.sin(0.1 * j)
        self._b = 0.01 * np.cos(0.1 * j)

    def encoder_forward(
        self, spec: LogMelSpectrogram, key: ChunkKey | None = None
    ) -> EncoderStates:
        frames = spec.values
        n_pairs = frames.shape[0] // 2
        paired = 0.5 * (frames[0 : 2 * n_pairs : 2] + frames[1 : 2 * n_pairs : 2])
        m = paired.mean(axis=1)
        values = m[:, None] * self._a[None, :] + self._b[None, :]
        return EncoderStates(values=values)

    def decoder_forward(
        self, tokens, enc: EncoderStates, key: ChunkKey | None = None
    ) -> DecoderStates:
        ids = np.asarray(tokens.ids, dtype=np.float64)
        if ids.size == 0:
            raise ShapeError("decoder input must contain at least one token")
        j = np.arange(1, MOCK_HIDDEN_DIM + 1, dtype=np.float64)
        embed = np.sin((ids[:, None] + 1.0) * j[None, :] * 1e-3)
        g = enc.values.mean(axis=0)
        return DecoderStates(values=embed + g[None, :])


class FileBackend:
    """Read-only store of exported hidden states.

    Tensors are validated on every read: header integrity, finiteness, and
    the shape contract (encoder rows = frames / downsample, both widths =
    the store's hidden dim). Reads are idempotent and byte-stable, so the
    backend is safe for concurrent use.
    """

    def __init__(self, root: str | Path, hidden_dim: int | None = None):
        self.root = Path(root)
        if not self.root.is_dir():
            raise TensorLookupError(f"backend root does not exist: {self.root}")
        self._hidden_dim = hidden_dim

    @property
    def descriptor(self) -> BackendDescriptor:
        return BackendDescriptor(
            name=f"files:{self.root}", hidden_dim=self._hidden_dim or -1
        )

    def _tensor_path(self, key: ChunkKey, side: str) -> Path:
        return self.root / key.utterance_id / f"chunk_{key.chunk_index:03d}.{side}.tensor"

    def _load(self, key: ChunkKey | None, side: str) -> np.ndarray:
        if key is None:
            raise TensorLookupError("file backend requires a chunk key")
        path = self._tensor_path(key, side)
        if not path.exists():
            raise TensorLookupError(
                f"no {side} tensor for ({key.utterance_id}, chunk {key.chunk_index}): {path}"
            )
        _, arr = read_tensor(path)
        values = arr.astype(np.float64)
        if values.ndim != 2:
            raise TensorIntegrityError(f"{path}: expected a rank-2 tensor, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise TensorIntegrityError(f"{path}: tensor contains non-finite values")
        if self._hidden_dim is None:
            self._hidden_dim = int(values.shape[1])
        elif values.shape[1] != self._hidden_dim:
            raise TensorIntegrityError(
                f"{path}: hidden dim {values.shape[1]} != store dim {self._hidden_dim}"
            )
        return values

    def encoder_forward(
        self, spec: LogMelSpectrogram, key: ChunkKey | None = None
    ) -> EncoderStates:
        values = self._load(key, "enc")
        expected_rows = spec.n_frames // 2
        if values.shape[0] != expected_rows:
            raise TensorIntegrityError(
                f"encoder tensor for {key}: {values.shape[0]} rows, "
                f"expected {expected_rows} for {spec.n_frames} input frames"
            )
        return EncoderStates(values=values)

    def decoder_forward(
        self, tokens, enc: EncoderStates, key: ChunkKey | None = None
    ) -> DecoderStates:
        values = self._load(key, "dec")
        if values.shape[0] < 1:
            raise TensorIntegrityError(f"decoder tensor for {key} has no rows")
        return DecoderStates(values=values)

    def aux_tensor(self, utterance_id: str, stem: str) -> np.ndarray | None:
        """Optional per-utterance auxiliary vector (sts_q, sts_t, itc_img, itc_txt)."""
        path = self.root / utterance_id / f"{stem}.tensor"
        if not path.exists():
            return None
        _, arr = read_tensor(path)
        return arr.astype(np.float64)
