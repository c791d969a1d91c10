"""WAV loading and fixed-length overlapping segmentation.

Only 16 kHz mono 16-bit PCM RIFF/WAVE files are accepted; anything else
fails loudly instead of being resampled or downmixed.
"""

from __future__ import annotations

import wave
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import AudioFormatError, AudioIOError, ConfigError

PIPELINE_SAMPLE_RATE = 16_000
DEFAULT_CHUNK_SECONDS = 30
DEFAULT_STRIDE_SECONDS = 25


@dataclass(frozen=True)
class AudioSignal:
    """Mono PCM samples scaled to [-1, 1]."""

    samples: np.ndarray
    sample_rate: int

    @property
    def n_samples(self) -> int:
        return int(self.samples.shape[0])

    @property
    def duration_seconds(self) -> float:
        return self.n_samples / self.sample_rate


@dataclass(frozen=True)
class SegmentationConfig:
    """Window length and stride, both in samples. ``overlap = chunk_len - stride``."""

    chunk_len: int = DEFAULT_CHUNK_SECONDS * PIPELINE_SAMPLE_RATE
    stride: int = DEFAULT_STRIDE_SECONDS * PIPELINE_SAMPLE_RATE
    pad_short: bool = True

    def __post_init__(self):
        if not (1 <= self.stride <= self.chunk_len):
            raise ConfigError(
                f"stride must satisfy 1 <= stride <= chunk_len, "
                f"got stride={self.stride}, chunk_len={self.chunk_len}"
            )

    @property
    def overlap(self) -> int:
        return self.chunk_len - self.stride


@dataclass(frozen=True)
class Chunk:
    """One fixed-length window. ``index`` is 1-based; length is always ``chunk_len``."""

    index: int
    start_offset: int
    samples: np.ndarray = field(repr=False)


def load_audio(path: str | Path) -> AudioSignal:
    """Read a 16 kHz mono s16le WAV file, scaling samples by 1/32768."""
    path = Path(path)
    if not path.exists():
        raise AudioIOError(f"audio file not found: {path}")
    try:
        with wave.open(str(path), "rb") as wav:
            n_channels = wav.getnchannels()
            sample_width = wav.getsampwidth()
            rate = wav.getframerate()
            n_frames = wav.getnframes()
            if n_channels != 1:
                raise AudioFormatError(
                    f"{path}: expected mono audio, got {n_channels} channels"
                )
            if sample_width != 2:
                raise AudioFormatError(
                    f"{path}: expected 16-bit PCM, got {8 * sample_width}-bit"
                )
            if rate != PIPELINE_SAMPLE_RATE:
                raise AudioFormatError(
                    f"{path}: expected {PIPELINE_SAMPLE_RATE} Hz, got {rate} Hz"
                )
            data = wav.readframes(n_frames)
    except wave.Error as exc:
        raise AudioFormatError(f"{path}: not a PCM RIFF/WAVE file: {exc}") from exc
    except EOFError as exc:
        raise AudioIOError(f"{path}: truncated WAV file") from exc
    if len(data) != n_frames * 2:
        raise AudioIOError(
            f"{path}: data chunk truncated ({len(data)} bytes for {n_frames} frames)"
        )
    samples = np.frombuffer(data, dtype="<i2").astype(np.float64) / 32768.0
    return AudioSignal(samples=samples, sample_rate=rate)


def save_audio(path: str | Path, signal: AudioSignal) -> None:
    """Write a mono s16le WAV file (test and demo fixture helper)."""
    clipped = np.clip(signal.samples, -1.0, 32767.0 / 32768.0)
    ints = np.round(clipped * 32768.0).astype("<i2")
    with wave.open(str(path), "wb") as wav:
        wav.setnchannels(1)
        wav.setsampwidth(2)
        wav.setframerate(signal.sample_rate)
        wav.writeframes(ints.tobytes())


def chunk_count(n_samples: int, cfg: SegmentationConfig) -> int:
    """Number of complete chunks: floor((N - L) / S) + 1 for N >= L."""
    if n_samples < cfg.chunk_len:
        return 1 if cfg.pad_short else 0
    return (n_samples - cfg.chunk_len) // cfg.stride + 1


def segment(signal: AudioSignal, cfg: SegmentationConfig) -> list[Chunk]:
    """Split a signal into K complete chunks at offsets 0, S, 2S, ...

    Trailing samples that do not fill a whole window are dropped. A signal
    shorter than one window yields a single zero-padded chunk when
    ``pad_short`` is set, and no chunks otherwise.
    """
    n = signal.n_samples
    length = cfg.chunk_len
    if n < length:
        if not cfg.pad_short:
            return []
        padded = np.zeros(length, dtype=np.float64)
        padded[:n] = signal.samples
        return [Chunk(index=1, start_offset=0, samples=padded)]
    chunks = []
    for i in range(chunk_count(n, cfg)):
        start = i * cfg.stride
        chunks.append(
            Chunk(index=i + 1, start_offset=start, samples=signal.samples[start : start + length])
        )
    return chunks
