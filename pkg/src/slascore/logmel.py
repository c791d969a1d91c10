"""Log-Mel spectrogram front-end.

Matches the published front-end of the speech backbone the embeddings are
taken from, so file-backed and mock backends see identically shaped and
identically scaled inputs:

* STFT with n_fft=400, hop=160, periodic Hann window, reflect padding of
  n_fft/2 samples on each side, final boundary frame dropped (a 30 s
  chunk therefore yields exactly 3000 frames);
* 80 triangular mel filters on the Slaney scale, area-normalized;
* ``log10`` with a 1e-10 floor, clamped to (max - 8), then ``(x + 4) / 4``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .audio import PIPELINE_SAMPLE_RATE, Chunk
from .errors import ConfigError

N_FFT = 400
HOP_LENGTH = 160
N_MELS = 80
LOG_FLOOR = 1e-10


@dataclass(frozen=True)
class LogMelSpectrogram:
    """Normalized log-mel matrix, frames x mel bins."""

    values: np.ndarray

    @property
    def n_frames(self) -> int:
        return int(self.values.shape[0])

    @property
    def n_mels(self) -> int:
        return int(self.values.shape[1])


@dataclass(frozen=True)
class MelFilterbank:
    """Slaney-style triangular filters, one row per mel band."""

    weights: np.ndarray
    sample_rate: int
    n_fft: int


def _hz_to_mel(freq):
    # Slaney scale: linear below 1 kHz, logarithmic above.
    freq = np.asarray(freq, dtype=np.float64)
    f_sp = 200.0 / 3
    min_log_hz = 1000.0
    min_log_mel = min_log_hz / f_sp
    logstep = np.log(6.4) / 27.0
    mels = freq / f_sp
    log_region = freq >= min_log_hz
    mels = np.where(
        log_region,
        min_log_mel + np.log(np.maximum(freq, min_log_hz) / min_log_hz) / logstep,
        mels,
    )
    return mels


def _mel_to_hz(mels):
    mels = np.asarray(mels, dtype=np.float64)
    f_sp = 200.0 / 3
    min_log_hz = 1000.0
    min_log_mel = min_log_hz / f_sp
    logstep = np.log(6.4) / 27.0
    freqs = f_sp * mels
    log_region = mels >= min_log_mel
    freqs = np.where(log_region, min_log_hz * np.exp(logstep * (mels - min_log_mel)), freqs)
    return freqs


@lru_cache(maxsize=8)
def mel_filterbank(
    sample_rate: int = PIPELINE_SAMPLE_RATE, n_fft: int = N_FFT, n_mels: int = N_MELS
) -> MelFilterbank:
    """Build the triangular filter matrix, shape (n_mels, n_fft // 2 + 1).

    Filters are area-normalized (each scaled by 2 / bandwidth). Raises
    :class:`ConfigError` when a band is too narrow to cover any FFT bin.
    """
    n_bins = n_fft // 2 + 1
    fft_freqs = np.linspace(0.0, sample_rate / 2, n_bins)
    mel_edges = _mel_to_hz(np.linspace(0.0, _hz_to_mel(sample_rate / 2), n_mels + 2))

    fdiff = np.diff(mel_edges)
    ramps = mel_edges[:, None] - fft_freqs[None, :]
    lower = -ramps[:-2] / fdiff[:-1][:, None]
    upper = ramps[2:] / fdiff[1:][:, None]
    weights = np.maximum(0.0, np.minimum(lower, upper))

    enorm = 2.0 / (mel_edges[2 : n_mels + 2] - mel_edges[:n_mels])
    weights *= enorm[:, None]

    if np.any(weights.sum(axis=1) == 0.0):
        raise ConfigError(
            f"n_mels={n_mels} too large for n_fft={n_fft} at {sample_rate} Hz: "
            "some filters cover no FFT bin"
        )
    weights.setflags(write=False)
    return MelFilterbank(weights=weights, sample_rate=sample_rate, n_fft=n_fft)


def stft_power(chunk: Chunk, n_fft: int = N_FFT, hop: int = HOP_LENGTH) -> np.ndarray:
    """Magnitude-squared STFT, shape (len(chunk) // hop, n_fft // 2 + 1).

    The input is reflect-padded by n_fft/2 on each side and the final
    boundary frame is dropped, so frame t is centered on sample t * hop.
    """
    samples = np.asarray(chunk.samples, dtype=np.float64)
    half = n_fft // 2
    padded = np.pad(samples, half, mode="reflect")
    n_frames = (padded.shape[0] - n_fft) // hop + 1
    stride = padded.strides[0]
    frames = np.lib.stride_tricks.as_strided(
        padded, shape=(n_frames, n_fft), strides=(hop * stride, stride), writeable=False
    )
    window = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n_fft) / n_fft)  # periodic Hann
    spectrum = np.fft.rfft(frames * window, axis=1)
    power = np.abs(spectrum) ** 2
    return power[:-1]


def log_mel(chunk: Chunk, filterbank: MelFilterbank | None = None) -> LogMelSpectrogram:
    """Full front-end: STFT power -> mel projection -> normalized log10."""
    if filterbank is None:
        filterbank = mel_filterbank()
    power = stft_power(chunk, n_fft=filterbank.n_fft)
    mel = power @ filterbank.weights.T
    log_spec = np.log10(np.maximum(mel, LOG_FLOOR))
    log_spec = np.maximum(log_spec, log_spec.max() - 8.0)
    log_spec = (log_spec + 4.0) / 4.0
    return LogMelSpectrogram(values=log_spec)
