import wave
from pathlib import Path

import numpy as np
import pytest

from slascore.audio import AudioSignal, save_audio


@pytest.fixture
def wav_factory(tmp_path):
    """Write int16 sample arrays as WAV files with arbitrary properties."""

    def make(
        name: str,
        samples_int16: np.ndarray,
        rate: int = 16000,
        channels: int = 1,
        sampwidth: int = 2,
    ) -> Path:
        path = tmp_path / name
        data = np.asarray(samples_int16, dtype="<i2").tobytes()
        if sampwidth != 2:
            # Re-encode as 8-bit unsigned for the wrong-depth case.
            data = (np.asarray(samples_int16) // 256 + 128).astype(np.uint8).tobytes()
        with wave.open(str(path), "wb") as wav:
            wav.setnchannels(channels)
            wav.setsampwidth(sampwidth)
            wav.setframerate(rate)
            wav.writeframes(data)
        return path

    return make


@pytest.fixture
def tone_wav(tmp_path):
    """A 16 kHz mono sine WAV of a given duration."""

    def make(name: str, seconds: float, freq: float = 440.0, amp: float = 0.5) -> Path:
        n = int(seconds * 16000)
        t = np.arange(n) / 16000.0
        signal = AudioSignal(samples=amp * np.sin(2 * np.pi * freq * t), sample_rate=16000)
        path = tmp_path / name
        save_audio(path, signal)
        return path

    return make
