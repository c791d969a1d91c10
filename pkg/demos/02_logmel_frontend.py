#!/usr/bin/env python3
# The log-mel front-end: STFT, Slaney filterbank, normalized log energies.

import numpy as np

from slascore import mel_filterbank, log_mel, stft_power
from slascore.audio import Chunk

rate = 16000
n = 30 * rate
t = np.arange(n) / rate

# A tone that jumps from 440 Hz to 2 kHz halfway through.
samples = np.where(t < 15, np.sin(2 * np.pi * 440 * t), 0.2 * np.sin(2 * np.pi * 2000 * t))
chunk = Chunk(index=1, start_offset=0, samples=samples)

power = stft_power(chunk)
print(f"STFT power: {power.shape[0]} frames x {power.shape[1]} bins "
      f"(40 Hz per bin, 10 ms per frame)")
print(f"argmax bin, frame 100 (440 Hz zone):  {power[100].argmax()} -> "
      f"{power[100].argmax() * 40} Hz")
print(f"argmax bin, frame 2500 (2 kHz zone): {power[2500].argmax()} -> "
      f"{power[2500].argmax() * 40} Hz")

fb = mel_filterbank()
print(f"\nmel filterbank: {fb.weights.shape[0]} triangular filters x {fb.weights.shape[1]} bins")
print(f"filter weights nonnegative: {(fb.weights >= 0).all()}")

spec = log_mel(chunk)
print(f"\nlog-mel spectrogram: {spec.n_frames} frames x {spec.n_mels} mel bins")
print(f"value range [{spec.values.min():.3f}, {spec.values.max():.3f}] "
      f"(clamp bounds the spread to 2.0)")

# Silence maps to the constant floor (-10 + 4) / 4 = -1.5.
silence = log_mel(Chunk(index=1, start_offset=0, samples=np.zeros(n)))
print(f"silence -> constant {silence.values.min():.2f}")
