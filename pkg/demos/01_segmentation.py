#!/usr/bin/env python3
# Segmenting long-form audio into overlapping fixed-length chunks.

import numpy as np

from slascore import AudioSignal, SegmentationConfig, segment

# An 85-second response at 16 kHz, the typical length in this task.
rate = 16000
n = 85 * rate
t = np.arange(n) / rate
signal = AudioSignal(samples=0.3 * np.sin(2 * np.pi * 440 * t), sample_rate=rate)

# 30-second windows with 25-second stride -> 5 seconds of overlap.
cfg = SegmentationConfig(chunk_len=30 * rate, stride=25 * rate)
chunks = segment(signal, cfg)

print(f"signal: {signal.duration_seconds:.0f} s, {signal.n_samples} samples")
print(f"window {cfg.chunk_len} samples, stride {cfg.stride}, overlap {cfg.overlap}")
print(f"K = {len(chunks)} chunks:")
for c in chunks:
    start_s = c.start_offset / rate
    print(f"  chunk {c.index}: samples [{c.start_offset}, {c.start_offset + cfg.chunk_len})"
          f" = [{start_s:.0f} s, {start_s + 30:.0f} s)")

# The last 5 s of chunk i equal the first 5 s of chunk i+1.
shared = np.array_equal(chunks[0].samples[-cfg.overlap:], chunks[1].samples[:cfg.overlap])
print(f"chunk 1 / chunk 2 overlap identical: {shared}")

# The tail beyond the last complete window is dropped:
covered = chunks[-1].start_offset + cfg.chunk_len
print(f"dropped tail: {(signal.n_samples - covered) / rate:.0f} s")

# Audio shorter than one window becomes a single zero-padded chunk.
short = AudioSignal(samples=signal.samples[: 11 * rate], sample_rate=rate)
padded = segment(short, cfg)
print(f"11 s input -> {len(padded)} padded chunk of {len(padded[0].samples)} samples")
