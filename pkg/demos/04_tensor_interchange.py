#!/usr/bin/env python3
# The interchange tensor format bridging exporters and the pipeline:
# one JSON header line + little-endian float32 payload, bit-exact.

import tempfile
from pathlib import Path

import numpy as np

from slascore import ChunkKey, FileBackend, read_tensor, write_tensor
from slascore.logmel import LogMelSpectrogram

root = Path(tempfile.mkdtemp())

values = np.arange(12, dtype=np.float32).reshape(3, 4)
path = root / "example.tensor"
write_tensor(path, "demo/example", values)

raw = path.read_bytes()
header, payload = raw.split(b"\n", 1)
print("header:", header.decode())
print(f"payload: {len(payload)} bytes = 3*4 values * 4 bytes")

name, back = read_tensor(path)
print(f"round trip '{name}': bit-identical = {back.tobytes() == values.tobytes()}")

# A file-backed embedding store mirrors what an offline exporter writes:
#   <root>/<utterance>/chunk_<iii>.enc.tensor  (frames/2 x d)
#   <root>/<utterance>/chunk_<iii>.dec.tensor  (decoder positions x d)
utt = root / "u042"
utt.mkdir()
enc = np.random.default_rng(1).normal(size=(50, 16)).astype(np.float32)
write_tensor(utt / "chunk_001.enc.tensor", "u042/chunk_001.enc", enc)

backend = FileBackend(root)
spec = LogMelSpectrogram(values=np.zeros((100, 80)))  # 100 frames -> 50 encoder rows
states = backend.encoder_forward(spec, key=ChunkKey("u042", 1))
print(f"\nfile-backed encoder states: {states.values.shape}, "
      f"bit-identical = {states.values.astype(np.float32).tobytes() == enc.tobytes()}")

# Corrupt files are rejected with integrity errors:
bad = utt / "chunk_002.enc.tensor"
bad.write_bytes(raw[:-6])
try:
    read_tensor(bad)
except Exception as exc:
    print(f"truncated file rejected: {type(exc).__name__}: {exc}")
