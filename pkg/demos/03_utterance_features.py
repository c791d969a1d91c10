#!/usr/bin/env python3
# Hierarchical pooling: frames -> chunk embeddings -> utterance embeddings,
# for both the encoder (acoustic) and the teacher-forced decoder (linguistic).

import numpy as np

from slascore import (
    AudioSignal,
    ByteTokenizer,
    MockBackend,
    SegmentationConfig,
    log_mel,
    segment,
    utterance_acoustic,
    utterance_linguistic,
)
from slascore.text import PrefixSpec, build_decoder_input

rate = 16000
rng = np.random.default_rng(0)
n = 40 * rate
signal = AudioSignal(
    samples=0.1 * np.sin(2 * np.pi * 600 * np.arange(n) / rate) + 0.01 * rng.normal(size=n),
    sample_rate=rate,
)
cfg = SegmentationConfig(chunk_len=16 * rate, stride=12 * rate)
chunks = segment(signal, cfg)
backend = MockBackend()
print(f"{len(chunks)} chunks, backend d = {backend.descriptor.hidden_dim}")

# Acoustic path: log-mel -> encoder states -> mean over frames -> mean over chunks.
v_enc = utterance_acoustic(chunks, backend)
print(f"\nacoustic utterance embedding: shape {v_enc.values.shape}, K = {v_enc.n_chunks}")
print("first four dims:", np.round(v_enc.values[:4], 5))

# Because every chunk yields the same number of encoder frames, the
# two-stage mean equals one flat mean over all frames:
flat = np.concatenate(
    [backend.encoder_forward(log_mel(c)).values for c in chunks]
).mean(axis=0)
print("max |hierarchical - flat|:", np.abs(v_enc.values - flat).max())

# Linguistic path: decoder inputs are [prefix; transcript tokens], one
# forward pass per chunk, no autoregressive decoding.
tokenizer = ByteTokenizer()
texts = ["the picture shows a park", "people are having a picnic", "children play nearby"]
z0 = build_decoder_input(PrefixSpec(), tokenizer.tokenize(texts[0]))
print(f"\ndecoder input for chunk 1: {len(z0)} tokens "
      f"(4 prefix + {len(z0) - 4} transcript)")

v_dec = utterance_linguistic(chunks, texts, tokenizer, backend)
print(f"linguistic utterance embedding: shape {v_dec.values.shape}, K = {v_dec.n_chunks}")
print("first four dims:", np.round(v_dec.values[:4], 5))
