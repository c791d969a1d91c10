"""Prompt-coherence (STS) and image-relevance (ITC) scores.

Both operate on externally produced embeddings; no model inference
happens here. STS is the raw dot product (the sentence embedder is
trained with dot-product similarity); ITC is the cosine similarity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateVectorError, ShapeError

ITC_EPSILON = 1e-6


@dataclass(frozen=True)
class SentenceEmbedding:
    values: np.ndarray
    source: str  # "prompt" | "response"


@dataclass(frozen=True)
class VisionTextEmbedding:
    values: np.ndarray
    source: str  # "image" | "text"


@dataclass(frozen=True)
class AuxScores:
    sts: float | None
    itc: float | None


def sts_score(e_q: SentenceEmbedding, e_t: SentenceEmbedding) -> float:
    """Dot product of prompt and response sentence embeddings."""
    q = np.asarray(e_q.values, dtype=np.float64)
    t = np.asarray(e_t.values, dtype=np.float64)
    if q.shape != t.shape:
        raise ShapeError(f"STS embedding shapes differ: {q.shape} vs {t.shape}")
    return float(np.dot(q, t))


def itc_score(b_img: VisionTextEmbedding, b_txt: VisionTextEmbedding) -> float:
    """Cosine similarity of image and text embeddings, in [-1, 1]."""
    img = np.asarray(b_img.values, dtype=np.float64)
    txt = np.asarray(b_txt.values, dtype=np.float64)
    if img.shape != txt.shape:
        raise ShapeError(f"ITC embedding shapes differ: {img.shape} vs {txt.shape}")
    norm_img = np.linalg.norm(img)
    norm_txt = np.linalg.norm(txt)
    if norm_img == 0.0 or norm_txt == 0.0:
        raise DegenerateVectorError("ITC requires nonzero-norm embeddings")
    return float(np.dot(img, txt) / (norm_img * norm_txt))
