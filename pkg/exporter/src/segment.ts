/** Fixed-length overlapping segmentation: complete windows only. */

import { SAMPLE_RATE, type AudioSignal } from "./wav.js";

export interface SegmentationConfig {
  chunkLen: number; // samples
  stride: number; // samples
  padShort: boolean;
}

export const DEFAULT_SEGMENTATION: SegmentationConfig = {
  chunkLen: 30 * SAMPLE_RATE,
  stride: 25 * SAMPLE_RATE,
  padShort: true,
};

export interface Chunk {
  index: number; // 1-based
  startOffset: number;
  samples: Float64Array; // always chunkLen long
}

export function segment(signal: AudioSignal, cfg: SegmentationConfig): Chunk[] {
  if (cfg.stride < 1 || cfg.stride > cfg.chunkLen) {
    throw new Error(`invalid segmentation: stride ${cfg.stride}, chunkLen ${cfg.chunkLen}`);
  }
  const n = signal.samples.length;
  if (n < cfg.chunkLen) {
    if (!cfg.padShort) {
      return [];
    }
    const padded = new Float64Array(cfg.chunkLen);
    padded.set(signal.samples);
    return [{ index: 1, startOffset: 0, samples: padded }];
  }
  const k = Math.floor((n - cfg.chunkLen) / cfg.stride) + 1;
  const chunks: Chunk[] = [];
  for (let i = 0; i < k; i++) {
    const start = i * cfg.stride;
    chunks.push({
      index: i + 1,
      startOffset: start,
      samples: signal.samples.subarray(start, start + cfg.chunkLen),
    });
  }
  return chunks;
}

/**
 * Split a whole-utterance transcript into K per-chunk texts proportional
 * to each chunk's non-overlapped duration (stride samples per chunk, the
 * full window for the last one). Matches the pipeline's fallback rule.
 */
export function splitTranscript(text: string, k: number, cfg: SegmentationConfig): string[] {
  if (k === 1) {
    return [text];
  }
  const words = text.split(/\s+/).filter((w) => w.length > 0);
  const shares = Array.from({ length: k }, (_, i) => (i === k - 1 ? cfg.chunkLen : cfg.stride));
  const total = shares.reduce((a, b) => a + b, 0);
  const cuts = [0];
  let cum = 0;
  for (let i = 0; i < k - 1; i++) {
    cum += shares[i];
    cuts.push(Math.floor((words.length * cum) / total + 0.5));
  }
  cuts.push(words.length);
  const parts: string[] = [];
  for (let i = 0; i < k; i++) {
    parts.push(words.slice(cuts[i], cuts[i + 1]).join(" "));
  }
  return parts;
}
