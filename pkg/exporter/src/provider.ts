/**
 * Model providers: everything that turns inputs into hidden states or
 * embedding vectors. The provider is the seam where real foundation
 * models plug in; the bundled "reference" provider is a deterministic
 * closed form (no RNG, no weights) whose hidden size comes from the
 * model configuration file, so exports are reproducible bit-for-bit and
 * the d=16 configuration matches the scoring pipeline's mock backend
 * exactly.
 */

import * as fs from "node:fs";

import type { LogMel } from "./logmel.js";

export interface ModelConfig {
  name: string;
  version: string;
  provider: string; // "reference" is the only one bundled
  hidden_dim: number;
  downsample_factor: number;
  sentence_dim: number;
  vision_dim: number;
}

export interface Matrix {
  rows: number;
  cols: number;
  values: Float64Array; // row-major
}

export interface ModelProvider {
  config: ModelConfig;
  /** Final encoder states for one chunk: (frames / downsample) x d. */
  encoderStates(spec: LogMel): Matrix;
  /** Final decoder states under teacher-forced input: tokens.length x d. */
  decoderStates(tokens: number[], enc: Matrix): Matrix;
  /** Sentence-embedding vector for STS scoring. */
  sentenceEmbedding(text: string): Float64Array;
  /** Vision-language embedding of the image (keyed by path or prompt). */
  visionImageEmbedding(imageKey: string): Float64Array;
  /** Vision-language embedding of the response text. */
  visionTextEmbedding(text: string): Float64Array;
}

export function loadModelConfig(path: string): ModelConfig {
  const doc = JSON.parse(fs.readFileSync(path, "utf-8"));
  for (const field of ["name", "version", "provider", "hidden_dim"]) {
    if (!(field in doc)) {
      throw new Error(`${path}: model configuration missing '${field}'`);
    }
  }
  return {
    name: doc.name,
    version: doc.version,
    provider: doc.provider,
    hidden_dim: doc.hidden_dim,
    downsample_factor: doc.downsample_factor ?? 2,
    sentence_dim: doc.sentence_dim ?? 16,
    vision_dim: doc.vision_dim ?? 16,
  };
}

export function createProvider(config: ModelConfig): ModelProvider {
  if (config.provider === "reference") {
    return new ReferenceProvider(config);
  }
  throw new Error(`unknown model provider '${config.provider}'`);
}

class ReferenceProvider implements ModelProvider {
  readonly config: ModelConfig;
  private readonly a: Float64Array;
  private readonly b: Float64Array;

  constructor(config: ModelConfig) {
    this.config = config;
    const d = config.hidden_dim;
    this.a = new Float64Array(d);
    this.b = new Float64Array(d);
    for (let j = 0; j < d; j++) {
      this.a[j] = Math.sin(0.1 * (j + 1));
      this.b[j] = 0.01 * Math.cos(0.1 * (j + 1));
    }
  }

  encoderStates(spec: LogMel): Matrix {
    const d = this.config.hidden_dim;
    const stride = this.config.downsample_factor;
    const rows = Math.floor(spec.frames / stride);
    const values = new Float64Array(rows * d);
    for (let t = 0; t < rows; t++) {
      // mean over mel bins of the `stride` pooled frames, averaged
      let m = 0;
      for (let s = 0; s < stride; s++) {
        const base = (t * stride + s) * spec.mels;
        for (let j = 0; j < spec.mels; j++) {
          m += spec.values[base + j];
        }
      }
      m /= stride * spec.mels;
      for (let j = 0; j < d; j++) {
        values[t * d + j] = this.a[j] * m + this.b[j];
      }
    }
    return { rows, cols: d, values };
  }

  decoderStates(tokens: number[], enc: Matrix): Matrix {
    if (tokens.length === 0) {
      throw new Error("decoder input must contain at least one token");
    }
    const d = this.config.hidden_dim;
    const g = new Float64Array(d);
    for (let t = 0; t < enc.rows; t++) {
      for (let j = 0; j < d; j++) {
        g[j] += enc.values[t * d + j];
      }
    }
    for (let j = 0; j < d; j++) {
      g[j] /= enc.rows;
    }
    const values = new Float64Array(tokens.length * d);
    for (let p = 0; p < tokens.length; p++) {
      for (let j = 0; j < d; j++) {
        values[p * d + j] = Math.sin((tokens[p] + 1) * (j + 1) * 1e-3) + g[j];
      }
    }
    return { rows: tokens.length, cols: d, values };
  }

  sentenceEmbedding(text: string): Float64Array {
    return byteEmbedding(text, this.config.sentence_dim, 3e-3, 0.5, Math.sin, Math.cos);
  }

  visionImageEmbedding(imageKey: string): Float64Array {
    return byteEmbedding(imageKey, this.config.vision_dim, 2e-3, 0.7, Math.cos, Math.sin);
  }

  visionTextEmbedding(text: string): Float64Array {
    return byteEmbedding(text, this.config.vision_dim, 2.5e-3, 0.9, Math.cos, Math.cos);
  }
}

/**
 * Deterministic text embedding: a per-dimension constant plus the mean of
 * a byte-frequency kernel. The constant keeps the norm nonzero even for
 * empty text.
 */
function byteEmbedding(
  text: string,
  dim: number,
  scale: number,
  phase: number,
  kernel: (x: number) => number,
  bias: (x: number) => number,
): Float64Array {
  const bytes = new TextEncoder().encode(text);
  const out = new Float64Array(dim);
  for (let j = 0; j < dim; j++) {
    out[j] = 0.1 * bias((j + 1) * phase);
  }
  if (bytes.length === 0) {
    return out;
  }
  for (let j = 0; j < dim; j++) {
    let acc = 0;
    for (const b of bytes) {
      acc += kernel((b + 1) * (j + 1) * scale);
    }
    out[j] += acc / bytes.length;
  }
  return out;
}
