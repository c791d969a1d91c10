/**
 * Log-mel front-end identical to the scoring pipeline's: STFT with
 * n_fft=400 / hop=160, periodic Hann window, reflect padding, final
 * boundary frame dropped; 80 Slaney-style area-normalized triangular mel
 * filters; log10 with a 1e-10 floor, clamped to (max - 8), then
 * (x + 4) / 4.
 */

export const N_FFT = 400;
export const HOP = 160;
export const N_MELS = 80;

export interface LogMel {
  values: Float64Array; // row-major, frames x mels
  frames: number;
  mels: number;
}

interface DftTables {
  cos: Float64Array; // (nFft/2+1) x nFft
  sin: Float64Array;
  window: Float64Array;
}

const tableCache = new Map<number, DftTables>();

function dftTables(nFft: number): DftTables {
  let tables = tableCache.get(nFft);
  if (tables) {
    return tables;
  }
  const bins = nFft / 2 + 1;
  const cos = new Float64Array(bins * nFft);
  const sin = new Float64Array(bins * nFft);
  for (let k = 0; k < bins; k++) {
    for (let n = 0; n < nFft; n++) {
      const angle = (2 * Math.PI * k * n) / nFft;
      cos[k * nFft + n] = Math.cos(angle);
      sin[k * nFft + n] = Math.sin(angle);
    }
  }
  const window = new Float64Array(nFft);
  for (let n = 0; n < nFft; n++) {
    window[n] = 0.5 - 0.5 * Math.cos((2 * Math.PI * n) / nFft); // periodic Hann
  }
  tables = { cos, sin, window };
  tableCache.set(nFft, tables);
  return tables;
}

function reflectPad(samples: Float64Array, pad: number): Float64Array {
  const n = samples.length;
  const out = new Float64Array(n + 2 * pad);
  out.set(samples, pad);
  for (let i = 0; i < pad; i++) {
    out[pad - 1 - i] = samples[i + 1];
    out[pad + n + i] = samples[n - 2 - i];
  }
  return out;
}

/** Magnitude-squared STFT: (len/hop) frames x (nFft/2 + 1) bins. */
export function stftPower(samples: Float64Array, nFft = N_FFT, hop = HOP): Float64Array[] {
  const { cos, sin, window } = dftTables(nFft);
  const bins = nFft / 2 + 1;
  const padded = reflectPad(samples, nFft / 2);
  const nFrames = Math.floor((padded.length - nFft) / hop) + 1 - 1; // final frame dropped
  const power: Float64Array[] = [];
  const windowed = new Float64Array(nFft);
  for (let t = 0; t < nFrames; t++) {
    const base = t * hop;
    for (let n = 0; n < nFft; n++) {
      windowed[n] = padded[base + n] * window[n];
    }
    const row = new Float64Array(bins);
    for (let k = 0; k < bins; k++) {
      let re = 0;
      let im = 0;
      const off = k * nFft;
      for (let n = 0; n < nFft; n++) {
        re += windowed[n] * cos[off + n];
        im -= windowed[n] * sin[off + n];
      }
      row[k] = re * re + im * im;
    }
    power.push(row);
  }
  return power;
}

function hzToMel(freq: number): number {
  const fSp = 200.0 / 3;
  if (freq < 1000.0) {
    return freq / fSp;
  }
  return 15.0 + Math.log(freq / 1000.0) / (Math.log(6.4) / 27.0);
}

function melToHz(mel: number): number {
  const fSp = 200.0 / 3;
  if (mel < 15.0) {
    return fSp * mel;
  }
  return 1000.0 * Math.exp((Math.log(6.4) / 27.0) * (mel - 15.0));
}

/** Slaney filterbank rows (nMels x bins), area-normalized. */
export function melFilterbank(sampleRate = 16000, nFft = N_FFT, nMels = N_MELS): Float64Array[] {
  const bins = nFft / 2 + 1;
  const fftFreqs = Array.from({ length: bins }, (_, i) => (i * sampleRate) / 2 / (bins - 1));
  const maxMel = hzToMel(sampleRate / 2);
  const edges = Array.from({ length: nMels + 2 }, (_, i) => melToHz((i * maxMel) / (nMels + 1)));
  const rows: Float64Array[] = [];
  for (let m = 0; m < nMels; m++) {
    const row = new Float64Array(bins);
    const [lo, center, hi] = [edges[m], edges[m + 1], edges[m + 2]];
    const enorm = 2.0 / (hi - lo);
    let any = false;
    for (let b = 0; b < bins; b++) {
      const f = fftFreqs[b];
      const up = (f - lo) / (center - lo);
      const down = (hi - f) / (hi - center);
      const w = Math.max(0, Math.min(up, down));
      if (w > 0) {
        any = true;
      }
      row[b] = w * enorm;
    }
    if (!any) {
      throw new Error(`mel filter ${m} covers no FFT bin (nMels too large for nFft)`);
    }
    rows.push(row);
  }
  return rows;
}

export function logMel(samples: Float64Array): LogMel {
  const power = stftPower(samples);
  const filters = melFilterbank();
  const frames = power.length;
  const values = new Float64Array(frames * N_MELS);
  let maxLog = -Infinity;
  for (let t = 0; t < frames; t++) {
    for (let m = 0; m < N_MELS; m++) {
      const filter = filters[m];
      let acc = 0;
      for (let b = 0; b < filter.length; b++) {
        acc += filter[b] * power[t][b];
      }
      const v = Math.log10(Math.max(acc, 1e-10));
      values[t * N_MELS + m] = v;
      if (v > maxLog) {
        maxLog = v;
      }
    }
  }
  const floor = maxLog - 8.0;
  for (let i = 0; i < values.length; i++) {
    values[i] = (Math.max(values[i], floor) + 4.0) / 4.0;
  }
  return { values, frames, mels: N_MELS };
}
