/** Minimal RIFF/WAVE reader: 16 kHz mono 16-bit PCM only. */

import * as fs from "node:fs";

export const SAMPLE_RATE = 16000;

export interface AudioSignal {
  samples: Float64Array; // scaled by 1/32768 into [-1, 1]
  sampleRate: number;
}

export function loadWav(path: string): AudioSignal {
  const raw = fs.readFileSync(path);
  if (raw.length < 12 || raw.toString("ascii", 0, 4) !== "RIFF" || raw.toString("ascii", 8, 12) !== "WAVE") {
    throw new Error(`${path}: not a RIFF/WAVE file`);
  }
  let offset = 12;
  let format: { channels: number; rate: number; bits: number } | null = null;
  let data: Buffer | null = null;
  while (offset + 8 <= raw.length) {
    const chunkId = raw.toString("ascii", offset, offset + 4);
    const chunkSize = raw.readUInt32LE(offset + 4);
    const body = raw.subarray(offset + 8, offset + 8 + chunkSize);
    if (chunkId === "fmt ") {
      const audioFormat = body.readUInt16LE(0);
      if (audioFormat !== 1) {
        throw new Error(`${path}: not integer PCM (format tag ${audioFormat})`);
      }
      format = {
        channels: body.readUInt16LE(2),
        rate: body.readUInt32LE(4),
        bits: body.readUInt16LE(14),
      };
    } else if (chunkId === "data") {
      if (body.length < chunkSize) {
        throw new Error(`${path}: data chunk truncated (${body.length} of ${chunkSize} bytes)`);
      }
      data = body;
    }
    offset += 8 + chunkSize + (chunkSize % 2);
  }
  if (!format || !data) {
    throw new Error(`${path}: missing fmt/data chunk`);
  }
  if (format.channels !== 1) {
    throw new Error(`${path}: expected mono audio, got ${format.channels} channels`);
  }
  if (format.bits !== 16) {
    throw new Error(`${path}: expected 16-bit PCM, got ${format.bits}-bit`);
  }
  if (format.rate !== SAMPLE_RATE) {
    throw new Error(`${path}: expected ${SAMPLE_RATE} Hz, got ${format.rate} Hz`);
  }
  const n = Math.floor(data.length / 2);
  const samples = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    samples[i] = data.readInt16LE(i * 2) / 32768.0;
  }
  return { samples, sampleRate: format.rate };
}

/** Test helper: serialize samples in [-1, 1] as a mono s16le WAV buffer. */
export function encodeWav(samples: ArrayLike<number>, rate: number = SAMPLE_RATE): Buffer {
  const n = samples.length;
  const data = Buffer.alloc(n * 2);
  for (let i = 0; i < n; i++) {
    const clipped = Math.max(-1, Math.min(32767 / 32768, samples[i]));
    data.writeInt16LE(Math.round(clipped * 32768), i * 2);
  }
  const header = Buffer.alloc(44);
  header.write("RIFF", 0, "ascii");
  header.writeUInt32LE(36 + data.length, 4);
  header.write("WAVE", 8, "ascii");
  header.write("fmt ", 12, "ascii");
  header.writeUInt32LE(16, 16);
  header.writeUInt16LE(1, 20); // PCM
  header.writeUInt16LE(1, 22); // mono
  header.writeUInt32LE(rate, 24);
  header.writeUInt32LE(rate * 2, 28);
  header.writeUInt16LE(2, 32);
  header.writeUInt16LE(16, 34);
  header.write("data", 36, "ascii");
  header.writeUInt32LE(data.length, 40);
  return Buffer.concat([header, data]);
}
