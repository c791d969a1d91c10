/**
 * Interchange tensor files, bit-compatible with the scoring pipeline:
 * one UTF-8 JSON header line ending in '\n', then product(shape) * 4
 * bytes of little-endian IEEE-754 binary32.
 */

import * as fs from "node:fs";

export interface Tensor {
  name: string;
  shape: number[];
  values: Float64Array; // row-major
}

const HEADER_KEYS = ["name", "dtype", "shape", "order", "endian"] as const;

export function encodeTensor(name: string, shape: number[], values: ArrayLike<number>): Buffer {
  const count = shape.reduce((a, b) => a * b, 1);
  if (values.length !== count) {
    throw new Error(`tensor ${name}: ${values.length} values for shape [${shape}]`);
  }
  // Key order matters: identical tensors must serialize to identical bytes.
  const header =
    JSON.stringify({ name, dtype: "f32", shape, order: "row-major", endian: "little" }) + "\n";
  const payload = Buffer.alloc(count * 4);
  const view = new DataView(payload.buffer, payload.byteOffset, payload.byteLength);
  for (let i = 0; i < count; i++) {
    view.setFloat32(i * 4, Math.fround(values[i]), true);
  }
  return Buffer.concat([Buffer.from(header, "utf-8"), payload]);
}

export function writeTensor(
  path: string,
  name: string,
  shape: number[],
  values: ArrayLike<number>,
): void {
  fs.writeFileSync(path, encodeTensor(name, shape, values));
}

export function readTensor(path: string): Tensor {
  const raw = fs.readFileSync(path);
  const nl = raw.indexOf(0x0a);
  if (nl < 0) {
    throw new Error(`${path}: missing header line terminator`);
  }
  let header: Record<string, unknown>;
  try {
    header = JSON.parse(raw.subarray(0, nl).toString("utf-8"));
  } catch (exc) {
    throw new Error(`${path}: unparseable header: ${exc}`);
  }
  const keys = Object.keys(header).sort().join(",");
  if (keys !== [...HEADER_KEYS].sort().join(",")) {
    throw new Error(`${path}: unexpected header keys [${keys}]`);
  }
  if (header.dtype !== "f32" || header.order !== "row-major" || header.endian !== "little") {
    throw new Error(`${path}: unsupported dtype/order/endian`);
  }
  if (typeof header.name !== "string") {
    throw new Error(`${path}: name must be a string`);
  }
  const shape = header.shape;
  if (!Array.isArray(shape) || !shape.every((s) => Number.isInteger(s) && s >= 0)) {
    throw new Error(`${path}: shape must be a list of ints >= 0`);
  }
  const count = (shape as number[]).reduce((a, b) => a * b, 1);
  const payload = raw.subarray(nl + 1);
  if (payload.length !== count * 4) {
    throw new Error(`${path}: payload is ${payload.length} bytes, expected ${count * 4}`);
  }
  const view = new DataView(payload.buffer, payload.byteOffset, payload.byteLength);
  const values = new Float64Array(count);
  for (let i = 0; i < count; i++) {
    values[i] = view.getFloat32(i * 4, true);
  }
  return { name: header.name, shape: shape as number[], values };
}
