/** STS (dot product) and ITC (cosine) over provider embeddings. */

export function dotScore(a: Float64Array, b: Float64Array): number {
  if (a.length !== b.length) {
    throw new Error(`embedding dims differ: ${a.length} vs ${b.length}`);
  }
  let acc = 0;
  for (let i = 0; i < a.length; i++) {
    acc += a[i] * b[i];
  }
  return acc;
}

export function cosineScore(a: Float64Array, b: Float64Array): number {
  const dot = dotScore(a, b);
  const na = Math.sqrt(dotScore(a, a));
  const nb = Math.sqrt(dotScore(b, b));
  if (na === 0 || nb === 0) {
    throw new Error("cosine requires nonzero-norm embeddings");
  }
  return dot / (na * nb);
}
