/** Byte-level tokenizer plus the fixed decoder control prefix. */

export const DEFAULT_PREFIX_IDS = [50258, 50259, 50359, 50363];

export function tokenizeBytes(text: string): number[] {
  return Array.from(new TextEncoder().encode(text));
}

export function buildDecoderInput(prefixIds: number[], transcriptTokens: number[]): number[] {
  return [...prefixIds, ...transcriptTokens];
}
