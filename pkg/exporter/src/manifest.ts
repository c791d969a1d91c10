/** JSONL manifest shared with the scoring pipeline. */

import * as fs from "node:fs";

export interface ManifestEntry {
  id: string;
  audio: string;
  transcript?: string | string[];
  prompt_text?: string;
  image?: string;
  sts_score?: number;
  itc_score?: number;
  raw_score?: number;
  split?: string;
}

export function loadManifest(path: string): ManifestEntry[] {
  const lines = fs.readFileSync(path, "utf-8").split("\n");
  const entries: ManifestEntry[] = [];
  const seen = new Set<string>();
  lines.forEach((line, i) => {
    if (!line.trim()) {
      return;
    }
    let doc: ManifestEntry;
    try {
      doc = JSON.parse(line);
    } catch (exc) {
      throw new Error(`${path}:${i + 1}: invalid JSON: ${exc}`);
    }
    if (typeof doc.id !== "string" || typeof doc.audio !== "string") {
      throw new Error(`${path}:${i + 1}: entry needs string 'id' and 'audio'`);
    }
    if (seen.has(doc.id)) {
      throw new Error(`${path}:${i + 1}: duplicate utterance id '${doc.id}'`);
    }
    seen.add(doc.id);
    entries.push(doc);
  });
  if (entries.length === 0) {
    throw new Error(`${path}: empty manifest`);
  }
  return entries;
}
