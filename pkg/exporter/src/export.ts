/**
 * The batch export job: for every manifest utterance write per-chunk
 * encoder/decoder state tensors and transcripts plus per-utterance
 * STS/ITC embedding vectors, in the layout the scoring pipeline's
 * file backend reads:
 *
 *   <out>/<utt>/chunk_001.enc.tensor   (frames/downsample) x d
 *   <out>/<utt>/chunk_001.dec.tensor   (prefix+transcript tokens) x d
 *   <out>/<utt>/chunk_001.txt
 *   <out>/<utt>/sts_q.tensor, sts_t.tensor, itc_img.tensor, itc_txt.tensor
 *   <out>/<utt>/sidecar.json           model version, d, prefix, scores
 *
 * Utterance writes are atomic (temp dir + rename). Failures are recorded
 * per entry and do not stop the job.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { logMel } from "./logmel.js";
import { loadManifest, type ManifestEntry } from "./manifest.js";
import { createProvider, loadModelConfig, type ModelProvider } from "./provider.js";
import { cosineScore, dotScore } from "./scores.js";
import { DEFAULT_SEGMENTATION, segment, splitTranscript, type SegmentationConfig } from "./segment.js";
import { writeTensor } from "./tensorio.js";
import { buildDecoderInput, tokenizeBytes, DEFAULT_PREFIX_IDS } from "./tokenizer.js";
import { loadWav } from "./wav.js";

export interface ExportJob {
  manifestPath: string;
  modelConfigPath: string;
  outRoot: string;
  segmentation?: SegmentationConfig;
  prefixIds?: number[];
}

export interface ExportResult {
  ok: string[];
  skipped: string[];
  failed: { id: string; error: string }[];
}

function chunkTexts(entry: ManifestEntry, k: number, cfg: SegmentationConfig): string[] {
  const transcript = entry.transcript;
  if (transcript === undefined || transcript === null) {
    return Array(k).fill("");
  }
  if (Array.isArray(transcript)) {
    if (transcript.length !== k) {
      throw new Error(`${entry.id}: ${transcript.length} chunk transcripts for ${k} chunks`);
    }
    return transcript.map(String);
  }
  return splitTranscript(String(transcript), k, cfg);
}

function exportUtterance(
  entry: ManifestEntry,
  provider: ModelProvider,
  cfg: SegmentationConfig,
  prefixIds: number[],
  audioDir: string,
  outRoot: string,
): void {
  const audioPath = path.isAbsolute(entry.audio) ? entry.audio : path.join(audioDir, entry.audio);
  const signal = loadWav(audioPath);
  const chunks = segment(signal, cfg);
  if (chunks.length === 0) {
    throw new Error(`${entry.id}: audio shorter than one chunk and padShort off`);
  }
  const texts = chunkTexts(entry, chunks.length, cfg);

  const tmpDir = path.join(outRoot, `.tmp-${entry.id}`);
  fs.rmSync(tmpDir, { recursive: true, force: true });
  fs.mkdirSync(tmpDir, { recursive: true });

  const chunkFiles: string[] = [];
  for (const chunk of chunks) {
    const spec = logMel(chunk.samples);
    const enc = provider.encoderStates(spec);
    const tag = `chunk_${String(chunk.index).padStart(3, "0")}`;
    writeTensor(
      path.join(tmpDir, `${tag}.enc.tensor`),
      `${entry.id}/${tag}.enc`,
      [enc.rows, enc.cols],
      enc.values,
    );
    const tokens = buildDecoderInput(prefixIds, tokenizeBytes(texts[chunk.index - 1]));
    const dec = provider.decoderStates(tokens, enc);
    writeTensor(
      path.join(tmpDir, `${tag}.dec.tensor`),
      `${entry.id}/${tag}.dec`,
      [dec.rows, dec.cols],
      dec.values,
    );
    fs.writeFileSync(path.join(tmpDir, `${tag}.txt`), texts[chunk.index - 1], "utf-8");
    chunkFiles.push(tag);
  }

  // Whole-utterance response text: chunk texts joined, overlap duplicates kept.
  const responseText = texts.join(" ").trim();
  const prompt = entry.prompt_text ?? "";
  const imageKey = entry.image ?? prompt;
  const stsQ = provider.sentenceEmbedding(prompt);
  const stsT = provider.sentenceEmbedding(responseText);
  const itcImg = provider.visionImageEmbedding(imageKey);
  const itcTxt = provider.visionTextEmbedding(responseText);
  writeTensor(path.join(tmpDir, "sts_q.tensor"), `${entry.id}/sts_q`, [stsQ.length], stsQ);
  writeTensor(path.join(tmpDir, "sts_t.tensor"), `${entry.id}/sts_t`, [stsT.length], stsT);
  writeTensor(path.join(tmpDir, "itc_img.tensor"), `${entry.id}/itc_img`, [itcImg.length], itcImg);
  writeTensor(path.join(tmpDir, "itc_txt.tensor"), `${entry.id}/itc_txt`, [itcTxt.length], itcTxt);

  const sidecar = {
    id: entry.id,
    model: {
      name: provider.config.name,
      version: provider.config.version,
      provider: provider.config.provider,
      hidden_dim: provider.config.hidden_dim,
      downsample_factor: provider.config.downsample_factor,
    },
    prefix_ids: prefixIds,
    k_chunks: chunks.length,
    chunks: chunkFiles,
    // Scores as computed exporter-side; the pipeline recomputes them from
    // the exported vectors, and the two must agree.
    sts_score: dotScore(stsQ, stsT),
    itc_score: cosineScore(itcImg, itcTxt),
  };
  fs.writeFileSync(path.join(tmpDir, "sidecar.json"), JSON.stringify(sidecar, null, 2) + "\n");

  const finalDir = path.join(outRoot, entry.id);
  fs.rmSync(finalDir, { recursive: true, force: true });
  fs.renameSync(tmpDir, finalDir);
}

export function runExport(job: ExportJob): ExportResult {
  const entries = loadManifest(job.manifestPath);
  const config = loadModelConfig(job.modelConfigPath);
  const provider = createProvider(config);
  const cfg = job.segmentation ?? DEFAULT_SEGMENTATION;
  const prefixIds = job.prefixIds ?? DEFAULT_PREFIX_IDS;
  const audioDir = path.dirname(job.manifestPath);
  fs.mkdirSync(job.outRoot, { recursive: true });

  const result: ExportResult = { ok: [], skipped: [], failed: [] };
  for (const entry of entries) {
    if (fs.existsSync(path.join(job.outRoot, entry.id, "sidecar.json"))) {
      result.skipped.push(entry.id);
      continue;
    }
    try {
      exportUtterance(entry, provider, cfg, prefixIds, audioDir, job.outRoot);
      result.ok.push(entry.id);
    } catch (exc) {
      result.failed.push({ id: entry.id, error: String(exc instanceof Error ? exc.message : exc) });
    }
  }
  const report = {
    model: { name: config.name, version: config.version, hidden_dim: config.hidden_dim },
    ok: [...result.ok].sort(),
    skipped: [...result.skipped].sort(),
    failed: result.failed,
  };
  fs.writeFileSync(
    path.join(job.outRoot, "export_report.json"),
    JSON.stringify(report, null, 2) + "\n",
  );
  return result;
}
