/** CLI: slascore-export --manifest m.jsonl --model-config models/x.json --out dir */

import { parseArgs } from "node:util";

import { runExport } from "./export.js";
import { SAMPLE_RATE } from "./wav.js";

function main(): number {
  const { values } = parseArgs({
    options: {
      manifest: { type: "string" },
      "model-config": { type: "string" },
      out: { type: "string" },
      "chunk-seconds": { type: "string", default: "30" },
      "stride-seconds": { type: "string", default: "25" },
      prefix: { type: "string" },
    },
  });
  if (!values.manifest || !values["model-config"] || !values.out) {
    console.error(
      "usage: slascore-export --manifest <jsonl> --model-config <json> --out <dir> " +
        "[--chunk-seconds 30] [--stride-seconds 25] [--prefix 50258,50259,50359,50363]",
    );
    return 2;
  }
  const result = runExport({
    manifestPath: values.manifest,
    modelConfigPath: values["model-config"],
    outRoot: values.out,
    segmentation: {
      chunkLen: Math.round(Number(values["chunk-seconds"]) * SAMPLE_RATE),
      stride: Math.round(Number(values["stride-seconds"]) * SAMPLE_RATE),
      padShort: true,
    },
    prefixIds: values.prefix ? values.prefix.split(",").map(Number) : undefined,
  });
  console.log(
    `export: ${result.ok.length} exported, ${result.skipped.length} skipped, ` +
      `${result.failed.length} failed -> ${values.out}`,
  );
  for (const failure of result.failed) {
    console.error(`  failed ${failure.id}: ${failure.error}`);
  }
  return result.failed.length === 0 ? 0 : 1;
}

process.exitCode = main();
