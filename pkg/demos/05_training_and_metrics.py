#!/usr/bin/env python3
# Full pipeline on a synthetic corpus: extract features with the mock
# backend, train the classifier head, evaluate, and run the feature
# ablation grid.

import tempfile
from pathlib import Path

from slascore.pipeline import (
    ablate,
    eval_on_store,
    extract,
    load_manifest,
    load_run_config,
    train_on_store,
)
from slascore.synthetic import generate_dataset, write_default_config

root = Path(tempfile.mkdtemp())
print("working under", root)

manifest_path = generate_dataset(root, n_utterances=32, seed=2024)
config_path = write_default_config(root / "config.json", seed=11)
config = load_run_config(config_path)
config.train.steps = 400  # plenty for 32 utterances

entries = load_manifest(manifest_path)
print(f"manifest: {len(entries)} utterances, "
      f"{sum(1 for e in entries if e.split == 'train')} train / "
      f"{sum(1 for e in entries if e.split == 'dev')} dev")

result = extract(entries, config, root / "cache", manifest_path.parent)
print(f"extracted {len(result.ok)} feature records -> {result.store_dir}")

# Re-running is a cache hit, nothing recomputes.
again = extract(entries, config, root / "cache", manifest_path.parent)
print(f"re-run: {len(again.cached)} cached, {len(again.ok)} recomputed")

params, losses, train_acc = train_on_store(result.store_dir, config, root / "model")
print(f"\ntrained {len(losses)} steps: loss {losses[0]:.3f} -> {losses[-1]:.4f}, "
      f"train accuracy {train_acc:.3f}")

report = eval_on_store(root / "model", result.store_dir, "dev")
print(f"dev: weighted F1 {report.weighted_f1:.3f}, accuracy {report.accuracy:.3f}, "
      f"binary accuracy {report.binary_accuracy:.3f}")

print("\nablation grid (dev):")
config.train.steps = 200
for row in ablate(result.store_dir, config, root / "ablate", split="dev"):
    print(f"  {row['name']:>20}: wF1 {row['weighted_f1']:.3f} "
          f"acc {row['accuracy']:.3f} bin {row['binary_accuracy']:.3f}")
