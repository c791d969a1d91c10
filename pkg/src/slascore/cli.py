"""Command-line entry point.

Verbs: extract, train, eval, ablate, export-embeddings, gradcheck.
Relative paths inside the config resolve against the config file's
directory; audio paths in the manifest resolve against the manifest's
directory. Exit code is 0 only on full success.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import SlascoreError
from .gradcheck import REL_TOLERANCE, run_gradcheck
from .pipeline import (
    RunConfig,
    ablate,
    eval_on_store,
    export_embeddings,
    extract,
    load_manifest,
    load_run_config,
    train_on_store,
)


def _add_common(parser: argparse.ArgumentParser, need_manifest: bool = False) -> None:
    parser.add_argument("--config", required=True, help="run config JSON")
    parser.add_argument("--manifest", required=need_manifest, help="JSONL manifest")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--out", default=None, help="output directory")


def _load(args) -> tuple[RunConfig, Path]:
    config_path = Path(args.config)
    config = load_run_config(config_path)
    if args.seed is not None:
        config.train.seed = args.seed
    return config, config_path.parent


def _store_dir(config: RunConfig, base_dir: Path, override: str | None) -> Path:
    cache_root = Path(override) if override else Path(config.cache_dir)
    if not cache_root.is_absolute():
        cache_root = base_dir / cache_root
    return cache_root / config.feature_hash()


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="slascore")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract utterance features into the cache")
    _add_common(p, need_manifest=True)

    p = sub.add_parser("train", help="train the classifier on cached features")
    _add_common(p)
    p.add_argument("--features", default=None, help="feature store dir (default: cache/<hash>)")

    p = sub.add_parser("eval", help="evaluate a model on one split")
    _add_common(p)
    p.add_argument("--features", default=None)
    p.add_argument("--model", required=True, help="model directory")
    p.add_argument("--split", default="dev")

    p = sub.add_parser("ablate", help="train/evaluate the six feature-flag rows")
    _add_common(p)
    p.add_argument("--features", default=None)
    p.add_argument("--split", default="dev")

    p = sub.add_parser("export-embeddings", help="dump utterance embeddings for one split")
    _add_common(p)
    p.add_argument("--features", default=None)
    p.add_argument("--split", default="dev")

    p = sub.add_parser("gradcheck", help="verify analytic gradients by finite differences")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--draws", type=int, default=100)
    p.add_argument("--out", default=None)

    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except SlascoreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _dispatch(args) -> int:
    if args.command == "gradcheck":
        results = run_gradcheck(seed=args.seed, n_draws=args.draws)
        all_ok = True
        for res in results:
            worst = max(res.max_rel_error.values())
            status = "ok" if res.passed else "FAIL"
            all_ok &= res.passed
            print(f"gradcheck[{res.flag_setting}]: max rel error {worst:.3e} "
                  f"(tolerance {REL_TOLERANCE:g}) {status}")
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            doc = [
                {"flags": r.flag_setting, "max_rel_error": r.max_rel_error, "passed": r.passed}
                for r in results
            ]
            (out / "gradcheck.json").write_text(
                json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
            )
        return 0 if all_ok else 1

    config, base_dir = _load(args)

    if args.command == "extract":
        manifest_path = Path(args.manifest)
        entries = load_manifest(manifest_path)
        cache_root = Path(args.out) if args.out else Path(config.cache_dir)
        if not cache_root.is_absolute():
            cache_root = base_dir / cache_root
        result = extract(entries, config, cache_root, manifest_path.parent)
        print(
            f"extract: {len(result.ok)} extracted, {len(result.cached)} cached, "
            f"{len(result.failures)} failed -> {result.store_dir}"
        )
        for uid, msg in result.failures:
            print(f"  failed {uid}: {msg}", file=sys.stderr)
        return 0 if not result.failures else 1

    store = Path(args.features) if getattr(args, "features", None) else _store_dir(
        config, base_dir, None
    )

    if args.command == "train":
        out_dir = Path(args.out) if args.out else base_dir / "model"
        _, losses, train_acc = train_on_store(store, config, out_dir)
        print(f"train: {len(losses)} steps, final loss {losses[-1]:.4f}, "
              f"train accuracy {train_acc:.3f} -> {out_dir}")
        return 0

    if args.command == "eval":
        report = eval_on_store(args.model, store, args.split)
        text = report.to_json()
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            (out / f"eval_{args.split}.json").write_text(text, encoding="utf-8")
        print(text, end="")
        return 0

    if args.command == "ablate":
        out_dir = Path(args.out) if args.out else base_dir / "ablate"
        rows = ablate(store, config, out_dir, split=args.split)
        for row in rows:
            print(
                f"{row['name']:>20}: weighted_f1 {row['weighted_f1']:.3f} "
                f"accuracy {row['accuracy']:.3f} binary {row['binary_accuracy']:.3f}"
            )
        return 0

    if args.command == "export-embeddings":
        out_dir = Path(args.out) if args.out else base_dir / "embeddings"
        export_embeddings(store, args.split, out_dir)
        print(f"export-embeddings: wrote {args.split} dump -> {out_dir}")
        return 0

    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
