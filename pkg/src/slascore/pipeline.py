"""Manifest-driven orchestration: extract, train, evaluate, ablate, export.

The manifest is JSON Lines (one utterance per line); the run config is a
single JSON document carrying every hyperparameter with its published
default. Extracted features are cached under a content hash of the
feature-affecting config, so re-running extraction is a no-op and the
whole pipeline is byte-deterministic for a fixed seed.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from .audio import PIPELINE_SAMPLE_RATE, SegmentationConfig, load_audio, segment
from .backends import ChunkKey, FileBackend, MockBackend
from .classifier import (
    ClassifierConfig,
    TrainConfig,
    classify,
    load_params,
    save_params,
    train,
)
from .errors import ConfigError, DataError, SlascoreError, TensorLookupError
from .logmel import log_mel, mel_filterbank
from .metrics import EvalReport, discretize, evaluate
from .pooling import ChunkEmbedding, mean_pool_chunks, mean_pool_rows
from .scores import AuxScores, SentenceEmbedding, VisionTextEmbedding, itc_score, sts_score
from .tensorio import write_tensor, read_tensor
from .text import (
    DEFAULT_PREFIX_IDS,
    ExportDirTranscriptProvider,
    ManifestTranscriptProvider,
    PrefixSpec,
    build_decoder_input,
    chunk_transcripts,
    load_tokenizer,
)

VALID_SPLITS = ("train", "dev", "seen_test", "unseen_test")

ABLATION_ROWS = (
    ("acoustic", dict(use_acoustic=True, use_linguistic=False, use_sts=False, use_itc=False)),
    ("linguistic", dict(use_acoustic=False, use_linguistic=True, use_sts=False, use_itc=False)),
    ("acoustic+linguistic", dict(use_acoustic=True, use_linguistic=True, use_sts=False, use_itc=False)),
    ("all", dict(use_acoustic=True, use_linguistic=True, use_sts=True, use_itc=True)),
    ("all-itc", dict(use_acoustic=True, use_linguistic=True, use_sts=True, use_itc=False)),
    ("all-sts", dict(use_acoustic=True, use_linguistic=True, use_sts=False, use_itc=True)),
)


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    audio: str
    raw_score: float
    split: str
    transcript: str | list[str] | None = None
    prompt_text: str | None = None
    sts_score: float | None = None
    itc_score: float | None = None


def load_manifest(path: str | Path) -> list[ManifestEntry]:
    """Parse and validate a JSONL manifest."""
    path = Path(path)
    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
        try:
            entry = ManifestEntry(**doc)
        except TypeError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from exc
        if entry.id in seen:
            raise DataError(f"{path}:{lineno}: duplicate utterance id {entry.id!r}")
        seen.add(entry.id)
        if not (1.0 <= entry.raw_score <= 5.0):
            raise DataError(f"{path}:{lineno}: raw_score {entry.raw_score} outside [1, 5]")
        if entry.split not in VALID_SPLITS:
            raise DataError(f"{path}:{lineno}: unknown split {entry.split!r}")
        entries.append(entry)
    if not entries:
        raise DataError(f"{path}: empty manifest")
    return entries


@dataclass
class RunConfig:
    segmentation: SegmentationConfig = field(default_factory=SegmentationConfig)
    backend: str = "mock"
    tokenizer: str = "byte"
    prefix_ids: tuple[int, ...] = DEFAULT_PREFIX_IDS
    exclude_prefix_from_pool: bool = False
    features: ClassifierConfig = field(default_factory=ClassifierConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    cache_dir: str = "cache"

    def feature_hash(self) -> str:
        """Content hash of everything that affects extracted features."""
        doc = {
            "chunk_len": self.segmentation.chunk_len,
            "stride": self.segmentation.stride,
            "pad_short": self.segmentation.pad_short,
            "backend": self.backend,
            "tokenizer": self.tokenizer,
            "prefix_ids": list(self.prefix_ids),
            "exclude_prefix_from_pool": self.exclude_prefix_from_pool,
        }
        blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()[:16]

    def echo(self) -> dict:
        """Config echo for artifact metadata (no filesystem paths)."""
        return {
            "segmentation": {
                "chunk_len": self.segmentation.chunk_len,
                "stride": self.segmentation.stride,
                "pad_short": self.segmentation.pad_short,
            },
            "backend": self.backend,
            "tokenizer": self.tokenizer,
            "prefix_ids": list(self.prefix_ids),
            "exclude_prefix_from_pool": self.exclude_prefix_from_pool,
            "features": asdict(self.features),
            "train": asdict(self.train),
        }


def load_run_config(path: str | Path) -> RunConfig:
    """Read a run config JSON, applying defaults for any omitted field."""
    path = Path(path)
    doc = json.loads(path.read_text(encoding="utf-8"))
    known = {
        "segmentation",
        "backend",
        "tokenizer",
        "prefix_ids",
        "exclude_prefix_from_pool",
        "features",
        "train",
        "cache_dir",
    }
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")

    seg_doc = doc.get("segmentation", {})
    seg_unknown = set(seg_doc) - {"chunk_seconds", "stride_seconds", "pad_short"}
    if seg_unknown:
        raise ConfigError(f"{path}: unknown segmentation keys {sorted(seg_unknown)}")
    seg = SegmentationConfig(
        chunk_len=int(round(seg_doc.get("chunk_seconds", 30) * PIPELINE_SAMPLE_RATE)),
        stride=int(round(seg_doc.get("stride_seconds", 25) * PIPELINE_SAMPLE_RATE)),
        pad_short=bool(seg_doc.get("pad_short", True)),
    )
    try:
        features = ClassifierConfig(**doc.get("features", {}))
        train_cfg = TrainConfig(**doc.get("train", {}))
    except TypeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return RunConfig(
        segmentation=seg,
        backend=doc.get("backend", "mock"),
        tokenizer=doc.get("tokenizer", "byte"),
        prefix_ids=tuple(doc.get("prefix_ids", DEFAULT_PREFIX_IDS)),
        exclude_prefix_from_pool=bool(doc.get("exclude_prefix_from_pool", False)),
        features=features,
        train=train_cfg,
        cache_dir=doc.get("cache_dir", "cache"),
    )


def resolve_backend(selector: str, base_dir: Path):
    if selector == "mock":
        return MockBackend()
    if selector.startswith("files:"):
        root = Path(selector[len("files:") :])
        if not root.is_absolute():
            root = base_dir / root
        return FileBackend(root)
    raise ConfigError(f"unknown backend selector {selector!r}")


@dataclass
class FeatureRecord:
    id: str
    venc: np.ndarray
    vdec: np.ndarray
    sts: float | None
    itc: float | None
    raw_score: float
    class_label: int
    split: str
    k_chunks: int


@dataclass
class ExtractResult:
    store_dir: Path
    ok: list[str]
    cached: list[str]
    failures: list[tuple[str, str]]


def _resolve_transcripts(entry: ManifestEntry, backend, k: int, seg: SegmentationConfig) -> list[str]:
    if isinstance(backend, FileBackend):
        exported = ExportDirTranscriptProvider(backend.root)
        try:
            value = exported.lookup(entry.id)
        except TensorLookupError:
            value = None
        if value is not None:
            if len(value) != k:
                raise DataError(
                    f"utterance {entry.id!r}: {len(value)} exported transcripts for {k} chunks"
                )
            return value
    provider = ManifestTranscriptProvider({entry.id: entry.transcript})
    return chunk_transcripts(provider, entry.id, k, seg)


def _aux_from_tensors(backend, utterance_id: str) -> AuxScores:
    sts = itc = None
    if isinstance(backend, FileBackend):
        e_q = backend.aux_tensor(utterance_id, "sts_q")
        e_t = backend.aux_tensor(utterance_id, "sts_t")
        if e_q is not None and e_t is not None:
            sts = sts_score(
                SentenceEmbedding(e_q, source="prompt"), SentenceEmbedding(e_t, source="response")
            )
        b_img = backend.aux_tensor(utterance_id, "itc_img")
        b_txt = backend.aux_tensor(utterance_id, "itc_txt")
        if b_img is not None and b_txt is not None:
            itc = itc_score(
                VisionTextEmbedding(b_img, source="image"), VisionTextEmbedding(b_txt, source="text")
            )
    return AuxScores(sts=sts, itc=itc)


def extract_utterance(entry: ManifestEntry, config: RunConfig, backend, audio_dir: Path) -> FeatureRecord:
    """Run the full feature stage for one utterance (both embedding paths)."""
    audio_path = Path(entry.audio)
    if not audio_path.is_absolute():
        audio_path = audio_dir / audio_path
    signal = load_audio(audio_path)
    chunks = segment(signal, config.segmentation)
    if not chunks:
        raise DataError(f"utterance {entry.id!r}: audio shorter than one chunk and pad_short off")

    tokenizer = load_tokenizer(config.tokenizer)
    prefix = PrefixSpec(*config.prefix_ids)
    transcripts = _resolve_transcripts(entry, backend, len(chunks), config.segmentation)
    filterbank = mel_filterbank()

    acoustic: list[ChunkEmbedding] = []
    linguistic: list[ChunkEmbedding] = []
    for chunk, transcript in zip(chunks, transcripts):
        key = ChunkKey(entry.id, chunk.index)
        spec = log_mel(chunk, filterbank=filterbank)
        enc = backend.encoder_forward(spec, key=key)
        acoustic.append(
            ChunkEmbedding(mean_pool_rows(enc.values), kind="acoustic", chunk_index=chunk.index)
        )
        tokens = build_decoder_input(prefix, tokenizer.tokenize(transcript))
        dec = backend.decoder_forward(tokens, enc, key=key)
        rows = dec.values
        if config.exclude_prefix_from_pool:
            rows = rows[len(prefix.ids) :]
        linguistic.append(
            ChunkEmbedding(mean_pool_rows(rows), kind="linguistic", chunk_index=chunk.index)
        )
    venc = mean_pool_chunks(acoustic)
    vdec = mean_pool_chunks(linguistic)

    # Manifest scalars take precedence over exported embedding tensors.
    aux = _aux_from_tensors(backend, entry.id)
    sts = entry.sts_score if entry.sts_score is not None else aux.sts
    itc = entry.itc_score if entry.itc_score is not None else aux.itc

    return FeatureRecord(
        id=entry.id,
        venc=venc.values,
        vdec=vdec.values,
        sts=sts,
        itc=itc,
        raw_score=entry.raw_score,
        class_label=discretize(entry.raw_score),
        split=entry.split,
        k_chunks=len(chunks),
    )


def _write_record(store_dir: Path, record: FeatureRecord) -> None:
    utt_dir = store_dir / record.id
    utt_dir.mkdir(parents=True, exist_ok=True)
    write_tensor(utt_dir / "venc.tensor", f"{record.id}/venc", record.venc)
    write_tensor(utt_dir / "vdec.tensor", f"{record.id}/vdec", record.vdec)
    doc = {
        "id": record.id,
        "k_chunks": record.k_chunks,
        "sts": record.sts,
        "itc": record.itc,
        "raw_score": record.raw_score,
        "class_label": record.class_label,
        "split": record.split,
    }
    # record.json is written last: its presence marks the record complete.
    (utt_dir / "record.json").write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _read_record(utt_dir: Path) -> FeatureRecord:
    doc = json.loads((utt_dir / "record.json").read_text(encoding="utf-8"))
    _, venc = read_tensor(utt_dir / "venc.tensor")
    _, vdec = read_tensor(utt_dir / "vdec.tensor")
    return FeatureRecord(
        id=doc["id"],
        venc=venc.astype(np.float64),
        vdec=vdec.astype(np.float64),
        sts=doc["sts"],
        itc=doc["itc"],
        raw_score=doc["raw_score"],
        class_label=doc["class_label"],
        split=doc["split"],
        k_chunks=doc["k_chunks"],
    )


def extract(
    entries: list[ManifestEntry],
    config: RunConfig,
    cache_root: str | Path,
    audio_dir: str | Path,
) -> ExtractResult:
    """Extract features for every manifest entry, skipping cached records.

    Individual failures are recorded and do not stop the run.
    """
    store_dir = Path(cache_root) / config.feature_hash()
    store_dir.mkdir(parents=True, exist_ok=True)
    backend = resolve_backend(config.backend, Path(audio_dir))
    ok: list[str] = []
    cached: list[str] = []
    failures: list[tuple[str, str]] = []
    for entry in entries:
        if (store_dir / entry.id / "record.json").exists():
            cached.append(entry.id)
            continue
        try:
            record = extract_utterance(entry, config, backend, Path(audio_dir))
        except (SlascoreError, OSError) as exc:
            failures.append((entry.id, str(exc)))
            continue
        _write_record(store_dir, record)
        ok.append(entry.id)
    report = {
        "feature_hash": config.feature_hash(),
        "ok": sorted(ok),
        "cached": sorted(cached),
        "failed": [{"id": uid, "error": msg} for uid, msg in failures],
    }
    (store_dir / "extract_report.json").write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return ExtractResult(store_dir=store_dir, ok=ok, cached=cached, failures=failures)


def load_feature_records(store_dir: str | Path) -> list[FeatureRecord]:
    store_dir = Path(store_dir)
    records = []
    for utt_dir in sorted(p for p in store_dir.iterdir() if p.is_dir()):
        if (utt_dir / "record.json").exists():
            records.append(_read_record(utt_dir))
    if not records:
        raise DataError(f"no feature records under {store_dir}")
    return records


def build_design(records: list[FeatureRecord], features: ClassifierConfig):
    """Assemble (X, aux, labels, ids) per the active feature flags."""
    xs, auxes, labels, ids = [], [], [], []
    for rec in records:
        parts = []
        if features.use_acoustic:
            parts.append(rec.venc)
        if features.use_linguistic:
            parts.append(rec.vdec)
        xs.append(np.concatenate(parts))
        aux_parts = []
        if features.use_sts:
            if rec.sts is None:
                raise DataError(f"utterance {rec.id!r}: STS flag on but no STS score")
            aux_parts.append(rec.sts)
        if features.use_itc:
            if rec.itc is None:
                raise DataError(f"utterance {rec.id!r}: ITC flag on but no ITC score")
            aux_parts.append(rec.itc)
        auxes.append(aux_parts)
        labels.append(rec.class_label)
        ids.append(rec.id)
    x = np.asarray(xs, dtype=np.float64)
    aux = np.asarray(auxes, dtype=np.float64).reshape(x.shape[0], -1)
    return x, aux, np.asarray(labels), ids


def train_on_store(
    store_dir: str | Path,
    config: RunConfig,
    out_dir: str | Path,
    features: ClassifierConfig | None = None,
):
    """Train the classifier on the store's train split; save model + log."""
    features = features or config.features
    records = [r for r in load_feature_records(store_dir) if r.split == "train"]
    if not records:
        raise DataError("feature store has no train-split records")
    x, aux, labels, _ = build_design(records, features)
    params, losses = train(x, aux, labels, features, config.train)
    preds = classify(params, x, aux)
    train_acc = float((preds == labels).mean())

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_params(
        out_dir,
        params,
        meta={
            "seed": config.train.seed,
            "feature_hash": config.feature_hash(),
            "run_config": config.echo(),
            "n_train": len(records),
        },
    )
    log = {"loss": losses, "final_train_accuracy": train_acc, "n_train": len(records)}
    (out_dir / "train_log.json").write_text(
        json.dumps(log, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return params, losses, train_acc


def eval_on_store(model_dir: str | Path, store_dir: str | Path, split: str) -> EvalReport:
    """Evaluate a serialized model on one split of a feature store."""
    if split not in VALID_SPLITS:
        raise DataError(f"unknown split {split!r}")
    params = load_params(model_dir)
    records = [r for r in load_feature_records(store_dir) if r.split == split]
    if not records:
        raise DataError(f"feature store has no {split!r} records")
    x, aux, labels, _ = build_design(records, params.config)
    preds = classify(params, x, aux)
    return evaluate(preds, labels)


def ablate(store_dir: str | Path, config: RunConfig, out_dir: str | Path, split: str = "dev"):
    """Train and evaluate the six feature-flag rows; returns the report rows."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for name, flags in ABLATION_ROWS:
        features = ClassifierConfig(**flags)
        model_dir = out_dir / f"model_{name}"
        _, _, train_acc = train_on_store(store_dir, config, model_dir, features=features)
        report = eval_on_store(model_dir, store_dir, split)
        rows.append(
            {
                "name": name,
                "flags": flags,
                "train_accuracy": train_acc,
                "weighted_f1": report.weighted_f1,
                "accuracy": report.accuracy,
                "binary_accuracy": report.binary_accuracy,
            }
        )
    doc = {"split": split, "rows": rows}
    (out_dir / "ablate_report.json").write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return rows


def export_embeddings(store_dir: str | Path, split: str, out_dir: str | Path) -> Path:
    """Dump stacked utterance embeddings + labels for external visualization."""
    if split not in VALID_SPLITS:
        raise DataError(f"unknown split {split!r}")
    records = [r for r in load_feature_records(store_dir) if r.split == split]
    if not records:
        raise DataError(f"feature store has no {split!r} records")
    records.sort(key=lambda r: r.id)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_tensor(
        out_dir / "embeddings_acoustic.tensor",
        f"{split}/acoustic",
        np.stack([r.venc for r in records]),
    )
    write_tensor(
        out_dir / "embeddings_linguistic.tensor",
        f"{split}/linguistic",
        np.stack([r.vdec for r in records]),
    )
    labels_doc = {
        "split": split,
        "ids": [r.id for r in records],
        "classes": [r.class_label for r in records],
        "raw_scores": [r.raw_score for r in records],
    }
    (out_dir / "labels.json").write_text(
        json.dumps(labels_doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return out_dir
