"""Chunked encoder/decoder feature extraction and lightweight proficiency
classification for long-form spoken responses."""

from .audio import AudioSignal, Chunk, SegmentationConfig, load_audio, save_audio, segment
from .backends import (
    BackendDescriptor,
    ChunkKey,
    DecoderStates,
    EncoderStates,
    FileBackend,
    MockBackend,
)
from .classifier import (
    ClassifierConfig,
    ClassifierParams,
    Prediction,
    TrainConfig,
    batch_loss,
    classify,
    fuse,
    init_params,
    load_params,
    loss_and_grad,
    predict,
    project,
    save_params,
    softmax,
    train,
)
from .logmel import LogMelSpectrogram, MelFilterbank, log_mel, mel_filterbank, stft_power
from .metrics import EvalReport, binarize, discretize, evaluate
from .pipeline import (
    ManifestEntry,
    RunConfig,
    ablate,
    eval_on_store,
    export_embeddings,
    extract,
    load_manifest,
    load_run_config,
    train_on_store,
)
from .pooling import (
    ChunkEmbedding,
    UtteranceEmbedding,
    mean_pool_chunks,
    mean_pool_rows,
    utterance_acoustic,
    utterance_linguistic,
)
from .rng import SplitMix64
from .scores import AuxScores, SentenceEmbedding, VisionTextEmbedding, itc_score, sts_score
from .tensorio import read_tensor, write_tensor
from .text import (
    ByteTokenizer,
    PrefixSpec,
    TokenSequence,
    build_decoder_input,
    chunk_transcripts,
    load_tokenizer,
)

__version__ = "0.1.0"
