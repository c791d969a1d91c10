"""Lightweight classification head and its training loop.

Architecture: the utterance embeddings are concatenated and projected to
a 512-dimensional bottleneck (affine + GELU), the auxiliary scores are
appended in the fixed order [sts, itc], and an affine prediction layer
produces 5-class logits trained with softmax cross-entropy.

Everything is plain float64 numpy with hand-written gradients; Adam with
(0.9, 0.999, 1e-8) moments performs one update per ``grad_accum``
micro-batches using the accumulated-mean gradient. Parameter init and
batch shuffling both draw from a single splitmix64 stream, so a fixed
seed reproduces the whole trajectory bit-for-bit.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from scipy.special import erf

from .errors import ConfigError, DataError, EmptyInputError, ShapeError
from .rng import SplitMix64
from .tensorio import read_tensor, write_tensor

HIDDEN_SIZE = 512
N_CLASSES = 5


@dataclass(frozen=True)
class ClassifierConfig:
    """Structural flags. Disabled inputs have no columns at all, so the
    parameter shapes document any ablation."""

    hidden_size: int = HIDDEN_SIZE
    n_classes: int = N_CLASSES
    use_acoustic: bool = True
    use_linguistic: bool = True
    use_sts: bool = True
    use_itc: bool = True
    proj_bias: bool = True
    proj_activation: bool = True

    def __post_init__(self):
        if not (self.use_acoustic or self.use_linguistic):
            raise ConfigError("at least one of the embedding paths must be enabled")

    @property
    def n_aux(self) -> int:
        return int(self.use_sts) + int(self.use_itc)

    @property
    def n_paths(self) -> int:
        return int(self.use_acoustic) + int(self.use_linguistic)


@dataclass
class ClassifierParams:
    config: ClassifierConfig
    proj_w: np.ndarray  # hidden x (d * n_paths)
    proj_b: np.ndarray  # hidden
    pred_w: np.ndarray  # n_classes x (hidden + n_aux)
    pred_b: np.ndarray  # n_classes

    @property
    def input_dim(self) -> int:
        return int(self.proj_w.shape[1])

    def copy(self) -> "ClassifierParams":
        return ClassifierParams(
            config=self.config,
            proj_w=self.proj_w.copy(),
            proj_b=self.proj_b.copy(),
            pred_w=self.pred_w.copy(),
            pred_b=self.pred_b.copy(),
        )


@dataclass
class TrainConfig:
    steps: int = 1000
    learning_rate: float = 7.5e-4
    batch_size: int = 4
    grad_accum: int = 2
    seed: int = 0
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self):
        if self.steps < 0 or self.batch_size < 1 or self.grad_accum < 1:
            raise ConfigError("steps must be >= 0, batch_size and grad_accum >= 1")


@dataclass(frozen=True)
class Prediction:
    logits: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        if abs(float(self.probs.sum()) - 1.0) > 1e-9:
            raise ShapeError("prediction probabilities must sum to 1")


def _fill_uniform(rng: SplitMix64, shape: tuple[int, ...], bound: float) -> np.ndarray:
    # Row-major fill order is normative: goldens depend on it.
    flat = np.empty(int(np.prod(shape)), dtype=np.float64)
    for i in range(flat.shape[0]):
        flat[i] = rng.uniform(-bound, bound)
    return flat.reshape(shape)


def init_params(config: ClassifierConfig, input_dim: int, rng: SplitMix64) -> ClassifierParams:
    """Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) weights, zero biases.

    Draw order: proj weights row-major, then pred weights row-major, from
    the caller's stream (training continues the same stream afterwards).
    """
    if input_dim < 1:
        raise ConfigError("input_dim must be positive")
    hidden = config.hidden_size
    pred_in = hidden + config.n_aux
    proj_w = _fill_uniform(rng, (hidden, input_dim), 1.0 / np.sqrt(input_dim))
    pred_w = _fill_uniform(rng, (config.n_classes, pred_in), 1.0 / np.sqrt(pred_in))
    return ClassifierParams(
        config=config,
        proj_w=proj_w,
        proj_b=np.zeros(hidden),
        pred_w=pred_w,
        pred_b=np.zeros(config.n_classes),
    )


def gelu(x: np.ndarray) -> np.ndarray:
    """Exact (erf-based) GELU."""
    return 0.5 * x * (1.0 + erf(x / np.sqrt(2.0)))


def gelu_grad(x: np.ndarray) -> np.ndarray:
    phi = np.exp(-0.5 * x * x) / np.sqrt(2.0 * np.pi)
    return 0.5 * (1.0 + erf(x / np.sqrt(2.0))) + x * phi


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise stable softmax (max-subtraction)."""
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exps = np.exp(shifted)
    return exps / exps.sum(axis=-1, keepdims=True)


def project(v_enc, v_dec, params: ClassifierParams) -> np.ndarray:
    """Bottleneck projection of the concatenated active embeddings."""
    x = concat_inputs(v_enc, v_dec, params.config)
    if x.shape[0] != params.input_dim:
        raise ShapeError(f"input dim {x.shape[0]} != projection fan-in {params.input_dim}")
    t = params.proj_w @ x
    if params.config.proj_bias:
        t = t + params.proj_b
    return gelu(t) if params.config.proj_activation else t


def concat_inputs(v_enc, v_dec, config: ClassifierConfig) -> np.ndarray:
    parts = []
    if config.use_acoustic:
        if v_enc is None:
            raise ShapeError("acoustic path enabled but no acoustic embedding given")
        parts.append(np.asarray(getattr(v_enc, "values", v_enc), dtype=np.float64))
    if config.use_linguistic:
        if v_dec is None:
            raise ShapeError("linguistic path enabled but no linguistic embedding given")
        parts.append(np.asarray(getattr(v_dec, "values", v_dec), dtype=np.float64))
    return np.concatenate(parts)


def fuse(v_bnf: np.ndarray, scores, config: ClassifierConfig) -> np.ndarray:
    """u = [v_bnf; sts?; itc?] in that fixed order."""
    parts = [np.asarray(v_bnf, dtype=np.float64)]
    if config.use_sts:
        if scores is None or scores.sts is None:
            raise DataError("STS flag is on but no STS score is available")
        parts.append(np.array([scores.sts], dtype=np.float64))
    if config.use_itc:
        if scores is None or scores.itc is None:
            raise DataError("ITC flag is on but no ITC score is available")
        parts.append(np.array([scores.itc], dtype=np.float64))
    return np.concatenate(parts)


def predict(u: np.ndarray, params: ClassifierParams) -> Prediction:
    u = np.asarray(u, dtype=np.float64)
    if u.shape[0] != params.pred_w.shape[1]:
        raise ShapeError(f"fused dim {u.shape[0]} != prediction fan-in {params.pred_w.shape[1]}")
    logits = params.pred_w @ u + params.pred_b
    return Prediction(logits=logits, probs=softmax(logits))


def _forward(params: ClassifierParams, x: np.ndarray, aux: np.ndarray):
    t = x @ params.proj_w.T
    if params.config.proj_bias:
        t = t + params.proj_b
    vbnf = gelu(t) if params.config.proj_activation else t
    u = np.concatenate([vbnf, aux], axis=1) if aux.shape[1] else vbnf
    logits = u @ params.pred_w.T + params.pred_b
    return t, u, logits


def _onehot(labels: np.ndarray, n_classes: int) -> np.ndarray:
    labels = np.asarray(labels)
    if labels.min() < 1 or labels.max() > n_classes:
        raise DataError(f"labels must lie in 1..{n_classes}")
    out = np.zeros((labels.shape[0], n_classes), dtype=np.float64)
    out[np.arange(labels.shape[0]), labels - 1] = 1.0
    return out


def batch_loss(params: ClassifierParams, x: np.ndarray, aux: np.ndarray, labels) -> float:
    """Mean cross-entropy of a batch; forward pass only."""
    y = _onehot(labels, params.config.n_classes)
    _, _, logits = _forward(params, x, aux)
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    return float(-(y * log_probs).sum(axis=1).mean())


def loss_and_grad(params: ClassifierParams, x: np.ndarray, aux: np.ndarray, labels):
    """Mean cross-entropy plus analytic gradients for all four tensors.

    ``x`` is the batch of concatenated utterance embeddings (B x fan_in),
    ``aux`` the batch of appended scores (B x n_aux, possibly 0 columns),
    ``labels`` 1-based classes. Backprop runs through softmax-CE, the
    concatenation, and the GELU.
    """
    x = np.asarray(x, dtype=np.float64)
    aux = np.asarray(aux, dtype=np.float64).reshape(x.shape[0], -1)
    y = _onehot(labels, params.config.n_classes)
    batch = x.shape[0]

    t, u, logits = _forward(params, x, aux)
    probs = softmax(logits)
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    loss = float(-(y * log_probs).sum(axis=1).mean())

    d_logits = (probs - y) / batch
    grad_pred_w = d_logits.T @ u
    grad_pred_b = d_logits.sum(axis=0)
    d_u = d_logits @ params.pred_w
    d_vbnf = d_u[:, : params.config.hidden_size]
    d_t = d_vbnf * gelu_grad(t) if params.config.proj_activation else d_vbnf
    grad_proj_w = d_t.T @ x
    grad_proj_b = (
        d_t.sum(axis=0) if params.config.proj_bias else np.zeros_like(params.proj_b)
    )
    grads = ClassifierParams(
        config=params.config,
        proj_w=grad_proj_w,
        proj_b=grad_proj_b,
        pred_w=grad_pred_w,
        pred_b=grad_pred_b,
    )
    return loss, grads


@dataclass
class _AdamState:
    m: list
    v: list
    t: int = 0


def _adam_step(params: ClassifierParams, grads: ClassifierParams, cfg: TrainConfig, state: _AdamState):
    tensors = [params.proj_w, params.proj_b, params.pred_w, params.pred_b]
    grad_list = [grads.proj_w, grads.proj_b, grads.pred_w, grads.pred_b]
    state.t += 1
    b1, b2 = cfg.adam_beta1, cfg.adam_beta2
    for i, (p, g) in enumerate(zip(tensors, grad_list)):
        state.m[i] = b1 * state.m[i] + (1 - b1) * g
        state.v[i] = b2 * state.v[i] + (1 - b2) * g * g
        m_hat = state.m[i] / (1 - b1**state.t)
        v_hat = state.v[i] / (1 - b2**state.t)
        p -= cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.adam_eps)


class _BatchStream:
    """Shuffled index stream that reshuffles and wraps when exhausted."""

    def __init__(self, n: int, rng: SplitMix64):
        self._order = list(range(n))
        self._rng = rng
        self._pos = n  # force shuffle on first draw

    def next_batch(self, size: int) -> np.ndarray:
        out = []
        while len(out) < size:
            if self._pos >= len(self._order):
                self._rng.shuffle(self._order)
                self._pos = 0
            out.append(self._order[self._pos])
            self._pos += 1
        return np.asarray(out)


def train(
    x: np.ndarray,
    aux: np.ndarray,
    labels: np.ndarray,
    config: ClassifierConfig,
    cfg: TrainConfig,
) -> tuple[ClassifierParams, list[float]]:
    """Run the full training recipe; returns final params and per-step losses.

    Each optimizer step consumes ``grad_accum`` micro-batches of
    ``batch_size`` samples; their mean gradients are averaged before one
    Adam update. The logged loss is the same average over the step's
    micro-batch losses.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise EmptyInputError("training requires a nonempty feature matrix")
    aux = np.asarray(aux, dtype=np.float64).reshape(x.shape[0], -1)
    if aux.shape[1] != config.n_aux:
        raise ShapeError(f"aux has {aux.shape[1]} columns, config expects {config.n_aux}")
    labels = np.asarray(labels)

    rng = SplitMix64(cfg.seed)
    params = init_params(config, x.shape[1], rng)
    stream = _BatchStream(x.shape[0], rng)
    state = _AdamState(
        m=[np.zeros_like(p) for p in (params.proj_w, params.proj_b, params.pred_w, params.pred_b)],
        v=[np.zeros_like(p) for p in (params.proj_w, params.proj_b, params.pred_w, params.pred_b)],
    )
    losses: list[float] = []
    for _ in range(cfg.steps):
        accum = None
        step_loss = 0.0
        for _ in range(cfg.grad_accum):
            idx = stream.next_batch(cfg.batch_size)
            loss, grads = loss_and_grad(params, x[idx], aux[idx], labels[idx])
            step_loss += loss
            if accum is None:
                accum = grads
            else:
                accum.proj_w += grads.proj_w
                accum.proj_b += grads.proj_b
                accum.pred_w += grads.pred_w
                accum.pred_b += grads.pred_b
        scale = 1.0 / cfg.grad_accum
        accum.proj_w *= scale
        accum.proj_b *= scale
        accum.pred_w *= scale
        accum.pred_b *= scale
        _adam_step(params, accum, cfg, state)
        losses.append(step_loss * scale)
    return params, losses


def classify(params: ClassifierParams, x: np.ndarray, aux: np.ndarray) -> np.ndarray:
    """Predicted 1-based classes for a feature matrix."""
    _, _, logits = _forward(
        params,
        np.asarray(x, dtype=np.float64),
        np.asarray(aux, dtype=np.float64).reshape(x.shape[0], -1),
    )
    return logits.argmax(axis=1) + 1


_TENSOR_FILES = {
    "proj_w": "proj_weights.tensor",
    "proj_b": "proj_bias.tensor",
    "pred_w": "pred_weights.tensor",
    "pred_b": "pred_bias.tensor",
}


def save_params(model_dir: str | Path, params: ClassifierParams, meta: dict | None = None) -> None:
    """Write one interchange tensor per parameter plus a metadata JSON."""
    model_dir = Path(model_dir)
    model_dir.mkdir(parents=True, exist_ok=True)
    for attr, fname in _TENSOR_FILES.items():
        write_tensor(model_dir / fname, attr, getattr(params, attr))
    doc = {
        "config": asdict(params.config),
        "shapes": {attr: list(getattr(params, attr).shape) for attr in _TENSOR_FILES},
    }
    if meta:
        doc.update(meta)
    (model_dir / "meta.json").write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def load_params(model_dir: str | Path) -> ClassifierParams:
    model_dir = Path(model_dir)
    doc = json.loads((model_dir / "meta.json").read_text(encoding="utf-8"))
    config = ClassifierConfig(**doc["config"])
    arrays = {}
    for attr, fname in _TENSOR_FILES.items():
        _, arr = read_tensor(model_dir / fname)
        arrays[attr] = arr.astype(np.float64)
    return ClassifierParams(config=config, **arrays)
