"""Finite-difference verification of the analytic gradients.

Perturbs every parameter entry by +/- h and compares the central
difference of the forward loss against the backprop gradient. The check
only ever calls :func:`batch_loss` on perturbed copies, so it stays
independent of the gradient code it verifies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classifier import (
    ClassifierConfig,
    ClassifierParams,
    batch_loss,
    init_params,
    loss_and_grad,
)
from .rng import SplitMix64

FD_STEP = 1e-5
REL_TOLERANCE = 1e-4

TENSOR_NAMES = ("proj_w", "proj_b", "pred_w", "pred_b")


@dataclass
class GradCheckResult:
    flag_setting: str
    max_rel_error: dict[str, float]
    n_entries: dict[str, int]

    @property
    def passed(self) -> bool:
        return all(v <= REL_TOLERANCE for v in self.max_rel_error.values())


def _rel_error(analytic: float, numeric: float) -> float:
    scale = max(1.0, abs(analytic), abs(numeric))
    return abs(analytic - numeric) / scale


def check_gradients(
    params: ClassifierParams,
    x: np.ndarray,
    aux: np.ndarray,
    labels: np.ndarray,
    h: float = FD_STEP,
    max_entries_per_tensor: int | None = None,
    rng: SplitMix64 | None = None,
) -> dict[str, float]:
    """Max relative error per tensor between analytic and central FD grads.

    ``max_entries_per_tensor`` samples a subset of entries (via ``rng``)
    to keep large tensors affordable; None checks every entry.
    """
    _, grads = loss_and_grad(params, x, aux, labels)
    errors: dict[str, float] = {}
    for name in TENSOR_NAMES:
        tensor = getattr(params, name)
        grad = getattr(grads, name)
        flat_indices = np.arange(tensor.size)
        if max_entries_per_tensor is not None and tensor.size > max_entries_per_tensor:
            if rng is None:
                rng = SplitMix64(0)
            chosen = set()
            while len(chosen) < max_entries_per_tensor:
                chosen.add(rng.randbelow(tensor.size))
            flat_indices = np.asarray(sorted(chosen))
        worst = 0.0
        for flat in flat_indices:
            idx = np.unravel_index(flat, tensor.shape)
            original = tensor[idx]
            tensor[idx] = original + h
            loss_plus = batch_loss(params, x, aux, labels)
            tensor[idx] = original - h
            loss_minus = batch_loss(params, x, aux, labels)
            tensor[idx] = original
            numeric = (loss_plus - loss_minus) / (2.0 * h)
            worst = max(worst, _rel_error(float(grad[idx]), numeric))
        errors[name] = worst
    return errors


def run_gradcheck(
    seed: int = 0,
    n_draws: int = 100,
    embed_dim: int = 16,
    batch_size: int = 4,
    entries_per_tensor: int = 6,
) -> list[GradCheckResult]:
    """Randomized verification across the fusion-flag settings.

    Draws ``n_draws`` random (params, batch) pairs split across the flag
    combinations; every draw checks a random subset of entries in all
    four tensors.
    """
    flag_settings = [
        ("sts+itc", ClassifierConfig(use_sts=True, use_itc=True)),
        ("sts-only", ClassifierConfig(use_sts=True, use_itc=False)),
        ("itc-only", ClassifierConfig(use_sts=False, use_itc=True)),
        ("none", ClassifierConfig(use_sts=False, use_itc=False)),
    ]
    rng = SplitMix64(seed)
    per_setting = max(1, n_draws // len(flag_settings))
    results = []
    for label, config in flag_settings:
        input_dim = embed_dim * config.n_paths
        worst = {name: 0.0 for name in TENSOR_NAMES}
        counted = {name: 0 for name in TENSOR_NAMES}
        for _ in range(per_setting):
            params = init_params(config, input_dim, rng)
            x = np.array(
                [[rng.uniform(-2.0, 2.0) for _ in range(input_dim)] for _ in range(batch_size)]
            )
            aux = np.array(
                [[rng.uniform(-1.0, 1.0) for _ in range(config.n_aux)] for _ in range(batch_size)]
            )
            labels = np.array([rng.randbelow(config.n_classes) + 1 for _ in range(batch_size)])
            errors = check_gradients(
                params, x, aux, labels, max_entries_per_tensor=entries_per_tensor, rng=rng
            )
            for name, err in errors.items():
                worst[name] = max(worst[name], err)
                counted[name] += min(entries_per_tensor, getattr(params, name).size)
        results.append(
            GradCheckResult(flag_setting=label, max_rel_error=worst, n_entries=counted)
        )
    return results
