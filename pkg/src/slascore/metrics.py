"""Label discretization and evaluation metrics.

Fractional holistic scores on the 1-5 scale are floored to discrete
classes; classes above 3 count as a pass. Reported metrics are weighted
F1 (support-weighted mean of per-class F1), exact-match accuracy, and
binary pass/fail accuracy. Per-class precision/recall/F1 use the
0-convention on zero denominators.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, EmptyInputError, ShapeError

N_CLASSES = 5
PASS_THRESHOLD = 3  # class > 3 passes


def discretize(raw_score: float) -> int:
    """Floor a fractional 1-5 score to its class; 5.0 stays 5."""
    if not (1.0 <= raw_score <= 5.0) or not math.isfinite(raw_score):
        raise DataError(f"raw score {raw_score} outside [1, 5]")
    return min(int(math.floor(raw_score)), N_CLASSES)


def binarize(class_label: int) -> str:
    """'pass' for classes above 3, 'fail' otherwise."""
    if not (1 <= class_label <= N_CLASSES):
        raise DataError(f"class {class_label} outside 1..{N_CLASSES}")
    return "pass" if class_label > PASS_THRESHOLD else "fail"


@dataclass(frozen=True)
class EvalReport:
    weighted_f1: float
    accuracy: float
    binary_accuracy: float
    per_class: dict[int, dict[str, float]]
    confusion: np.ndarray  # [label][pred]

    def to_dict(self) -> dict:
        return {
            "weighted_f1": self.weighted_f1,
            "accuracy": self.accuracy,
            "binary_accuracy": self.binary_accuracy,
            "per_class": {
                str(c): {
                    "precision": row["precision"],
                    "recall": row["recall"],
                    "f1": row["f1"],
                    "support": int(row["support"]),
                }
                for c, row in sorted(self.per_class.items())
            },
            "confusion": self.confusion.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def evaluate(preds, labels) -> EvalReport:
    """Score predictions against reference classes (both 1-based)."""
    preds = np.asarray(preds, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    if preds.shape != labels.shape:
        raise ShapeError(f"{preds.shape[0]} predictions for {labels.shape[0]} labels")
    n = preds.shape[0]
    if n == 0:
        raise EmptyInputError("cannot evaluate zero predictions")
    for arr, what in ((preds, "prediction"), (labels, "label")):
        if arr.min() < 1 or arr.max() > N_CLASSES:
            raise DataError(f"{what} classes must lie in 1..{N_CLASSES}")

    confusion = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    for y, p in zip(labels, preds):
        confusion[y - 1, p - 1] += 1

    per_class = {}
    weighted_sum = 0.0
    for c in range(1, N_CLASSES + 1):
        tp = int(confusion[c - 1, c - 1])
        fp = int(confusion[:, c - 1].sum()) - tp
        fn = int(confusion[c - 1, :].sum()) - tp
        support = tp + fn
        precision = tp / (tp + fp) if (tp + fp) > 0 else 0.0
        recall = tp / (tp + fn) if (tp + fn) > 0 else 0.0
        f1 = (
            2.0 * precision * recall / (precision + recall)
            if (precision + recall) > 0
            else 0.0
        )
        per_class[c] = {"precision": precision, "recall": recall, "f1": f1, "support": support}
        weighted_sum += support * f1

    accuracy = float(np.trace(confusion)) / n
    binary_matches = sum(
        1 for y, p in zip(labels, preds) if binarize(int(y)) == binarize(int(p))
    )
    return EvalReport(
        weighted_f1=weighted_sum / n,
        accuracy=accuracy,
        binary_accuracy=binary_matches / n,
        per_class=per_class,
        confusion=confusion,
    )
