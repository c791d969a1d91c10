import json

import numpy as np
import pytest

from slascore.errors import DataError, EmptyInputError, ShapeError
from slascore.metrics import binarize, discretize, evaluate


def brute_force_report(preds, labels, n_classes=5):
    """Independent per-class TP/FP/FN computation."""
    preds = list(preds)
    labels = list(labels)
    n = len(labels)
    per_class = {}
    weighted = 0.0
    correct = sum(1 for p, y in zip(preds, labels) if p == y)
    for c in range(1, n_classes + 1):
        tp = sum(1 for p, y in zip(preds, labels) if p == c and y == c)
        fp = sum(1 for p, y in zip(preds, labels) if p == c and y != c)
        fn = sum(1 for p, y in zip(preds, labels) if p != c and y == c)
        support = tp + fn
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class[c] = (precision, recall, f1, support)
        weighted += support * f1
    bin_correct = sum(
        1 for p, y in zip(preds, labels) if (p > 3) == (y > 3)
    )
    return weighted / n, correct / n, bin_correct / n, per_class


class TestDiscretize:
    @pytest.mark.parametrize("raw,expected", [(3.5, 3), (5.0, 5), (1.0, 1), (4.999, 4), (2.0, 2)])
    def test_floor(self, raw, expected):
        assert discretize(raw) == expected

    @pytest.mark.parametrize("raw", [0.5, 5.1, -1.0, float("nan")])
    def test_out_of_range(self, raw):
        with pytest.raises(DataError):
            discretize(raw)


class TestBinarize:
    def test_paper_rule(self):
        # Classes above 3 pass; 3 and below fail.
        assert binarize(4) == "pass"
        assert binarize(3) == "fail"
        assert binarize(1) == "fail"
        assert binarize(5) == "pass"

    def test_out_of_range(self):
        with pytest.raises(DataError):
            binarize(0)


class TestEvaluate:
    def test_perfect_predictions(self):
        labels = [1, 2, 3, 4, 5, 3, 2]
        report = evaluate(labels, labels)
        assert report.weighted_f1 == 1.0
        assert report.accuracy == 1.0
        assert report.binary_accuracy == 1.0

    def test_hand_worked_weighted_f1(self):
        # labels [1,1,2], preds [1,2,2]: each class F1 = 2/3, weighted = 2/3.
        report = evaluate([1, 2, 2], [1, 1, 2])
        assert report.per_class[1]["f1"] == pytest.approx(2 / 3)
        assert report.per_class[2]["f1"] == pytest.approx(2 / 3)
        assert report.weighted_f1 == pytest.approx(2 / 3)
        assert report.accuracy == pytest.approx(2 / 3)

    def test_hand_worked_binary_accuracy(self):
        # labels [2,4,5] -> fail/pass/pass; preds [4,4,3] -> pass/pass/fail.
        report = evaluate([4, 4, 3], [2, 4, 5])
        assert report.binary_accuracy == pytest.approx(1 / 3)

    def test_confusion_row_sums_are_supports(self):
        rng = np.random.default_rng(31)
        labels = rng.integers(1, 6, size=100)
        preds = rng.integers(1, 6, size=100)
        report = evaluate(preds, labels)
        for c in range(1, 6):
            assert report.confusion[c - 1].sum() == report.per_class[c]["support"]
        assert np.trace(report.confusion) / 100 == report.accuracy

    def test_randomized_against_brute_force(self):
        rng = np.random.default_rng(32)
        for _ in range(1000):
            n = int(rng.integers(1, 40))
            labels = rng.integers(1, 6, size=n)
            preds = rng.integers(1, 6, size=n)
            report = evaluate(preds, labels)
            wf1, acc, bacc, per_class = brute_force_report(preds, labels)
            assert report.weighted_f1 == pytest.approx(wf1, abs=1e-12)
            assert report.accuracy == pytest.approx(acc, abs=1e-12)
            assert report.binary_accuracy == pytest.approx(bacc, abs=1e-12)
            for c, (precision, recall, f1, support) in per_class.items():
                row = report.per_class[c]
                assert row["precision"] == pytest.approx(precision, abs=1e-12)
                assert row["recall"] == pytest.approx(recall, abs=1e-12)
                assert row["f1"] == pytest.approx(f1, abs=1e-12)
                assert row["support"] == support

    def test_joint_permutation_invariance(self):
        rng = np.random.default_rng(33)
        labels = rng.integers(1, 6, size=60)
        preds = rng.integers(1, 6, size=60)
        perm = rng.permutation(60)
        a = evaluate(preds, labels)
        b = evaluate(preds[perm], labels[perm])
        assert a.weighted_f1 == b.weighted_f1
        assert a.accuracy == b.accuracy
        assert a.binary_accuracy == b.binary_accuracy

    def test_metrics_bounded(self):
        rng = np.random.default_rng(34)
        for _ in range(200):
            n = int(rng.integers(1, 20))
            report = evaluate(rng.integers(1, 6, size=n), rng.integers(1, 6, size=n))
            for value in (report.weighted_f1, report.accuracy, report.binary_accuracy):
                assert 0.0 <= value <= 1.0

    def test_length_mismatch(self):
        with pytest.raises(ShapeError):
            evaluate([1, 2], [1])

    def test_empty_rejected(self):
        with pytest.raises(EmptyInputError):
            evaluate([], [])

    def test_out_of_range_classes(self):
        with pytest.raises(DataError):
            evaluate([0, 1], [1, 1])

    def test_json_output_stable(self):
        report = evaluate([1, 2, 3], [1, 2, 4])
        a = report.to_json()
        b = report.to_json()
        assert a == b
        doc = json.loads(a)
        assert set(doc) == {"weighted_f1", "accuracy", "binary_accuracy", "per_class", "confusion"}
