"""Confusion matrices and per-class precision/recall/F1 over any label set.

Counting is integer-exact; only the final ratios are floats, so reports
are reproducible bit for bit regardless of record order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import LengthMismatch, UnknownLabel

ZERO_DIVISION_MODES = ("zero", "skip")


@dataclass(frozen=True)
class ConfusionMatrix:
    """Square count matrix; rows are gold labels, columns predictions."""

    labels: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.labels)
        if n == 0 or len(set(self.labels)) != n:
            raise ValueError(f"labels must be non-empty and unique: {self.labels}")
        if len(self.counts) != n or any(len(row) != n for row in self.counts):
            raise ValueError(f"counts must be {n}x{n}")
        if any(c < 0 or c != int(c) for row in self.counts for c in row):
            raise ValueError("counts must be non-negative integers")

    @property
    def total(self) -> int:
        return sum(c for row in self.counts for c in row)

    def row(self, label: str) -> tuple[int, ...]:
        return self.counts[self.labels.index(label)]


def confusion(
    golds: Sequence[str], preds: Sequence[str], labels: Sequence[str]
) -> ConfusionMatrix:
    """Count (gold, predicted) pairs over the declared label set."""
    if len(golds) != len(preds):
        raise LengthMismatch(f"{len(golds)} golds but {len(preds)} predictions")
    labels = tuple(labels)
    index = {label: i for i, label in enumerate(labels)}
    counts = [[0] * len(labels) for _ in labels]
    for g, p in zip(golds, preds):
        if g not in index:
            raise UnknownLabel(f"gold label {g!r} not in {labels}")
        if p not in index:
            raise UnknownLabel(f"predicted label {p!r} not in {labels}")
        counts[index[g]][index[p]] += 1
    return ConfusionMatrix(labels, tuple(tuple(row) for row in counts))


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class MetricsReport:
    per_class: Mapping[str, ClassMetrics]
    macro: ClassMetrics
    support: Mapping[str, int]
    flagged: tuple[str, ...]
    zero_division: str


def metrics(cm: ConfusionMatrix, zero_division: str = "zero") -> MetricsReport:
    """Per-class precision/recall/F1 plus their unweighted (macro) means.

    precision = TP / (TP + FP), recall = TP / (TP + FN), f1 the harmonic
    mean (0 when precision and recall are both 0). An undefined ratio is
    reported as 0 and the class is flagged; with zero_division="skip",
    classes absent from both golds and predictions are dropped from the
    report instead.
    """
    if zero_division not in ZERO_DIVISION_MODES:
        raise ValueError(f"zero_division must be one of {ZERO_DIVISION_MODES}")
    per_class: dict[str, ClassMetrics] = {}
    support: dict[str, int] = {}
    flagged: list[str] = []
    for i, label in enumerate(cm.labels):
        tp = cm.counts[i][i]
        row_sum = sum(cm.counts[i])
        col_sum = sum(row[i] for row in cm.counts)
        if zero_division == "skip" and row_sum == 0 and col_sum == 0:
            continue
        undefined = False
        if col_sum > 0:
            precision = tp / col_sum
        else:
            precision, undefined = 0.0, True
        if row_sum > 0:
            recall = tp / row_sum
        else:
            recall, undefined = 0.0, True
        f1 = (
            2.0 * precision * recall / (precision + recall)
            if precision + recall > 0.0
            else 0.0
        )
        per_class[label] = ClassMetrics(precision, recall, f1)
        support[label] = row_sum
        if undefined:
            flagged.append(label)
    macro = _macro(per_class.values())
    return MetricsReport(per_class, macro, support, tuple(flagged), zero_division)


def _macro(values) -> ClassMetrics:
    values = list(values)
    if not values:
        return ClassMetrics(0.0, 0.0, 0.0)
    n = len(values)
    return ClassMetrics(
        math.fsum(v.precision for v in values) / n,
        math.fsum(v.recall for v in values) / n,
        math.fsum(v.f1 for v in values) / n,
    )


def micro(cm: ConfusionMatrix) -> ClassMetrics:
    """Globally pooled precision/recall/F1.

    With one prediction per record these all equal accuracy; provided as
    the alternative averaging behind the sweep's score selector.
    """
    tp = sum(cm.counts[i][i] for i in range(len(cm.labels)))
    total = cm.total
    value = tp / total if total else 0.0
    return ClassMetrics(value, value, value)
