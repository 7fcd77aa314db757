"""Audio/text late fusion and the fusion-weight sweep.

Three strategies over paired per-song class distributions:

  max-probability  keep the label of whichever modality is more confident
  average          mean the two distributions, take the argmax
  weighted         convex blend w * audio + (1 - w) * text, take the argmax

The sweep evaluates the weighted strategy on a uniform grid over [0, 1]
and reports the weight with the best score (macro F1 by default).

Ties are resolved by an explicit policy rather than silently: both the
max-probability comparison and argmax ties inside a fused distribution
consult ``tie_break`` ({prefer-text, prefer-audio, error}, default
prefer-text), falling back to the lowest label index so every outcome is
deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .circumplex import ClassDistribution
from .errors import (
    EmptyDataset,
    MixedLabelSets,
    TieError,
    WeightOutOfRange,
)
from . import metrics as metrics_mod

STRATEGIES = ("max", "average", "weighted")
TIE_BREAKS = ("prefer-text", "prefer-audio", "error")

AUDIO = "audio"
TEXT = "text"
COMBINED = "combined"


@dataclass(frozen=True)
class FusionConfig:
    strategy: str
    audio_weight: float | None = None
    tie_break: str = "prefer-text"

    def __post_init__(self) -> None:
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}")
        if self.tie_break not in TIE_BREAKS:
            raise ValueError(f"tie_break must be one of {TIE_BREAKS}")
        if (self.audio_weight is not None) != (self.strategy == "weighted"):
            raise ValueError("audio_weight is required iff strategy is weighted")


@dataclass(frozen=True)
class FusionOutcome:
    label: str
    fused_dist: ClassDistribution | None
    chosen_modality: str


@dataclass(frozen=True)
class FusionRecord:
    """One song's paired predictions, plus its gold label when known."""

    song_id: str
    audio: ClassDistribution
    text: ClassDistribution
    gold: str | None = None


def _aligned(audio: ClassDistribution, text: ClassDistribution) -> ClassDistribution:
    """Text distribution reordered to audio's label order."""
    if audio.labels == text.labels:
        return text
    if set(audio.labels) != set(text.labels):
        raise MixedLabelSets(
            f"modalities disagree on labels: {audio.labels} vs {text.labels}"
        )
    return text.reordered(audio.labels)


def _argmax_with_tie_break(
    fused: ClassDistribution,
    audio: ClassDistribution,
    text: ClassDistribution,
    tie_break: str,
) -> str:
    top = max(fused.probs)
    tied = [i for i, p in enumerate(fused.probs) if p == top]
    if len(tied) == 1:
        return fused.labels[tied[0]]
    if tie_break == "error":
        raise TieError(f"argmax tie between {[fused.labels[i] for i in tied]}")
    preferred = text if tie_break == "prefer-text" else audio
    best = tied[0]
    for i in tied[1:]:
        if preferred.probs[i] > preferred.probs[best]:
            best = i
    return fused.labels[best]


def fuse_max(
    audio: ClassDistribution,
    text: ClassDistribution,
    tie_break: str = "prefer-text",
) -> FusionOutcome:
    """Pick the label of the modality with the single highest probability."""
    _check_tie_break(tie_break)
    text = _aligned(audio, text)
    audio_top = max(audio.probs)
    text_top = max(text.probs)
    if audio_top > text_top:
        winner, modality = audio, AUDIO
    elif text_top > audio_top:
        winner, modality = text, TEXT
    elif tie_break == "error":
        raise TieError(f"both modalities peak at {audio_top}")
    elif tie_break == "prefer-audio":
        winner, modality = audio, AUDIO
    else:
        winner, modality = text, TEXT
    return FusionOutcome(winner.argmax_label(), None, modality)


def fuse_weighted(
    audio: ClassDistribution,
    text: ClassDistribution,
    w: float,
    tie_break: str = "prefer-text",
) -> FusionOutcome:
    """Blend w * audio + (1 - w) * text and take the argmax."""
    _check_tie_break(tie_break)
    if not (isinstance(w, (int, float)) and math.isfinite(w) and 0.0 <= w <= 1.0):
        raise WeightOutOfRange(f"audio weight must be in [0, 1], got {w!r}")
    text = _aligned(audio, text)
    fused = ClassDistribution(
        audio.labels,
        tuple(w * a + (1.0 - w) * t for a, t in zip(audio.probs, text.probs)),
    )
    # At the endpoints one modality contributes nothing, so the other
    # resolves its own argmax ties; tie_break governs interior weights.
    if w == 1.0:
        label = audio.argmax_label()
    elif w == 0.0:
        label = text.argmax_label()
    else:
        label = _argmax_with_tie_break(fused, audio, text, tie_break)
    return FusionOutcome(label, fused, COMBINED)


def fuse_average(
    audio: ClassDistribution,
    text: ClassDistribution,
    tie_break: str = "prefer-text",
) -> FusionOutcome:
    """Equal-weight blend; identical to fuse_weighted at w = 0.5."""
    return fuse_weighted(audio, text, 0.5, tie_break)


def fuse(
    audio: ClassDistribution,
    text: ClassDistribution,
    config: FusionConfig,
) -> FusionOutcome:
    if config.strategy == "max":
        return fuse_max(audio, text, config.tie_break)
    if config.strategy == "average":
        return fuse_average(audio, text, config.tie_break)
    return fuse_weighted(audio, text, config.audio_weight, config.tie_break)


def _check_tie_break(tie_break: str) -> None:
    if tie_break not in TIE_BREAKS:
        raise ValueError(f"tie_break must be one of {TIE_BREAKS}")


@dataclass(frozen=True)
class SweepResult:
    best_weight: float
    best_score: float
    curve: tuple[tuple[float, float], ...]
    score: str


def sweep_weights(
    records: Sequence[FusionRecord],
    grid_step: float = 0.05,
    score: str = "macro-f1",
    tie_break: str = "prefer-text",
) -> SweepResult:
    """Score fuse_weighted at every grid point and return the best weight.

    The grid is w = i / m for i in 0..m where m = 1 / grid_step, so both
    endpoints are always evaluated and the curve has m + 1 points. Score
    ties break toward the smaller weight. Records without a gold label are
    ignored; if none carry one the sweep raises :class:`EmptyDataset`.
    """
    steps = _grid_steps(grid_step)
    scored = [r for r in records if r.gold is not None]
    if not scored:
        raise EmptyDataset("sweep needs at least one gold-labeled record")
    labels = scored[0].audio.labels
    golds = [r.gold for r in scored]

    curve = []
    best_w = 0.0
    best_score = -1.0
    for i in range(steps + 1):
        w = i / steps
        preds = [fuse_weighted(r.audio, r.text, w, tie_break).label for r in scored]
        value = _score_labels(golds, preds, labels, score)
        curve.append((w, value))
        if value > best_score:
            best_w, best_score = w, value
    return SweepResult(best_w, best_score, tuple(curve), score)


def _grid_steps(grid_step: float) -> int:
    if not (isinstance(grid_step, float) and 0.0 < grid_step <= 1.0):
        raise ValueError(f"grid_step must be in (0, 1], got {grid_step!r}")
    steps = round(1.0 / grid_step)
    if steps < 1 or abs(steps * grid_step - 1.0) > 1e-6:
        raise ValueError(f"grid_step {grid_step!r} does not evenly divide [0, 1]")
    return steps


def _score_labels(golds, preds, labels, score: str) -> float:
    cm = metrics_mod.confusion(golds, preds, labels)
    if score == "macro-f1":
        return metrics_mod.metrics(cm).macro.f1
    if score == "micro-f1":
        return metrics_mod.micro(cm).f1
    raise ValueError(f"unknown score {score!r} (use macro-f1 or micro-f1)")


def selection_proportions(
    records: Sequence[FusionRecord],
    tie_break: str = "prefer-text",
) -> tuple[float, float]:
    """Fractions of records whose max-probability label came from each side.

    Returns (audio_fraction, text_fraction); the two sum to one.
    """
    if not records:
        raise EmptyDataset("no records to fuse")
    audio_wins = 0
    for r in records:
        if fuse_max(r.audio, r.text, tie_break).chosen_modality == AUDIO:
            audio_wins += 1
    n = len(records)
    return audio_wins / n, (n - audio_wins) / n
