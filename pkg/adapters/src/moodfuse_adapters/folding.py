"""Label-space folds onto binary valence.

The text models emit different label vocabularies (binary sentiment, the
four poem categories, six emotions). Downstream evaluation runs on binary
valence, so each vocabulary folds onto negative/positive per the table in
``data/label_folds.json``. Labels folding to null (neutral, mixed,
no_impact) contribute no valence signal: their mass is dropped and the
remainder renormalized, and the caller is told how much was dropped so
dominant-neutral chunks can be flagged.
"""

from __future__ import annotations

import json
import math
from importlib import resources

BINARY_LABELS = ["negative", "positive"]


def load_folds() -> dict[str, dict[str, str | None]]:
    raw = (
        resources.files("moodfuse_adapters.data") / "label_folds.json"
    ).read_text(encoding="utf-8")
    return json.loads(raw)


def fold_scores(
    scores: dict[str, float], fold: dict[str, str | None]
) -> tuple[list[float], float]:
    """Fold a label->score map onto (negative, positive).

    Returns the renormalized pair and the fraction of mass dropped by
    null folds. Raises ValueError for labels missing from the fold table
    and when no valence mass remains.
    """
    total = math.fsum(scores.values())
    if total <= 0:
        raise ValueError("scores carry no mass")
    folded = {"negative": 0.0, "positive": 0.0}
    dropped = 0.0
    for label, score in scores.items():
        key = label.strip().lower()
        if key not in fold:
            raise ValueError(f"label {label!r} not covered by the fold table")
        target = fold[key]
        if target is None:
            dropped += score
        else:
            folded[target] += score
    kept = folded["negative"] + folded["positive"]
    if kept <= 0:
        raise ValueError("all mass folded to null labels")
    return (
        [folded["negative"] / kept, folded["positive"] / kept],
        dropped / total,
    )
