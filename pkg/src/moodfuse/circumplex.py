"""Circumplex geometry and the probability-distribution container.

The affect plane is spanned by valence (pleasantness) and arousal
(intensity). Its four sign regions relative to a scale midpoint serve as
categorical labels:

    Q1 = (valence+, arousal+)    Q2 = (valence-, arousal+)
    Q3 = (valence-, arousal-)    Q4 = (valence+, arousal-)

Distributions carry plain string labels so they serialize directly;
``Quadrant`` members compare and hash like their string values, and binary
labels use the tokens ``positive`` / ``negative`` (for arousal, positive
means high arousal).

Everything here is an immutable value and every function is pure, so
unrestricted parallel use is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .errors import AmbiguousPoint, DistributionInvalid, WrongLabelSet

# Inputs whose mass is further than this from 1 are rejected outright.
PRE_NORMALIZATION_TOLERANCE = 1e-6
# After construction the mass is within this of 1.
NORMALIZATION_TOLERANCE = 1e-9


class Axis(Enum):
    VALENCE = "valence"
    AROUSAL = "arousal"


class Quadrant(str, Enum):
    Q1 = "Q1"
    Q2 = "Q2"
    Q3 = "Q3"
    Q4 = "Q4"

    @property
    def valence_positive(self) -> bool:
        return self in (Quadrant.Q1, Quadrant.Q4)

    @property
    def arousal_positive(self) -> bool:
        return self in (Quadrant.Q1, Quadrant.Q2)


QUADRANT_LABELS: tuple[str, ...] = tuple(q.value for q in Quadrant)

POSITIVE = "positive"
NEGATIVE = "negative"
BINARY_LABELS: tuple[str, ...] = (POSITIVE, NEGATIVE)


@dataclass(frozen=True)
class VAPoint:
    """A (valence, arousal) coordinate; both components must be finite."""

    valence: float
    arousal: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.valence) and math.isfinite(self.arousal)):
            raise ValueError(
                f"VAPoint coordinates must be finite, got "
                f"({self.valence!r}, {self.arousal!r})"
            )


@dataclass(frozen=True)
class BinaryLabel:
    """One side of one axis: e.g. positive valence, or low (negative) arousal."""

    axis: Axis
    positive: bool

    @property
    def token(self) -> str:
        """Canonical string used in label sets and output files."""
        return POSITIVE if self.positive else NEGATIVE


def quadrant_of(p: VAPoint, midpoint: float) -> Quadrant:
    """Classify a point into the quadrant convention above.

    Comparisons against ``midpoint`` are strict; a coordinate exactly on a
    midline raises :class:`AmbiguousPoint` rather than silently picking a
    side. ``midpoint`` is the neutral point of the rating scale (5 for a
    1-9 lexicon scale, 0 for a signed scale).
    """
    if not math.isfinite(midpoint):
        raise ValueError(f"midpoint must be finite, got {midpoint!r}")
    if p.valence == midpoint or p.arousal == midpoint:
        raise AmbiguousPoint(
            f"point ({p.valence}, {p.arousal}) lies on a midline of {midpoint}"
        )
    if p.valence > midpoint:
        return Quadrant.Q1 if p.arousal > midpoint else Quadrant.Q4
    return Quadrant.Q2 if p.arousal > midpoint else Quadrant.Q3


def project_quadrant(q: Quadrant, axis: Axis) -> BinaryLabel:
    """Project a quadrant onto one axis of the plane."""
    if axis is Axis.VALENCE:
        return BinaryLabel(axis, q.valence_positive)
    return BinaryLabel(axis, q.arousal_positive)


@dataclass(frozen=True)
class ClassDistribution:
    """A normalized probability vector over an ordered label set.

    Construction validates and renormalizes: the raw probabilities must be
    finite, non-negative, and sum to 1 within ``PRE_NORMALIZATION_TOLERANCE``;
    the stored vector is divided by its exact sum so downstream mass checks
    hold to ``NORMALIZATION_TOLERANCE``. Use :meth:`from_weights` for raw
    non-negative scores that are not yet probabilities.
    """

    labels: tuple[str, ...]
    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        labels = tuple(self.labels)
        probs = tuple(float(p) for p in self.probs)
        if not labels:
            raise DistributionInvalid("label set is empty")
        if len(set(labels)) != len(labels):
            raise DistributionInvalid(f"duplicate labels in {labels}")
        if len(labels) != len(probs):
            raise DistributionInvalid(
                f"{len(labels)} labels but {len(probs)} probabilities"
            )
        for p in probs:
            if not math.isfinite(p) or p < 0.0:
                raise DistributionInvalid(f"probability {p!r} is not in [0, 1]")
        total = math.fsum(probs)
        if abs(total - 1.0) > PRE_NORMALIZATION_TOLERANCE:
            raise DistributionInvalid(
                f"probabilities sum to {total!r}, expected 1 within "
                f"{PRE_NORMALIZATION_TOLERANCE}"
            )
        # Renormalize only when the drift exceeds the stored-mass tolerance;
        # leaving in-tolerance vectors untouched keeps file round-trips and
        # blend arithmetic bitwise stable.
        if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
            probs = tuple(p / total for p in probs)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_weights(
        cls, labels: Sequence[str], weights: Iterable[float]
    ) -> "ClassDistribution":
        """Normalize arbitrary non-negative weights into a distribution."""
        weights = [float(w) for w in weights]
        for w in weights:
            if not math.isfinite(w) or w < 0.0:
                raise DistributionInvalid(f"weight {w!r} is not a finite non-negative")
        total = math.fsum(weights)
        if total <= 0.0:
            raise DistributionInvalid("weights sum to zero, cannot normalize")
        return cls(tuple(labels), tuple(w / total for w in weights))

    def prob(self, label: str) -> float:
        try:
            return self.probs[self.labels.index(label)]
        except ValueError:
            raise WrongLabelSet(f"label {label!r} not in {self.labels}") from None

    def argmax_index(self) -> int:
        """Index of the largest probability; first one wins on exact ties."""
        best = 0
        for i in range(1, len(self.probs)):
            if self.probs[i] > self.probs[best]:
                best = i
        return best

    def argmax_label(self) -> str:
        return self.labels[self.argmax_index()]

    def reordered(self, labels: Sequence[str]) -> "ClassDistribution":
        """The same distribution with its labels in the given order."""
        labels = tuple(labels)
        if set(labels) != set(self.labels) or len(labels) != len(self.labels):
            raise WrongLabelSet(
                f"cannot reorder {self.labels} as {labels}: different label sets"
            )
        return ClassDistribution(labels, tuple(self.prob(l) for l in labels))


def marginalize(d: ClassDistribution, axis: Axis) -> ClassDistribution:
    """Collapse a quadrant distribution onto one axis.

    Sums the probabilities of the two quadrants sharing each sign on the
    chosen axis; the result is over ``(positive, negative)`` and keeps the
    total mass of 1. Raises :class:`WrongLabelSet` unless the input is
    quadrant-valued.
    """
    if set(d.labels) != set(QUADRANT_LABELS):
        raise WrongLabelSet(
            f"marginalize needs the four quadrant labels, got {d.labels}"
        )
    positive = 0.0
    negative = 0.0
    for label, p in zip(d.labels, d.probs):
        q = Quadrant(label)
        sign = q.valence_positive if axis is Axis.VALENCE else q.arousal_positive
        if sign:
            positive += p
        else:
            negative += p
    return ClassDistribution(BINARY_LABELS, (positive, negative))
