"""Token-budget chunk planning and per-chunk result aggregation.

Transformer sentiment models cap their input at a fixed token count
(512 for the usual BERT family), so longer lyrics are split into bounded
windows, classified independently, and the per-chunk class distributions
are folded back into one distribution for the song.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .circumplex import ClassDistribution
from .errors import EmptyDataset, EmptyText, LengthMismatch, MixedLabelSets

WEIGHTINGS = ("uniform", "token-count", "majority-vote")


def whitespace_tokenize(text: str) -> "TokenizedText":
    """Fallback tokenizer; real subword counts come from model adapters."""
    return TokenizedText(tuple(text.split()), "whitespace")


@dataclass(frozen=True)
class TokenizedText:
    tokens: tuple[str, ...]
    tokenizer_id: str


@dataclass(frozen=True)
class ChunkPlan:
    """Half-open token ranges covering a text, each at most max_tokens long.

    Consecutive ranges overlap by exactly ``overlap`` tokens; only the last
    range may be shorter than the budget.
    """

    chunks: tuple[tuple[int, int], ...]
    max_tokens: int
    overlap: int

    def __post_init__(self) -> None:
        if not self.chunks:
            raise ValueError("a chunk plan needs at least one range")
        prev_start, prev_end = None, 0
        for start, end in self.chunks:
            if not 0 <= start < end:
                raise ValueError(f"bad range [{start}, {end})")
            if end - start > self.max_tokens:
                raise ValueError(
                    f"range [{start}, {end}) exceeds budget {self.max_tokens}"
                )
            if prev_start is not None:
                if prev_end - start != self.overlap:
                    raise ValueError(
                        f"ranges [{prev_start}, {prev_end}) and [{start}, {end}) "
                        f"overlap by {prev_end - start}, expected {self.overlap}"
                    )
            elif start != 0:
                raise ValueError("first range must start at token 0")
            prev_start, prev_end = start, end

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(end - start for start, end in self.chunks)

    def slices(self, tokens: Sequence[str]) -> list[Sequence[str]]:
        return [tokens[start:end] for start, end in self.chunks]


def plan_chunks(text: TokenizedText, max_tokens: int, overlap: int = 0) -> ChunkPlan:
    """Greedy left-to-right packing of the token sequence.

    Every token lands in at least one chunk; a text within the budget is a
    single chunk. The window advances by ``max_tokens - overlap`` each step.
    """
    if max_tokens < 1:
        raise ValueError(f"max_tokens must be >= 1, got {max_tokens}")
    if not 0 <= overlap < max_tokens:
        raise ValueError(f"overlap must be in [0, max_tokens), got {overlap}")
    n = len(text.tokens)
    if n == 0:
        raise EmptyText(f"nothing to chunk (tokenizer {text.tokenizer_id!r})")
    ranges = []
    start = 0
    while True:
        end = min(start + max_tokens, n)
        ranges.append((start, end))
        if end == n:
            break
        start += max_tokens - overlap
    return ChunkPlan(tuple(ranges), max_tokens, overlap)


def aggregate_chunks(
    dists: Sequence[ClassDistribution],
    weighting: str = "uniform",
    chunk_lengths: Sequence[int] | None = None,
) -> ClassDistribution:
    """Fold per-chunk distributions into one.

    uniform        mean of the probability vectors (default)
    token-count    mean weighted by chunk_lengths
    majority-vote  each chunk votes its argmax; the vote shares are returned

    The mean weightings map identical inputs to that same distribution and
    are invariant under chunk reordering and weight rescaling.
    """
    if weighting not in WEIGHTINGS:
        raise ValueError(f"weighting must be one of {WEIGHTINGS}, got {weighting!r}")
    if not dists:
        raise EmptyDataset("no chunk distributions to aggregate")
    labels = dists[0].labels
    for d in dists[1:]:
        if d.labels != labels:
            raise MixedLabelSets(f"chunk label sets differ: {labels} vs {d.labels}")

    if weighting == "token-count":
        if chunk_lengths is None or len(chunk_lengths) != len(dists):
            raise LengthMismatch(
                f"token-count weighting needs one length per chunk, got "
                f"{None if chunk_lengths is None else len(chunk_lengths)} "
                f"for {len(dists)} chunks"
            )
        weights = [float(c) for c in chunk_lengths]
    elif weighting == "majority-vote":
        votes = [0.0] * len(labels)
        for d in dists:
            votes[d.argmax_index()] += 1.0
        return ClassDistribution.from_weights(labels, votes)
    else:
        weights = [1.0] * len(dists)

    if all(d == dists[0] for d in dists):
        # the mean of identical vectors is that vector, exactly
        return dists[0]
    raw = [
        math.fsum(w * d.probs[i] for w, d in zip(weights, dists))
        for i in range(len(labels))
    ]
    return ClassDistribution.from_weights(labels, raw)
