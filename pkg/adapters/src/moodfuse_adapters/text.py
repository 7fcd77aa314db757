"""Text sentiment adapter: lyrics in, predictions JSON out.

Tokenizes each song's lyrics, splits sequences over the model's token
budget into windows classified independently, folds every window's label
space onto binary valence, and records both the per-chunk distributions
and their uniform-mean aggregate.

Backends:

  transformers  the real models (needs the hf extra and reachable weights)
  wordlist      deterministic keyword scorer covering the same label
                spaces; exercises the full pipeline on any machine

Model selectors name the four evaluated checkpoints; --hf-model overrides
the hub id when a registry default does not match your mirror.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from .folding import BINARY_LABELS, fold_scores, load_folds
from .io import ManifestEntry, prediction_record, read_manifest, write_predictions

logger = logging.getLogger(__name__)

DEFAULT_MAX_TOKENS = 512
# A chunk whose dropped (non-valence) mass exceeds this is reported.
NEUTRAL_DOMINANCE = 0.5


@dataclass(frozen=True)
class TextModelSpec:
    selector: str
    hf_id: str
    fold: str


MODEL_REGISTRY = {
    "lyrics": TextModelSpec(
        "lyrics", "finetuning-sentiment-model-4500-lyrics", "binary"
    ),
    "siebert": TextModelSpec(
        "siebert", "siebert/sentiment-roberta-large-english", "binary"
    ),
    "poems": TextModelSpec(
        "poems", "nickwong64/bert-base-uncased-poems-sentiment", "poems"
    ),
    "six-emotions": TextModelSpec(
        "six-emotions", "bhadresh-savani/bert-base-uncased-emotion",
        "six-emotions",
    ),
}


def plan_ranges(n_tokens: int, max_tokens: int) -> list[tuple[int, int]]:
    """Greedy non-overlapping windows of at most max_tokens."""
    if max_tokens < 1:
        raise ValueError(f"max_tokens must be >= 1, got {max_tokens}")
    ranges = []
    start = 0
    while True:
        end = min(start + max_tokens, n_tokens)
        ranges.append((start, end))
        if end == n_tokens:
            return ranges
        start = end


class WordlistBackend:
    """Keyword-count scorer; deterministic and dependency-free.

    A pipeline stand-in, not a sentiment model: scores are Laplace-smoothed
    hit counts against small built-in word lists for the selector's label
    space.
    """

    tokenizer_id = "whitespace"

    def __init__(self, spec: TextModelSpec, wordlists: dict[str, list[str]]):
        self.spec = spec
        self.model_id = f"wordlist-{spec.selector}"
        self.sets = {name: frozenset(words) for name, words in wordlists.items()}

    def tokenize(self, text: str) -> list[str]:
        return text.lower().split()

    def effective_max(self, max_tokens: int) -> int:
        return max_tokens

    def score_window(self, tokens: list[str]) -> dict[str, float]:
        def hits(name):
            return sum(1 for t in tokens if t in self.sets[name])

        if self.spec.fold == "binary":
            return {
                "negative": hits("negative") + 1.0,
                "positive": hits("positive") + 1.0,
            }
        if self.spec.fold == "poems":
            neg, pos = hits("negative"), hits("positive")
            return {
                "negative": neg + 1.0,
                "positive": pos + 1.0,
                "neutral": 1.0,
                "mixed": min(neg, pos) + 0.5,
            }
        emotions = ("anger", "fear", "sadness", "joy", "love", "surprise")
        return {name: hits(name) + 0.25 for name in emotions}


class TransformersBackend:
    """Runs a sequence-classification checkpoint in evaluation mode."""

    def __init__(self, spec: TextModelSpec, hf_model: str | None = None):
        try:
            import torch
            from transformers import (
                AutoModelForSequenceClassification,
                AutoTokenizer,
            )
        except ImportError as exc:
            raise RuntimeError(
                "the transformers backend needs the hf extra installed"
            ) from exc
        self.spec = spec
        self._torch = torch
        model_ref = hf_model or spec.hf_id
        self.tokenizer = AutoTokenizer.from_pretrained(model_ref)
        self.model = AutoModelForSequenceClassification.from_pretrained(model_ref)
        self.model.eval()
        self.model_id = model_ref
        self.tokenizer_id = model_ref
        self.labels = [
            str(self.model.config.id2label[i]).lower()
            for i in range(self.model.config.num_labels)
        ]

    def tokenize(self, text: str) -> list[int]:
        return self.tokenizer(text, add_special_tokens=False)["input_ids"]

    def effective_max(self, max_tokens: int) -> int:
        specials = self.tokenizer.num_special_tokens_to_add()
        return max(1, max_tokens - specials)

    def score_window(self, token_ids: list[int]) -> dict[str, float]:
        ids = self.tokenizer.build_inputs_with_special_tokens(list(token_ids))
        tensor = self._torch.tensor([ids])
        with self._torch.no_grad():
            logits = self.model(tensor).logits[0]
        probs = self._torch.softmax(logits, dim=-1).tolist()
        return dict(zip(self.labels, probs))


def run_text_adapter(
    manifest_path: str | Path,
    selector: str,
    backend,
    out_path: str | Path,
    max_tokens: int = DEFAULT_MAX_TOKENS,
) -> tuple[int, list[str]]:
    """Classify each song's lyrics and write the predictions file.

    Returns (records written, diagnostics). Songs without readable,
    non-empty lyrics are skipped with a diagnostic instead of failing the
    batch.
    """
    spec = MODEL_REGISTRY[selector]
    fold = load_folds()[spec.fold]
    window = backend.effective_max(max_tokens)
    records = []
    diagnostics: list[str] = []
    for entry in read_manifest(manifest_path):
        record = _classify_entry(entry, backend, fold, window, diagnostics)
        if record is not None:
            records.append(record)
    write_predictions(records, out_path)
    return len(records), diagnostics


def _classify_entry(
    entry: ManifestEntry, backend, fold, window: int, diagnostics: list[str]
):
    if entry.lyrics_path is None:
        diagnostics.append(f"{entry.song_id}: no lyrics path")
        return None
    try:
        text = entry.lyrics_path.read_text(encoding="utf-8")
    except OSError as exc:
        diagnostics.append(f"{entry.song_id}: unreadable lyrics ({exc})")
        return None
    tokens = backend.tokenize(text)
    if not tokens:
        diagnostics.append(f"{entry.song_id}: empty lyrics")
        return None

    chunks = []
    for start, end in plan_ranges(len(tokens), window):
        scores = backend.score_window(tokens[start:end])
        try:
            pair, dropped = fold_scores(scores, fold)
        except ValueError as exc:
            diagnostics.append(
                f"{entry.song_id}: chunk [{start}, {end}) unfoldable ({exc})"
            )
            continue
        if dropped > NEUTRAL_DOMINANCE:
            diagnostics.append(
                f"{entry.song_id}: chunk [{start}, {end}) dominated by "
                f"non-valence labels ({dropped:.2f} dropped)"
            )
        chunks.append({"start": start, "end": end, "probs": pair})
    if not chunks:
        diagnostics.append(f"{entry.song_id}: no classifiable chunks")
        return None

    k = len(chunks)
    aggregate = [
        math.fsum(c["probs"][i] for c in chunks) / k
        for i in range(len(BINARY_LABELS))
    ]
    return prediction_record(
        entry.song_id,
        "text",
        backend.model_id,
        list(BINARY_LABELS),
        aggregate,
        chunks=chunks,
        tokenizer_id=backend.tokenizer_id,
    )


def load_wordlists() -> dict[str, list[str]]:
    import json
    from importlib import resources

    raw = (
        resources.files("moodfuse_adapters.data") / "wordlists.json"
    ).read_text(encoding="utf-8")
    return json.loads(raw)


def build_backend(selector: str, backend_name: str, hf_model: str | None = None):
    spec = MODEL_REGISTRY[selector]
    if backend_name == "wordlist":
        return WordlistBackend(spec, load_wordlists())
    return TransformersBackend(spec, hf_model)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="moodfuse-text-adapter",
        description="Emit text sentiment predictions JSON for a manifest.",
    )
    parser.add_argument("--manifest", required=True)
    parser.add_argument("--model", required=True, choices=sorted(MODEL_REGISTRY))
    parser.add_argument("--backend", choices=("transformers", "wordlist"),
                        default="transformers")
    parser.add_argument("--hf-model", default=None,
                        help="override the hub id of the selected model")
    parser.add_argument("--max-tokens", type=int, default=DEFAULT_MAX_TOKENS)
    parser.add_argument("--out", required=True)
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO, stream=sys.stderr,
                        format="%(message)s")
    try:
        backend = build_backend(args.model, args.backend, args.hf_model)
        written, diagnostics = run_text_adapter(
            args.manifest, args.model, backend, args.out, args.max_tokens
        )
    except (OSError, RuntimeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for line in diagnostics:
        print(f"skip: {line}", file=sys.stderr)
    print(f"wrote {written} records to {args.out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
