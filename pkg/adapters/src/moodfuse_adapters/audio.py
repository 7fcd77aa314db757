"""Audio tag adapter: mood/theme tag scores in, quadrant predictions out.

The auto-tagging model itself runs elsewhere (it is a separate checkout
with its own weights); this adapter turns its per-song tag scores into
quadrant probability records. Tags excluded by the mapping table are
dropped before renormalization, unmapped tags are dropped with a
diagnostic, and the surviving mass is summed per quadrant.

Backends:

  tags-file   read per-song tag scores dumped by the real tagger
              ({"model_id": ..., "scores": {song_id: {tag: score}}})
  synthetic   deterministic pseudo-scores derived from the song id, for
              pipeline testing without any model
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

from .io import ManifestEntry, prediction_record, read_manifest, read_mapping_table, write_predictions

QUADRANT_LABELS = ["Q1", "Q2", "Q3", "Q4"]


class TagsFileBackend:
    def __init__(self, path: str | Path):
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(payload, dict) or "scores" not in payload:
            raise ValueError(f"{path}: expected an object with a 'scores' map")
        self.model_id = str(payload.get("model_id", "external-tagger"))
        self.scores = payload["scores"]

    def tag_scores(self, entry: ManifestEntry) -> dict[str, float] | None:
        raw = self.scores.get(entry.song_id)
        if raw is None:
            return None
        return {str(tag): float(score) for tag, score in raw.items()}


class SyntheticBackend:
    """Stable pseudo-scores; a stand-in tagger for pipeline tests."""

    model_id = "synthetic-tagger"

    def __init__(self, vocabulary: list[str]):
        self.vocabulary = sorted(vocabulary)

    def tag_scores(self, entry: ManifestEntry) -> dict[str, float] | None:
        if entry.audio_path is None or not entry.audio_path.is_file():
            return None
        return {tag: self._score(entry.song_id, tag) for tag in self.vocabulary}

    @staticmethod
    def _score(song_id: str, tag: str) -> float:
        digest = hashlib.sha256(f"{song_id}|{tag}".encode("utf-8")).digest()
        return int.from_bytes(digest[:8], "big") / 2**64


def reduce_tags(
    scores: dict[str, float], decisions: dict[str, str]
) -> tuple[list[float] | None, dict[str, float]]:
    """Tag scores -> quadrant probabilities under a mapping table.

    Returns (probs over Q1..Q4 or None when nothing maps, dropped-mass
    summary by reason).
    """
    sums = {label: 0.0 for label in QUADRANT_LABELS}
    dropped = {"excluded": 0.0, "unmapped": 0.0}
    for tag, score in scores.items():
        decision = decisions.get(tag.strip().lower())
        if decision in sums:
            sums[decision] += score
        elif decision == "excluded":
            dropped["excluded"] += score
        else:
            dropped["unmapped"] += score
    total = math.fsum(sums.values())
    if total <= 0:
        return None, dropped
    return [sums[label] / total for label in QUADRANT_LABELS], dropped


def run_audio_adapter(
    manifest_path: str | Path,
    mapping_path: str | Path,
    backend,
    out_path: str | Path,
) -> tuple[int, list[str]]:
    """Reduce each song's tag scores to a quadrant record and write JSON."""
    decisions = read_mapping_table(mapping_path)
    records = []
    diagnostics: list[str] = []
    for entry in read_manifest(manifest_path):
        if entry.audio_path is None and not isinstance(backend, TagsFileBackend):
            diagnostics.append(f"{entry.song_id}: no audio path")
            continue
        scores = backend.tag_scores(entry)
        if scores is None:
            diagnostics.append(f"{entry.song_id}: no tag scores available")
            continue
        probs, dropped = reduce_tags(scores, decisions)
        if probs is None:
            diagnostics.append(
                f"{entry.song_id}: no mapped tag mass "
                f"(excluded {dropped['excluded']:.3f}, "
                f"unmapped {dropped['unmapped']:.3f})"
            )
            continue
        records.append(
            prediction_record(
                entry.song_id, "audio", backend.model_id,
                list(QUADRANT_LABELS), probs,
            )
        )
    write_predictions(records, out_path)
    return len(records), diagnostics


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="moodfuse-audio-adapter",
        description="Emit quadrant predictions JSON from mood-tag scores.",
    )
    parser.add_argument("--manifest", required=True)
    parser.add_argument("--mapping", required=True,
                        help="term,decision,provenance CSV from map-tags")
    parser.add_argument("--backend", choices=("tags-file", "synthetic"),
                        default="tags-file")
    parser.add_argument("--tags", default=None,
                        help="tag-scores JSON for the tags-file backend")
    parser.add_argument("--out", required=True)
    args = parser.parse_args(argv)

    try:
        if args.backend == "tags-file":
            if not args.tags:
                raise ValueError("the tags-file backend needs --tags")
            backend = TagsFileBackend(args.tags)
        else:
            vocabulary = sorted(read_mapping_table(args.mapping))
            backend = SyntheticBackend(vocabulary)
        written, diagnostics = run_audio_adapter(
            args.manifest, args.mapping, backend, args.out
        )
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for line in diagnostics:
        print(f"skip: {line}", file=sys.stderr)
    print(f"wrote {written} records to {args.out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
