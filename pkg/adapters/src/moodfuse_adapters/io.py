"""File plumbing shared by the adapters.

The adapters talk to the core pipeline only through its file formats: the
dataset manifest (CSV), the mapping table (CSV), and the predictions JSON
schema. The readers/writers here implement those formats directly so the
adapters stay installable on a bare inference box.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass
from pathlib import Path

SCHEMA_VERSION = "1"


@dataclass(frozen=True)
class ManifestEntry:
    song_id: str
    audio_path: Path | None
    lyrics_path: Path | None


def read_manifest(path: str | Path) -> list[ManifestEntry]:
    """song_id plus media paths, resolved relative to the manifest."""
    path = Path(path)
    base = path.parent
    entries = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if not reader.fieldnames or "song_id" not in reader.fieldnames:
            raise ValueError(f"{path}: manifest needs a song_id column")
        for row in reader:
            song_id = (row.get("song_id") or "").strip()
            if not song_id:
                continue
            entries.append(
                ManifestEntry(
                    song_id,
                    _resolve(base, row.get("audio_path")),
                    _resolve(base, row.get("lyrics_path")),
                )
            )
    return entries


def _resolve(base: Path, raw: str | None) -> Path | None:
    raw = (raw or "").strip()
    if not raw:
        return None
    p = Path(raw)
    return p if p.is_absolute() else base / p


def read_mapping_table(path: str | Path) -> dict[str, str]:
    """term -> decision (Q1..Q4 | excluded | unmapped) from the mapping CSV."""
    decisions = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for col in ("term", "decision"):
            if col not in (reader.fieldnames or []):
                raise ValueError(f"{path}: mapping table needs a {col!r} column")
        for row in reader:
            decisions[row["term"].strip().lower()] = row["decision"].strip()
    return decisions


def write_predictions(records: list[dict], path: str | Path) -> None:
    """Write the predictions JSON atomically (write-then-rename)."""
    path = Path(path)
    payload = {"schema_version": SCHEMA_VERSION, "records": records}
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    os.replace(tmp, path)


def prediction_record(
    song_id: str,
    modality: str,
    model_id: str,
    labels: list[str],
    probs: list[float],
    chunks: list[dict] | None = None,
    tokenizer_id: str | None = None,
) -> dict:
    record = {
        "song_id": song_id,
        "modality": modality,
        "model_id": model_id,
        "labels": labels,
        "probs": probs,
    }
    if chunks is not None:
        record["chunks"] = chunks
    if tokenizer_id is not None:
        record["tokenizer_id"] = tokenizer_id
    return record
