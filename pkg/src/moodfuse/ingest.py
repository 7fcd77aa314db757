"""Dataset manifests, gold-label normalization, and prediction files.

Two wire formats live here.

Manifest (delimiter-separated, header required):
    song_id [, title, artist, valence, arousal, mood_terms, audio_path,
    lyrics_path, genre, year, quadrant]
``mood_terms`` is semicolon-separated. ``quadrant`` holds an already
normalized gold label (Q1..Q4) and is what the normalize command writes
back. Unrecognized columns are ignored.

Predictions (JSON):
    {"schema_version": "1", "records": [...]}
    record: {"song_id", "modality": "audio"|"text", "model_id",
             "labels": [...], "probs": [...],
             optional "chunks": [{"start", "end", "probs"}],
             optional "tokenizer_id"}
Field names are exact; ``probs`` aligns with ``labels`` by index; chunk
probability rows use the record's label order. Violations raise
:class:`SchemaError` carrying the JSON path of the offending element.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Sequence

from .circumplex import (
    Axis,
    BINARY_LABELS,
    ClassDistribution,
    QUADRANT_LABELS,
    Quadrant,
    VAPoint,
    marginalize,
    project_quadrant,
    quadrant_of,
)
from .errors import (
    AmbiguousPoint,
    DistributionInvalid,
    DuplicateSongId,
    ParseError,
    SchemaError,
)
from .fusion import FusionRecord
from .lexicon import EXCLUDED, MappingTable, UNMAPPED

SCHEMA_VERSION = "1"
MODALITIES = ("audio", "text")
LABEL_SPACES = ("quadrants", "valence", "arousal")

# Per-record diagnostic flags set during normalization.
FLAG_AMBIGUOUS_VA = "ambiguous-va"
FLAG_AMBIGUOUS_TERMS = "ambiguous-terms"
FLAG_TERMS_EXCLUDED = "terms-excluded"
FLAG_TERMS_UNMAPPED = "terms-unmapped"

MANIFEST_COLUMNS = (
    "song_id",
    "title",
    "artist",
    "valence",
    "arousal",
    "mood_terms",
    "audio_path",
    "lyrics_path",
    "genre",
    "year",
    "quadrant",
)


@dataclass(frozen=True)
class SongRecord:
    song_id: str
    title: str | None = None
    artist: str | None = None
    gold_quadrant: Quadrant | None = None
    gold_va: VAPoint | None = None
    mood_terms: tuple[str, ...] = ()
    has_audio: bool = False
    has_lyrics: bool = False
    audio_path: str | None = None
    lyrics_path: str | None = None
    genre: str | None = None
    year: str | None = None
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class ChunkDetail:
    ranges: tuple[tuple[int, int], ...]
    dists: tuple[ClassDistribution, ...]


@dataclass(frozen=True)
class PredictionRecord:
    song_id: str
    modality: str
    model_id: str
    dist: ClassDistribution
    chunk_detail: ChunkDetail | None = None
    tokenizer_id: str | None = None


@dataclass(frozen=True)
class PredictionsFile:
    records: tuple[PredictionRecord, ...]
    warnings: tuple[str, ...] = ()
    schema_version: str = SCHEMA_VERSION


def load_manifest(
    path: str | Path,
    *,
    delimiter: str = ",",
    quadrant_remap: Mapping[str, str] | None = None,
) -> list[SongRecord]:
    """Read a dataset manifest; one record per row, keyed by song_id.

    ``quadrant_remap`` rewrites the tokens of the quadrant column before
    parsing, for datasets numbered under a different convention.
    """
    path = Path(path)
    records: list[SongRecord] = []
    seen: set[str] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh, delimiter=delimiter)
        header = reader.fieldnames
        if not header:
            raise ParseError(f"{path}: empty file, expected a header row")
        if "song_id" not in header:
            raise ParseError(f"{path}: missing required column 'song_id'")
        for lineno, row in enumerate(reader, start=2):
            song_id = (row.get("song_id") or "").strip()
            if not song_id:
                raise ParseError(f"{path}:{lineno}: empty song_id")
            if song_id in seen:
                raise DuplicateSongId(f"{path}:{lineno}: song_id {song_id!r}")
            seen.add(song_id)
            records.append(_row_to_record(row, path, lineno, quadrant_remap))
    return records


def _row_to_record(row, path, lineno, quadrant_remap) -> SongRecord:
    def text_or_none(col):
        value = (row.get(col) or "").strip()
        return value or None

    valence = text_or_none("valence")
    arousal = text_or_none("arousal")
    gold_va = None
    if valence is not None or arousal is not None:
        if valence is None or arousal is None:
            raise ParseError(
                f"{path}:{lineno}: valence and arousal must both be present"
            )
        try:
            gold_va = VAPoint(float(valence), float(arousal))
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: bad valence/arousal: {exc}") from None

    gold_quadrant = None
    token = text_or_none("quadrant")
    if token is not None:
        if quadrant_remap:
            token = quadrant_remap.get(token, token)
        try:
            gold_quadrant = Quadrant(token)
        except ValueError:
            raise ParseError(
                f"{path}:{lineno}: unknown quadrant token {token!r}"
            ) from None

    terms = tuple(
        t.strip() for t in (row.get("mood_terms") or "").split(";") if t.strip()
    )
    audio_path = text_or_none("audio_path")
    lyrics_path = text_or_none("lyrics_path")
    return SongRecord(
        song_id=row["song_id"].strip(),
        title=text_or_none("title"),
        artist=text_or_none("artist"),
        gold_quadrant=gold_quadrant,
        gold_va=gold_va,
        mood_terms=terms,
        has_audio=audio_path is not None,
        has_lyrics=lyrics_path is not None,
        audio_path=audio_path,
        lyrics_path=lyrics_path,
        genre=text_or_none("genre"),
        year=text_or_none("year"),
    )


def save_manifest(records: Sequence[SongRecord], path: str | Path) -> None:
    """Write records back out with normalized quadrants and flags attached."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MANIFEST_COLUMNS + ("flags",))
        for r in records:
            writer.writerow(
                [
                    r.song_id,
                    r.title or "",
                    r.artist or "",
                    "" if r.gold_va is None else repr(r.gold_va.valence),
                    "" if r.gold_va is None else repr(r.gold_va.arousal),
                    ";".join(r.mood_terms),
                    r.audio_path or "",
                    r.lyrics_path or "",
                    r.genre or "",
                    r.year or "",
                    "" if r.gold_quadrant is None else r.gold_quadrant.value,
                    ";".join(r.flags),
                ]
            )


def normalize_va_annotations(
    records: Sequence[SongRecord], midpoint: float
) -> list[SongRecord]:
    """Fill gold_quadrant from gold_va against the given scale midpoint.

    Records on a midline are flagged ambiguous and keep a missing gold
    label (so they drop out of evaluation) but stay in the dataset.
    """
    out = []
    for r in records:
        if r.gold_va is None or r.gold_quadrant is not None:
            out.append(r)
            continue
        try:
            out.append(replace(r, gold_quadrant=quadrant_of(r.gold_va, midpoint)))
        except AmbiguousPoint:
            out.append(replace(r, flags=r.flags + (FLAG_AMBIGUOUS_VA,)))
    return out


def normalize_categorical_annotations(
    records: Sequence[SongRecord], mapping: MappingTable
) -> list[SongRecord]:
    """Fill gold_quadrant from mood terms via a mapping table.

    Multi-term records take the majority quadrant over their mapped terms;
    a vote tie flags the record as ambiguous. Records whose terms are all
    excluded or unmapped are flagged accordingly and keep a missing gold.
    """
    rules = mapping.as_dict()
    out = []
    for r in records:
        if not r.mood_terms or r.gold_quadrant is not None:
            out.append(r)
            continue
        votes: dict[str, int] = {}
        excluded = 0
        unknown = 0
        for term in r.mood_terms:
            rule = rules.get(term.strip().lower())
            if rule is None or rule.decision == UNMAPPED:
                unknown += 1
            elif rule.decision == EXCLUDED:
                excluded += 1
            else:
                votes[rule.decision] = votes.get(rule.decision, 0) + 1
        if votes:
            top = max(votes.values())
            winners = sorted(q for q, n in votes.items() if n == top)
            if len(winners) > 1:
                out.append(replace(r, flags=r.flags + (FLAG_AMBIGUOUS_TERMS,)))
            else:
                out.append(replace(r, gold_quadrant=Quadrant(winners[0])))
        elif excluded:
            out.append(replace(r, flags=r.flags + (FLAG_TERMS_EXCLUDED,)))
        else:
            out.append(replace(r, flags=r.flags + (FLAG_TERMS_UNMAPPED,)))
    return out


# ---------------------------------------------------------------------------
# Predictions JSON


def load_predictions(path: str | Path) -> PredictionsFile:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"not valid JSON: {exc}") from None
    if not isinstance(payload, dict):
        raise SchemaError("$", "expected an object")
    _reject_unknown_keys(payload, {"schema_version", "records"}, "$")
    version = payload.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError(
            "$.schema_version", f"expected {SCHEMA_VERSION!r}, got {version!r}"
        )
    raw_records = payload.get("records")
    if not isinstance(raw_records, list):
        raise SchemaError("$.records", "expected a list")

    records = []
    warnings: list[str] = []
    seen_keys: set[tuple[str, str, str]] = set()
    for i, raw in enumerate(raw_records):
        record = _parse_record(raw, f"records[{i}]")
        key = (record.song_id, record.modality, record.model_id)
        if key in seen_keys:
            warnings.append(
                f"records[{i}]: duplicate record for song_id={record.song_id!r}, "
                f"modality={record.modality!r}, model_id={record.model_id!r}"
            )
        seen_keys.add(key)
        _check_chunk_aggregate(record, f"records[{i}]", warnings)
        records.append(record)
    return PredictionsFile(tuple(records), tuple(warnings))


def _reject_unknown_keys(obj: dict, allowed: set, path: str) -> None:
    for key in obj:
        if key not in allowed:
            raise SchemaError(f"{path}.{key}", "unknown field")


def _require(obj: dict, key: str, path: str):
    if key not in obj:
        raise SchemaError(f"{path}.{key}", "missing required field")
    return obj[key]


def _string(obj: dict, key: str, path: str) -> str:
    value = _require(obj, key, path)
    if not isinstance(value, str) or not value:
        raise SchemaError(f"{path}.{key}", "expected a non-empty string")
    return value


def _number_list(value, path: str) -> tuple[float, ...]:
    if not isinstance(value, list):
        raise SchemaError(path, "expected a list of numbers")
    out = []
    for i, x in enumerate(value):
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise SchemaError(f"{path}[{i}]", "expected a number")
        out.append(float(x))
    return tuple(out)


def _parse_record(raw, path: str) -> PredictionRecord:
    if not isinstance(raw, dict):
        raise SchemaError(path, "expected an object")
    _reject_unknown_keys(
        raw,
        {"song_id", "modality", "model_id", "labels", "probs", "chunks",
         "tokenizer_id"},
        path,
    )
    song_id = _string(raw, "song_id", path)
    modality = _string(raw, "modality", path)
    if modality not in MODALITIES:
        raise SchemaError(f"{path}.modality", f"expected one of {MODALITIES}")
    model_id = _string(raw, "model_id", path)

    labels_raw = _require(raw, "labels", path)
    if not isinstance(labels_raw, list) or not all(
        isinstance(l, str) and l for l in labels_raw
    ):
        raise SchemaError(f"{path}.labels", "expected a list of non-empty strings")
    labels = tuple(labels_raw)
    if len(set(labels)) != len(labels):
        raise SchemaError(f"{path}.labels", f"duplicate labels in {labels}")

    probs = _number_list(_require(raw, "probs", path), f"{path}.probs")
    if len(probs) != len(labels):
        raise SchemaError(
            f"{path}.probs",
            f"expected {len(labels)} probabilities, got {len(probs)}",
        )
    dist = _distribution(labels, probs, f"{path}.probs")

    tokenizer_id = None
    if "tokenizer_id" in raw:
        if modality != "text":
            raise SchemaError(
                f"{path}.tokenizer_id", "only text records carry a tokenizer"
            )
        tokenizer_id = _string(raw, "tokenizer_id", path)

    chunk_detail = None
    if "chunks" in raw:
        if modality != "text":
            raise SchemaError(f"{path}.chunks", "only text records carry chunks")
        chunk_detail = _parse_chunks(raw["chunks"], labels, f"{path}.chunks")

    return PredictionRecord(song_id, modality, model_id, dist, chunk_detail,
                            tokenizer_id)


def _distribution(labels, probs, path: str) -> ClassDistribution:
    try:
        return ClassDistribution(labels, probs)
    except DistributionInvalid as exc:
        raise DistributionInvalid(f"{path}: {exc}") from None


def _parse_chunks(raw, labels, path: str) -> ChunkDetail:
    if not isinstance(raw, list) or not raw:
        raise SchemaError(path, "expected a non-empty list of chunk objects")
    ranges = []
    dists = []
    prev_start = -1
    for i, chunk in enumerate(raw):
        cpath = f"{path}[{i}]"
        if not isinstance(chunk, dict):
            raise SchemaError(cpath, "expected an object")
        _reject_unknown_keys(chunk, {"start", "end", "probs"}, cpath)
        start = _int(chunk, "start", cpath)
        end = _int(chunk, "end", cpath)
        if not 0 <= start < end:
            raise SchemaError(cpath, f"bad token range [{start}, {end})")
        if start <= prev_start:
            raise SchemaError(cpath, "chunk starts must strictly increase")
        prev_start = start
        probs = _number_list(_require(chunk, "probs", cpath), f"{cpath}.probs")
        if len(probs) != len(labels):
            raise SchemaError(
                f"{cpath}.probs",
                f"expected {len(labels)} probabilities, got {len(probs)}",
            )
        ranges.append((start, end))
        dists.append(_distribution(labels, probs, f"{cpath}.probs"))
    return ChunkDetail(tuple(ranges), tuple(dists))


def _int(obj: dict, key: str, path: str) -> int:
    value = _require(obj, key, path)
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"{path}.{key}", "expected an integer")
    return value


def _check_chunk_aggregate(record: PredictionRecord, path: str, warnings) -> None:
    """Warn when the recorded distribution is not an aggregate of its chunks."""
    detail = record.chunk_detail
    if detail is None:
        return
    candidates = [[1.0] * len(detail.dists),
                  [float(end - start) for start, end in detail.ranges]]
    for weights in candidates:
        agg = [
            math.fsum(w * d.probs[i] for w, d in zip(weights, detail.dists))
            for i in range(len(record.dist.labels))
        ]
        total = math.fsum(agg)
        if total > 0 and all(
            abs(a / total - p) <= 1e-6 for a, p in zip(agg, record.dist.probs)
        ):
            return
    warnings.append(
        f"{path}: recorded distribution does not match the aggregate of its chunks"
    )


def save_predictions(
    records: Sequence[PredictionRecord], path: str | Path
) -> None:
    """Write the canonical predictions JSON (sorted keys, 2-space indent)."""
    payload = {
        "schema_version": SCHEMA_VERSION,
        "records": [_record_to_json(r) for r in records],
    }
    Path(path).write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def _record_to_json(r: PredictionRecord) -> dict:
    out = {
        "song_id": r.song_id,
        "modality": r.modality,
        "model_id": r.model_id,
        "labels": list(r.dist.labels),
        "probs": list(r.dist.probs),
    }
    if r.chunk_detail is not None:
        out["chunks"] = [
            {"start": start, "end": end, "probs": list(d.probs)}
            for (start, end), d in zip(r.chunk_detail.ranges, r.chunk_detail.dists)
        ]
    if r.tokenizer_id is not None:
        out["tokenizer_id"] = r.tokenizer_id
    return out


# ---------------------------------------------------------------------------
# Joining modalities


@dataclass(frozen=True)
class JoinReport:
    label_space: str
    audio_only: tuple[str, ...] = ()
    text_only: tuple[str, ...] = ()
    unknown_songs: tuple[str, ...] = ()
    incompatible: tuple[str, ...] = ()
    duplicates: tuple[str, ...] = ()


@dataclass(frozen=True)
class JoinResult:
    pairs: tuple[FusionRecord, ...]
    report: JoinReport


def gold_label(record: SongRecord, label_space: str) -> str | None:
    """The record's gold label expressed in the requested space."""
    if record.gold_quadrant is None:
        return None
    if label_space == "quadrants":
        return record.gold_quadrant.value
    axis = Axis.VALENCE if label_space == "valence" else Axis.AROUSAL
    return project_quadrant(record.gold_quadrant, axis).token


def resolve_to_space(
    dist: ClassDistribution, label_space: str
) -> ClassDistribution | None:
    """Express a prediction in the requested space, or None if impossible.

    Quadrant-valued distributions marginalize onto a binary axis.
    positive/negative distributions pass through under either axis (the
    tokens are axis-agnostic; the caller's label space names the reading)
    but cannot be lifted to quadrants.
    """
    is_quadrant = set(dist.labels) == set(QUADRANT_LABELS)
    if label_space == "quadrants":
        return dist if is_quadrant else None
    axis = Axis.VALENCE if label_space == "valence" else Axis.AROUSAL
    if is_quadrant:
        return marginalize(dist, axis)
    if set(dist.labels) == set(BINARY_LABELS):
        return dist
    return None


def join_modalities(
    songs: Sequence[SongRecord],
    predictions: Sequence[PredictionRecord],
    *,
    label_space: str = "auto",
    audio_model: str | None = None,
    text_model: str | None = None,
) -> JoinResult:
    """Pair audio and text predictions per song for fusion and evaluation.

    Inner join on song_id: a fusion pair needs both modalities; everything
    unpaired is reported, never silently dropped. With ``label_space`` set
    to auto the pairs stay on quadrants when both sides are quadrant-valued
    and fall back to binary valence otherwise. When one side is
    quadrant-valued and the other binary, the quadrant side marginalizes.
    If several models' records remain for one (song, modality) after the
    model filters, the lexicographically first model_id wins and the song
    is reported under duplicates.
    """
    by_id = {s.song_id: s for s in songs}
    chosen: dict[tuple[str, str], PredictionRecord] = {}
    duplicates = set()
    unknown = set()
    for record in predictions:
        if record.song_id not in by_id:
            unknown.add(record.song_id)
            continue
        model_filter = audio_model if record.modality == "audio" else text_model
        if model_filter is not None and record.model_id != model_filter:
            continue
        key = (record.song_id, record.modality)
        other = chosen.get(key)
        if other is None:
            chosen[key] = record
        else:
            duplicates.add(record.song_id)
            if record.model_id < other.model_id:
                chosen[key] = record

    audio_ids = {sid for sid, m in chosen if m == "audio"}
    text_ids = {sid for sid, m in chosen if m == "text"}
    both = audio_ids & text_ids

    if label_space == "auto":
        all_quadrant = all(
            set(r.dist.labels) == set(QUADRANT_LABELS) for r in chosen.values()
        )
        label_space = "quadrants" if chosen and all_quadrant else "valence"
    elif label_space not in LABEL_SPACES:
        raise ValueError(f"label_space must be one of {LABEL_SPACES}")

    pairs = []
    incompatible = []
    for song_id in sorted(both):
        audio = resolve_to_space(chosen[(song_id, "audio")].dist, label_space)
        text = resolve_to_space(chosen[(song_id, "text")].dist, label_space)
        if audio is None or text is None or set(audio.labels) != set(text.labels):
            incompatible.append(song_id)
            continue
        pairs.append(
            FusionRecord(
                song_id, audio, text, gold_label(by_id[song_id], label_space)
            )
        )

    report = JoinReport(
        label_space=label_space,
        audio_only=tuple(sorted(audio_ids - text_ids)),
        text_only=tuple(sorted(text_ids - audio_ids)),
        unknown_songs=tuple(sorted(unknown)),
        incompatible=tuple(incompatible),
        duplicates=tuple(sorted(duplicates)),
    )
    return JoinResult(tuple(pairs), report)
