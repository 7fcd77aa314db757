"""Command-line pipeline frontend.

Subcommands:

  map-tags   map a tag/annotation vocabulary onto quadrants via a lexicon
  normalize  fill gold quadrants in a manifest from VA values or mood terms
  evaluate   score one modality's predictions against gold labels
  fuse       combine audio and text predictions per song and score them
  sweep      grid-search the audio weight of the weighted fusion

Every run is deterministic: identical inputs and flags produce
byte-identical outputs. Data goes to files under --out; diagnostics go to
stderr; the exit code is 0 only when no fatal error occurred.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import figures
from .circumplex import BINARY_LABELS, QUADRANT_LABELS
from .errors import MoodfuseError
from .fusion import (
    FusionConfig,
    STRATEGIES,
    TIE_BREAKS,
    fuse,
    selection_proportions,
    sweep_weights,
)
from .ingest import (
    LABEL_SPACES,
    gold_label,
    join_modalities,
    load_manifest,
    load_predictions,
    normalize_categorical_annotations,
    normalize_va_annotations,
    resolve_to_space,
    save_manifest,
)
from .lexicon import (
    MappingTable,
    build_mapping_table,
    builtin_mediaeval_tags,
    builtin_mirex_clusters,
    builtin_tag_overrides,
    load_lexicon,
    load_mapping_table,
    load_vocabulary,
    map_mirex_cluster_terms,
    save_mapping_table,
)
from .metrics import confusion, metrics


class CliError(MoodfuseError):
    """Fatal usage or data problem; message is printed and the exit is 1."""


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except MoodfuseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="moodfuse",
        description="Valence-arousal music sentiment pipeline.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("map-tags", help="map a vocabulary onto quadrants")
    p.add_argument("--lexicon", required=True, help="ratings CSV path")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--vocabulary", help="term list, one per line")
    source.add_argument(
        "--mediaeval", action="store_true",
        help="use the built-in 56-tag mood/theme vocabulary",
    )
    source.add_argument(
        "--mirex", action="store_true",
        help="use the built-in mood-cluster adjective lists",
    )
    p.add_argument(
        "--per-cluster", action="store_true",
        help="with --mirex, place each cluster once at its mean rating",
    )
    overrides = p.add_mutually_exclusive_group()
    overrides.add_argument("--overrides", help="override/exclusion table CSV")
    overrides.add_argument(
        "--builtin-overrides", action="store_true",
        help="apply the built-in tag override/exclusion table",
    )
    p.add_argument("--word-col", default="word")
    p.add_argument("--valence-col", default="valence_mean")
    p.add_argument("--arousal-col", default="arousal_mean")
    p.add_argument("--delimiter", default=None)
    p.add_argument("--scale-min", type=float, default=1.0)
    p.add_argument("--scale-max", type=float, default=9.0)
    p.add_argument("--midpoint", type=float, default=None)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(handler=cmd_map_tags)

    p = sub.add_parser("normalize", help="fill gold quadrants in a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--midpoint", type=float, default=None,
                   help="scale midpoint for valence/arousal columns")
    p.add_argument("--mapping", help="mapping table CSV for mood terms")
    p.add_argument("--quadrant-remap", default=None,
                   help="rewrite quadrant tokens, e.g. Q1=Q2,Q2=Q1")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_normalize)

    for name in ("evaluate", "fuse", "sweep"):
        p = sub.add_parser(name)
        p.add_argument("--manifest", required=True)
        if name == "evaluate":
            group = p.add_mutually_exclusive_group(required=True)
            group.add_argument("--audio-preds")
            group.add_argument("--text-preds")
            p.add_argument("--model-id", default=None,
                           help="pick one model from a multi-model file")
        else:
            p.add_argument("--audio-preds", required=True)
            p.add_argument("--text-preds", required=True)
            p.add_argument("--audio-model-id", default=None)
            p.add_argument("--text-model-id", default=None)
            p.add_argument("--tie-break", choices=TIE_BREAKS,
                           default="prefer-text")
        p.add_argument("--label-space", choices=LABEL_SPACES, default=None)
        p.add_argument("--midpoint", type=float, default=None)
        p.add_argument("--mapping", default=None)
        p.add_argument("--quadrant-remap", default=None)
        p.add_argument("--out", required=True)
        if name == "fuse":
            p.add_argument("--strategy", choices=STRATEGIES, required=True)
            p.add_argument("--weight", type=float, default=None,
                           help="audio weight for --strategy weighted")
        if name == "sweep":
            p.add_argument("--grid-step", type=float, default=0.05)
            p.add_argument("--score", choices=("macro-f1", "micro-f1"),
                           default="macro-f1")
        p.set_defaults(handler={"evaluate": cmd_evaluate,
                                "fuse": cmd_fuse,
                                "sweep": cmd_sweep}[name])
    return parser


def _existing(path_str: str, what: str) -> Path:
    path = Path(path_str)
    if not path.is_file():
        raise CliError(f"{what} file not found: {path}")
    return path


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _dump_json(payload: dict, path: Path) -> None:
    path.write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def _parse_remap(raw: str | None) -> dict[str, str] | None:
    if raw is None:
        return None
    remap = {}
    for part in raw.split(","):
        if "=" not in part:
            raise CliError(f"bad quadrant remap entry {part!r} (want OLD=NEW)")
        old, new = part.split("=", 1)
        remap[old.strip()] = new.strip()
    return remap


# ---------------------------------------------------------------------------


def cmd_map_tags(args) -> int:
    lexicon_path = _existing(args.lexicon, "lexicon")
    lex = load_lexicon(
        lexicon_path,
        word_col=args.word_col,
        valence_col=args.valence_col,
        arousal_col=args.arousal_col,
        delimiter=args.delimiter,
        scale_min=args.scale_min,
        scale_max=args.scale_max,
        midpoint=args.midpoint,
    )
    overrides = None
    if args.overrides:
        overrides = load_mapping_table(_existing(args.overrides, "overrides"))
    elif args.builtin_overrides:
        overrides = builtin_tag_overrides()

    if args.mirex:
        table = map_mirex_cluster_terms(
            builtin_mirex_clusters(), lex, per_cluster=args.per_cluster
        )
        if overrides is not None:
            manual = overrides.as_dict()
            table = MappingTable(
                tuple(manual.get(rule.term, rule) for rule in table.rules)
            )
    else:
        vocabulary = (
            builtin_mediaeval_tags()
            if args.mediaeval
            else load_vocabulary(_existing(args.vocabulary, "vocabulary"))
        )
        table = build_mapping_table(vocabulary, lex, overrides)

    out = _out_dir(args)
    save_mapping_table(table, out / "mapping.csv")
    unmapped = [r.term for r in table.rules if r.decision == "unmapped"]
    if unmapped:
        print(f"unmapped terms ({len(unmapped)}): {', '.join(unmapped)}",
              file=sys.stderr)
    return 0


def _load_gold_manifest(args) -> list:
    records = load_manifest(
        _existing(args.manifest, "manifest"),
        quadrant_remap=_parse_remap(getattr(args, "quadrant_remap", None)),
    )
    if args.midpoint is not None:
        records = normalize_va_annotations(records, args.midpoint)
    if args.mapping:
        table = load_mapping_table(_existing(args.mapping, "mapping"))
        records = normalize_categorical_annotations(records, table)
    flagged = [r.song_id for r in records if r.flags]
    if flagged:
        print(
            f"{len(flagged)} records flagged during normalization: "
            f"{', '.join(flagged[:10])}", file=sys.stderr,
        )
    return records


def cmd_normalize(args) -> int:
    if args.midpoint is None and not args.mapping:
        raise CliError("normalize needs --midpoint and/or --mapping")
    records = _load_gold_manifest(args)
    out = _out_dir(args)
    save_manifest(records, out / "normalized.csv")
    with_gold = sum(1 for r in records if r.gold_quadrant is not None)
    print(f"{with_gold}/{len(records)} records carry a gold quadrant",
          file=sys.stderr)
    return 0


def _space_labels(label_space: str) -> tuple[str, ...]:
    return QUADRANT_LABELS if label_space == "quadrants" else BINARY_LABELS


def _metrics_payload(label_space, labels, golds, preds, extra=None) -> dict:
    cm = confusion(golds, preds, labels)
    report = metrics(cm)
    payload = {
        "label_space": label_space,
        "labels": list(labels),
        "records_evaluated": len(golds),
        "confusion": [list(row) for row in cm.counts],
        "support": dict(report.support),
        "per_class": {
            label: {"precision": m.precision, "recall": m.recall, "f1": m.f1}
            for label, m in report.per_class.items()
        },
        "macro": {
            "precision": report.macro.precision,
            "recall": report.macro.recall,
            "f1": report.macro.f1,
        },
        "flagged": list(report.flagged),
        "zero_division": report.zero_division,
    }
    if extra:
        payload.update(extra)
    return payload


def _metrics_figure(payload: dict, title: str) -> str:
    labels = payload["labels"]
    series = [
        (name, [payload["per_class"][l][key] for l in labels])
        for name, key in (("precision", "precision"), ("recall", "recall"),
                          ("F1", "f1"))
    ]
    return figures.grouped_bar_svg(title, labels, series)


def cmd_evaluate(args) -> int:
    records = _load_gold_manifest(args)
    preds_path = args.audio_preds or args.text_preds
    loaded = load_predictions(_existing(preds_path, "predictions"))
    for warning in loaded.warnings:
        print(f"warning: {warning}", file=sys.stderr)

    model_ids = sorted({r.model_id for r in loaded.records})
    if args.model_id is not None:
        prediction_records = [
            r for r in loaded.records if r.model_id == args.model_id
        ]
    elif len(model_ids) > 1:
        raise CliError(
            f"predictions file holds several models ({', '.join(model_ids)}); "
            f"pick one with --model-id"
        )
    else:
        prediction_records = list(loaded.records)

    label_space = args.label_space or "quadrants"
    labels = _space_labels(label_space)
    by_id = {r.song_id: r for r in records}
    golds, preds = [], []
    skipped = 0
    for record in prediction_records:
        song = by_id.get(record.song_id)
        gold = gold_label(song, label_space) if song else None
        dist = resolve_to_space(record.dist, label_space)
        if gold is None or dist is None:
            skipped += 1
            continue
        golds.append(gold)
        preds.append(dist.argmax_label())
    if skipped:
        print(f"{skipped} prediction records not evaluable (no gold or "
              f"incompatible labels)", file=sys.stderr)
    if not golds:
        raise CliError("no evaluable records")

    payload = _metrics_payload(label_space, labels, golds, preds)
    out = _out_dir(args)
    _dump_json(payload, out / "metrics.json")
    (out / "metrics.svg").write_text(
        _metrics_figure(payload, f"per-class metrics ({label_space})"),
        encoding="utf-8",
    )
    return 0


def _join_for_fusion(args):
    records = _load_gold_manifest(args)
    audio = load_predictions(_existing(args.audio_preds, "audio predictions"))
    text = load_predictions(_existing(args.text_preds, "text predictions"))
    for warning in audio.warnings + text.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    result = join_modalities(
        records,
        list(audio.records) + list(text.records),
        label_space=args.label_space or "auto",
        audio_model=args.audio_model_id,
        text_model=args.text_model_id,
    )
    report = result.report
    for field in ("audio_only", "text_only", "unknown_songs", "incompatible",
                  "duplicates"):
        ids = getattr(report, field)
        if ids:
            print(f"join: {field} ({len(ids)}): {', '.join(ids[:10])}",
                  file=sys.stderr)
    if not result.pairs:
        raise CliError("no joinable records with both modalities")
    return result


def cmd_fuse(args) -> int:
    if (args.weight is not None) != (args.strategy == "weighted"):
        raise CliError("--weight is required exactly when --strategy weighted")
    config = FusionConfig(args.strategy, args.weight, args.tie_break)
    result = _join_for_fusion(args)
    label_space = result.report.label_space
    labels = _space_labels(label_space)

    outcomes = [(pair, fuse(pair.audio, pair.text, config))
                for pair in result.pairs]
    out = _out_dir(args)
    with open(out / "fused.csv", "w", newline="", encoding="utf-8") as fh:
        fh.write("song_id,label,chosen_modality,"
                 + ",".join(f"p_{l}" for l in labels) + "\n")
        for pair, outcome in outcomes:
            if outcome.fused_dist is None:
                probs = [""] * len(labels)
            else:
                probs = [repr(outcome.fused_dist.prob(l)) for l in labels]
            fh.write(",".join([pair.song_id, outcome.label,
                               outcome.chosen_modality] + probs) + "\n")

    if args.strategy == "max":
        audio_fraction, text_fraction = selection_proportions(
            result.pairs, args.tie_break
        )
        _dump_json(
            {
                "audio_fraction": audio_fraction,
                "text_fraction": text_fraction,
                "records": len(result.pairs),
            },
            out / "selection.json",
        )

    golds, preds = [], []
    for pair, outcome in outcomes:
        if pair.gold is not None:
            golds.append(pair.gold)
            preds.append(outcome.label)
    if golds:
        extra = {"strategy": args.strategy, "tie_break": args.tie_break}
        if args.weight is not None:
            extra["audio_weight"] = args.weight
        payload = _metrics_payload(label_space, labels, golds, preds, extra)
        _dump_json(payload, out / "metrics.json")
        (out / "metrics.svg").write_text(
            _metrics_figure(
                payload, f"fusion ({args.strategy}) metrics ({label_space})"
            ),
            encoding="utf-8",
        )
    else:
        print("no gold labels among fused records; metrics skipped",
              file=sys.stderr)
    return 0


def cmd_sweep(args) -> int:
    result = _join_for_fusion(args)
    sweep = sweep_weights(
        result.pairs, grid_step=args.grid_step, score=args.score,
        tie_break=args.tie_break,
    )
    out = _out_dir(args)
    with open(out / "sweep.csv", "w", newline="", encoding="utf-8") as fh:
        fh.write("weight,score\n")
        for w, s in sweep.curve:
            fh.write(f"{repr(w)},{repr(s)}\n")
    _dump_json(
        {
            "best_weight": sweep.best_weight,
            "best_score": sweep.best_score,
            "score": sweep.score,
            "grid_step": args.grid_step,
            "points": len(sweep.curve),
            "label_space": result.report.label_space,
        },
        out / "sweep.json",
    )
    (out / "sweep.svg").write_text(
        figures.curve_svg(
            f"{sweep.score} by audio weight",
            sweep.curve,
            x_label="audio weight",
            y_label=sweep.score,
            marked_x=sweep.best_weight,
        ),
        encoding="utf-8",
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
