"""End-to-end CLI behavior on the shipped fixtures."""

import csv
import json
from pathlib import Path

import pytest

from moodfuse.cli import main

from oracles import oracle_prf

FIXTURES = Path(__file__).parent / "fixtures"
LEXICON = str(FIXTURES / "lexicon_small.csv")


def run(*argv):
    return main([str(a) for a in argv])


def read_mapping(path):
    with open(path, newline="") as fh:
        return {row["term"]: row["decision"] for row in csv.DictReader(fh)}


class TestMapTags:
    def test_mediaeval_with_builtin_overrides(self, tmp_path):
        assert run(
            "map-tags", "--lexicon", LEXICON, "--mediaeval",
            "--builtin-overrides", "--out", tmp_path,
        ) == 0
        decisions = read_mapping(tmp_path / "mapping.csv")
        assert decisions["epic"] == "Q2"
        assert decisions["heavy"] == "Q2"
        assert decisions["meditative"] == "Q4"
        assert decisions["love"] == "excluded"
        assert decisions["sexy"] == "excluded"
        assert len(decisions) == 56

    def test_empty_vocabulary_succeeds(self, tmp_path, capsys):
        vocab = tmp_path / "empty.txt"
        vocab.write_text("")
        assert run(
            "map-tags", "--lexicon", LEXICON, "--vocabulary", vocab,
            "--out", tmp_path,
        ) == 0
        assert (tmp_path / "mapping.csv").read_text() == "term,decision,provenance\n"

    def test_missing_lexicon_names_path(self, tmp_path, capsys):
        missing = tmp_path / "nope.csv"
        assert run(
            "map-tags", "--lexicon", missing, "--mediaeval", "--out", tmp_path
        ) == 1
        assert str(missing) in capsys.readouterr().err

    def test_mirex_matches_golden(self, tmp_path):
        assert run(
            "map-tags", "--lexicon", LEXICON, "--mirex", "--out", tmp_path
        ) == 0
        golden = (FIXTURES / "golden_mirex_mapping.csv").read_bytes()
        assert (tmp_path / "mapping.csv").read_bytes() == golden

    def test_mirex_per_cluster_with_overrides(self, tmp_path):
        overrides = tmp_path / "ovr.csv"
        overrides.write_text(
            "term,decision,provenance\nwry,Q3,manual-override\n"
        )
        assert run(
            "map-tags", "--lexicon", LEXICON, "--mirex", "--per-cluster",
            "--overrides", overrides, "--out", tmp_path,
        ) == 0
        decisions = read_mapping(tmp_path / "mapping.csv")
        assert decisions["wry"] == "Q3"
        # the rest of cluster 4 keeps the per-cluster placement
        assert decisions["witty"] == decisions["silly"]

    def test_unmapped_diagnostic_on_stderr(self, tmp_path, capsys):
        vocab = tmp_path / "vocab.txt"
        vocab.write_text("happy\nzorble\n")
        assert run(
            "map-tags", "--lexicon", LEXICON, "--vocabulary", vocab,
            "--out", tmp_path,
        ) == 0
        assert "zorble" in capsys.readouterr().err


class TestNormalize:
    def test_va_midpoint(self, tmp_path):
        assert run(
            "normalize", "--manifest", FIXTURES / "manifest_eval.csv",
            "--midpoint", 5, "--out", tmp_path,
        ) == 0
        with open(tmp_path / "normalized.csv", newline="") as fh:
            rows = {row["song_id"]: row for row in csv.DictReader(fh)}
        assert rows["g1"]["quadrant"] == "Q1"
        assert rows["g5"]["quadrant"] == "Q3"
        assert rows["g8"]["quadrant"] == "Q4"

    def test_requires_a_rule_source(self, tmp_path, capsys):
        assert run(
            "normalize", "--manifest", FIXTURES / "manifest_eval.csv",
            "--out", tmp_path,
        ) == 1
        assert "midpoint" in capsys.readouterr().err

    def test_mapping_and_flags(self, tmp_path, capsys):
        manifest = tmp_path / "m.csv"
        manifest.write_text(
            "song_id,mood_terms\na,happy\nb,love\nc,zorble\n"
        )
        mapping = tmp_path / "map.csv"
        mapping.write_text(
            "term,decision,provenance\n"
            "happy,Q1,lexicon-derived\n"
            "love,excluded,manual-exclusion\n"
        )
        assert run(
            "normalize", "--manifest", manifest, "--mapping", mapping,
            "--out", tmp_path,
        ) == 0
        with open(tmp_path / "normalized.csv", newline="") as fh:
            rows = {row["song_id"]: row for row in csv.DictReader(fh)}
        assert rows["a"]["quadrant"] == "Q1"
        assert rows["b"]["quadrant"] == ""
        assert rows["b"]["flags"] == "terms-excluded"
        assert rows["c"]["flags"] == "terms-unmapped"


class TestEvaluate:
    def test_quadrant_metrics_match_oracle(self, tmp_path):
        assert run(
            "evaluate", "--manifest", FIXTURES / "manifest_eval.csv",
            "--audio-preds", FIXTURES / "preds_eval_audio.json",
            "--midpoint", 5, "--out", tmp_path,
        ) == 0
        payload = json.loads((tmp_path / "metrics.json").read_text())
        assert payload["records_evaluated"] == 8
        # recompute from the known gold/pred pairs
        golds = ["Q1", "Q1", "Q2", "Q2", "Q3", "Q3", "Q4", "Q4"]
        preds = ["Q1", "Q2", "Q2", "Q2", "Q3", "Q1", "Q4", "Q4"]
        for label in ("Q1", "Q2", "Q3", "Q4"):
            p, r, f = oracle_prf(golds, preds, label)
            got = payload["per_class"][label]
            assert got["precision"] == pytest.approx(p, abs=1e-12)
            assert got["recall"] == pytest.approx(r, abs=1e-12)
            assert got["f1"] == pytest.approx(f, abs=1e-12)
        assert (tmp_path / "metrics.svg").read_text().startswith("<svg")

    def test_valence_space_marginalizes(self, tmp_path):
        assert run(
            "evaluate", "--manifest", FIXTURES / "manifest_eval.csv",
            "--audio-preds", FIXTURES / "preds_eval_audio.json",
            "--label-space", "valence", "--midpoint", 5, "--out", tmp_path,
        ) == 0
        payload = json.loads((tmp_path / "metrics.json").read_text())
        golds = ["positive", "positive", "negative", "negative",
                 "negative", "negative", "positive", "positive"]
        preds = ["positive", "negative", "negative", "negative",
                 "negative", "positive", "positive", "positive"]
        for label in ("positive", "negative"):
            p, r, f = oracle_prf(golds, preds, label)
            assert payload["per_class"][label]["f1"] == pytest.approx(f, abs=1e-12)

    def test_perfect_predictions_hit_one(self, tmp_path):
        manifest = tmp_path / "m.csv"
        manifest.write_text("song_id,quadrant\na,Q1\nb,Q2\nc,Q3\nd,Q4\n")
        preds = {
            "schema_version": "1",
            "records": [
                {
                    "song_id": s,
                    "modality": "audio",
                    "model_id": "m",
                    "labels": ["Q1", "Q2", "Q3", "Q4"],
                    "probs": [
                        0.7 if q == i else 0.1
                        for i in range(4)
                    ],
                }
                for q, s in enumerate(["a", "b", "c", "d"])
            ],
        }
        pp = tmp_path / "p.json"
        pp.write_text(json.dumps(preds))
        out = tmp_path / "out"
        assert run(
            "evaluate", "--manifest", manifest, "--audio-preds", pp,
            "--out", out,
        ) == 0
        payload = json.loads((out / "metrics.json").read_text())
        assert payload["macro"] == {"precision": 1.0, "recall": 1.0, "f1": 1.0}

    def test_no_evaluable_records_fails(self, tmp_path, capsys):
        manifest = tmp_path / "m.csv"
        manifest.write_text("song_id\na\n")
        assert run(
            "evaluate", "--manifest", manifest,
            "--audio-preds", FIXTURES / "preds_eval_audio.json",
            "--out", tmp_path,
        ) == 1
        assert "no evaluable records" in capsys.readouterr().err


class TestFuse:
    def common(self, *extra, out):
        return run(
            "fuse", "--manifest", FIXTURES / "manifest_sweep.csv",
            "--audio-preds", FIXTURES / "preds_sweep_audio.json",
            "--text-preds", FIXTURES / "preds_sweep_text.json",
            "--label-space", "valence", "--midpoint", 5,
            "--out", out, *extra,
        )

    def test_weight_one_matches_audio_only_evaluate(self, tmp_path):
        fuse_out = tmp_path / "fuse"
        eval_out = tmp_path / "eval"
        assert self.common(
            "--strategy", "weighted", "--weight", 1.0, out=fuse_out
        ) == 0
        assert run(
            "evaluate", "--manifest", FIXTURES / "manifest_sweep.csv",
            "--audio-preds", FIXTURES / "preds_sweep_audio.json",
            "--label-space", "valence", "--midpoint", 5, "--out", eval_out,
        ) == 0
        fused = json.loads((fuse_out / "metrics.json").read_text())
        solo = json.loads((eval_out / "metrics.json").read_text())
        for key in ("per_class", "macro", "confusion", "support"):
            assert fused[key] == solo[key]

    def test_average_equals_half_weight(self, tmp_path):
        avg_out = tmp_path / "avg"
        half_out = tmp_path / "half"
        assert self.common("--strategy", "average", out=avg_out) == 0
        assert self.common(
            "--strategy", "weighted", "--weight", 0.5, out=half_out
        ) == 0
        assert (avg_out / "fused.csv").read_bytes() == (
            half_out / "fused.csv"
        ).read_bytes()

    def test_selection_proportions_file(self, tmp_path):
        assert run(
            "fuse", "--manifest", FIXTURES / "manifest_selection.csv",
            "--audio-preds", FIXTURES / "preds_selection_audio.json",
            "--text-preds", FIXTURES / "preds_selection_text.json",
            "--strategy", "max", "--out", tmp_path,
        ) == 0
        selection = json.loads((tmp_path / "selection.json").read_text())
        assert selection == {
            "audio_fraction": 0.19, "text_fraction": 0.81, "records": 100
        }
        # no gold in this manifest, so fusion labels but no metrics
        assert (tmp_path / "fused.csv").exists()
        assert not (tmp_path / "metrics.json").exists()

    def test_weight_flag_contract(self, tmp_path, capsys):
        assert self.common("--strategy", "average", "--weight", 0.5,
                           out=tmp_path) == 1
        assert "--weight" in capsys.readouterr().err


class TestSweep:
    def test_fixture_optimum(self, tmp_path):
        assert run(
            "sweep", "--manifest", FIXTURES / "manifest_sweep.csv",
            "--audio-preds", FIXTURES / "preds_sweep_audio.json",
            "--text-preds", FIXTURES / "preds_sweep_text.json",
            "--label-space", "valence", "--midpoint", 5, "--out", tmp_path,
        ) == 0
        summary = json.loads((tmp_path / "sweep.json").read_text())
        assert summary["best_weight"] == 0.6
        assert summary["points"] == 21
        with open(tmp_path / "sweep.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 21
        assert (tmp_path / "sweep.svg").read_text().startswith("<svg")

    def test_coarse_grid(self, tmp_path):
        assert run(
            "sweep", "--manifest", FIXTURES / "manifest_sweep.csv",
            "--audio-preds", FIXTURES / "preds_sweep_audio.json",
            "--text-preds", FIXTURES / "preds_sweep_text.json",
            "--label-space", "valence", "--midpoint", 5,
            "--grid-step", 0.5, "--out", tmp_path,
        ) == 0
        summary = json.loads((tmp_path / "sweep.json").read_text())
        assert summary["points"] == 3

    def test_endpoint_optimum(self, tmp_path):
        manifest = tmp_path / "m.csv"
        manifest.write_text("song_id,valence,arousal\nx,7,6\ny,3,6\n")
        # text matches gold, audio inverted
        records = {
            "x": ((0.9, 0.1), (0.1, 0.9)),
            "y": ((0.2, 0.8), (0.8, 0.2)),
        }
        for modality, idx in (("audio", 0), ("text", 1)):
            payload = {
                "schema_version": "1",
                "records": [
                    {
                        "song_id": sid,
                        "modality": modality,
                        "model_id": "m",
                        "labels": ["negative", "positive"],
                        "probs": list(pair[idx]),
                    }
                    for sid, pair in records.items()
                ],
            }
            (tmp_path / f"{modality}.json").write_text(json.dumps(payload))
        out = tmp_path / "out"
        assert run(
            "sweep", "--manifest", manifest,
            "--audio-preds", tmp_path / "audio.json",
            "--text-preds", tmp_path / "text.json",
            "--label-space", "valence", "--midpoint", 5, "--out", out,
        ) == 0
        summary = json.loads((out / "sweep.json").read_text())
        assert summary["best_weight"] == 0.0
        assert summary["best_score"] == 1.0
