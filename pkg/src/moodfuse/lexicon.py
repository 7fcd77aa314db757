"""Affective word ratings and term-to-quadrant mapping tables.

A lexicon is a table of per-word mean valence/arousal ratings on a declared
scale (default 1-9, neutral midpoint 5). Terms are mapped onto quadrants by
looking their words up and classifying the averaged ratings; manual override
and exclusion rules take precedence over anything the lexicon says.

Mapping tables round-trip through a small CSV format
(``term,decision,provenance``) so they can be produced by the CLI, audited
by hand, and consumed by external inference adapters.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .circumplex import Quadrant, VAPoint, quadrant_of
from .errors import (
    AmbiguousPoint,
    DuplicateTerm,
    DuplicateWord,
    NotInLexicon,
    OutOfScaleRating,
    ParseError,
)

logger = logging.getLogger(__name__)

EXCLUDED = "excluded"
UNMAPPED = "unmapped"
DECISIONS = frozenset({"Q1", "Q2", "Q3", "Q4", EXCLUDED, UNMAPPED})

PROVENANCE_LEXICON = "lexicon-derived"
PROVENANCE_OVERRIDE = "manual-override"
PROVENANCE_EXCLUSION = "manual-exclusion"
PROVENANCES = frozenset(
    {PROVENANCE_LEXICON, PROVENANCE_OVERRIDE, PROVENANCE_EXCLUSION}
)

_WORD_SEPARATORS = str.maketrans({c: " " for c in "-_/"})


def term_words(term: str) -> tuple[str, ...]:
    """Lowercased constituent words of a term.

    Multi-word terms split on whitespace; hyphenated and slash-joined
    terms split on those separators too, so "good-natured" looks up
    "good" and "natured".
    """
    return tuple(term.lower().translate(_WORD_SEPARATORS).split())


@dataclass(frozen=True)
class LexiconEntry:
    word: str
    valence_mean: float
    arousal_mean: float
    valence_sd: float | None = None
    arousal_sd: float | None = None


@dataclass(frozen=True)
class Lexicon:
    """Word-keyed rating table with its scale geometry."""

    entries: Mapping[str, LexiconEntry]
    scale_min: float = 1.0
    scale_max: float = 9.0
    midpoint: float = 5.0

    def __post_init__(self) -> None:
        if not (self.scale_min < self.midpoint < self.scale_max):
            raise ValueError(
                f"midpoint {self.midpoint} must lie strictly between "
                f"scale bounds [{self.scale_min}, {self.scale_max}]"
            )

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.entries


def load_lexicon(
    path: str | Path,
    *,
    word_col: str = "word",
    valence_col: str = "valence_mean",
    arousal_col: str = "arousal_mean",
    valence_sd_col: str | None = None,
    arousal_sd_col: str | None = None,
    delimiter: str | None = None,
    scale_min: float = 1.0,
    scale_max: float = 9.0,
    midpoint: float | None = None,
) -> Lexicon:
    """Ingest a delimiter-separated ratings file.

    The header row is required and column names are configurable because
    redistributions of affective-norm lexicons disagree on layout. Words are
    case-folded; a collision after folding is a :class:`DuplicateWord` error,
    and ratings outside ``[scale_min, scale_max]`` raise
    :class:`OutOfScaleRating`. ``midpoint`` defaults to the scale center.
    """
    path = Path(path)
    if midpoint is None:
        midpoint = (scale_min + scale_max) / 2.0
    with open(path, newline="", encoding="utf-8") as fh:
        first = fh.readline()
        if not first.strip():
            raise ParseError(f"{path}: empty file, expected a header row")
        if delimiter is None:
            delimiter = _sniff_delimiter(first)
        fh.seek(0)
        reader = csv.DictReader(fh, delimiter=delimiter)
        header = reader.fieldnames or []
        needed = [word_col, valence_col, arousal_col]
        needed += [c for c in (valence_sd_col, arousal_sd_col) if c]
        for col in needed:
            if col not in header:
                raise ParseError(f"{path}: missing column {col!r} in header {header}")

        entries: dict[str, LexiconEntry] = {}
        for lineno, row in enumerate(reader, start=2):
            word = (row.get(word_col) or "").strip().lower()
            if not word:
                raise ParseError(f"{path}:{lineno}: empty word")
            if word in entries:
                raise DuplicateWord(f"{path}:{lineno}: duplicate word {word!r}")
            v = _parse_rating(row.get(valence_col), path, lineno, valence_col)
            a = _parse_rating(row.get(arousal_col), path, lineno, arousal_col)
            for value, col in ((v, valence_col), (a, arousal_col)):
                if not (scale_min <= value <= scale_max):
                    raise OutOfScaleRating(
                        f"{path}:{lineno}: {col}={value} outside "
                        f"[{scale_min}, {scale_max}]"
                    )
            v_sd = (
                _parse_rating(row.get(valence_sd_col), path, lineno, valence_sd_col)
                if valence_sd_col
                else None
            )
            a_sd = (
                _parse_rating(row.get(arousal_sd_col), path, lineno, arousal_sd_col)
                if arousal_sd_col
                else None
            )
            entries[word] = LexiconEntry(word, v, a, v_sd, a_sd)
    return Lexicon(entries, scale_min, scale_max, midpoint)


def _sniff_delimiter(header_line: str) -> str:
    for candidate in ("\t", ";", ","):
        if candidate in header_line:
            return candidate
    return ","


def _parse_rating(raw: str | None, path: Path, lineno: int, col: str) -> float:
    if raw is None or not raw.strip():
        raise ParseError(f"{path}:{lineno}: missing value for {col!r}")
    try:
        value = float(raw)
    except ValueError:
        raise ParseError(
            f"{path}:{lineno}: non-numeric {col!r} value {raw!r}"
        ) from None
    if not math.isfinite(value):
        raise ParseError(f"{path}:{lineno}: non-finite {col!r} value {raw!r}")
    return value


def term_point(lex: Lexicon, term: str) -> VAPoint:
    """Mean (valence, arousal) of the term's in-lexicon words.

    Words missing from the lexicon are skipped; if none are found the term
    raises :class:`NotInLexicon`.
    """
    found = [lex.entries[w] for w in term_words(term) if w in lex.entries]
    if not found:
        raise NotInLexicon(f"no word of {term!r} is in the lexicon")
    v = math.fsum(e.valence_mean for e in found) / len(found)
    a = math.fsum(e.arousal_mean for e in found) / len(found)
    return VAPoint(v, a)


def term_quadrant(lex: Lexicon, term: str) -> Quadrant:
    """Quadrant of a term per the lexicon ratings and the lexicon midpoint."""
    return quadrant_of(term_point(lex, term), lex.midpoint)


@dataclass(frozen=True)
class MappingRule:
    """One term's decision with its provenance and an optional diagnostic."""

    term: str
    decision: str
    provenance: str
    note: str = ""

    def __post_init__(self) -> None:
        if self.decision not in DECISIONS:
            raise ValueError(f"unknown decision {self.decision!r}")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")


@dataclass(frozen=True)
class MappingTable:
    """Ordered, duplicate-free collection of mapping rules."""

    rules: tuple[MappingRule, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        seen = set()
        for rule in self.rules:
            if rule.term in seen:
                raise DuplicateTerm(f"term {rule.term!r} appears twice")
            seen.add(rule.term)

    def __len__(self) -> int:
        return len(self.rules)

    def as_dict(self) -> dict[str, MappingRule]:
        return {rule.term: rule for rule in self.rules}

    def decision_for(self, term: str) -> str | None:
        """Decision token for a term, or None if the table has no rule."""
        normalized = term.strip().lower()
        for rule in self.rules:
            if rule.term == normalized:
                return rule.decision
        return None


def build_mapping_table(
    vocabulary: Iterable[str],
    lex: Lexicon,
    overrides: MappingTable | None = None,
) -> MappingTable:
    """Map a term vocabulary onto quadrants.

    Override and exclusion rules win unconditionally; remaining terms get
    their lexicon-derived quadrant. Terms the lexicon cannot place are
    recorded as ``unmapped`` with a diagnostic note rather than dropped, so
    a pipeline can run on a partially covered vocabulary. Output is sorted
    by term and independent of vocabulary input order.
    """
    vocab = sorted({t.strip().lower() for t in vocabulary if t.strip()})
    vocab_set = set(vocab)
    override_rules: dict[str, MappingRule] = {}
    if overrides is not None:
        for rule in overrides.rules:
            term = rule.term.strip().lower()
            if term not in vocab_set:
                logger.warning("override term %r is not in the vocabulary", term)
            override_rules[term] = rule

    rules = []
    for term in vocab:
        manual = override_rules.get(term)
        if manual is not None:
            rules.append(
                MappingRule(term, manual.decision, manual.provenance, manual.note)
            )
            continue
        rules.append(_lexicon_rule(term, lex))
    return MappingTable(tuple(rules))


def _lexicon_rule(term: str, lex: Lexicon) -> MappingRule:
    try:
        q = term_quadrant(lex, term)
    except NotInLexicon:
        return MappingRule(term, UNMAPPED, PROVENANCE_LEXICON, "not in lexicon")
    except AmbiguousPoint:
        return MappingRule(term, UNMAPPED, PROVENANCE_LEXICON, "midpoint tie")
    return MappingRule(term, q.value, PROVENANCE_LEXICON)


def map_mirex_cluster_terms(
    clusters: Mapping[str, Sequence[str]],
    lex: Lexicon,
    *,
    per_cluster: bool = False,
) -> MappingTable:
    """Map mood-cluster adjective lists onto quadrants.

    Compound entries like "tense/anxious" split on "/" into separate terms
    (hyphenated terms stay whole and tokenize at lookup). By default every
    adjective is mapped independently; with ``per_cluster`` each cluster is
    placed once, at the mean rating of its resolvable adjectives, and that
    quadrant is assigned to all of the cluster's terms.
    """
    rules: list[MappingRule] = []
    seen: set[str] = set()
    for cluster_id in sorted(clusters, key=str):
        terms: list[str] = []
        for entry in clusters[cluster_id]:
            for part in entry.split("/"):
                term = part.strip().lower()
                if term and term not in seen:
                    seen.add(term)
                    terms.append(term)
        if per_cluster:
            rules.extend(_cluster_rules(str(cluster_id), terms, lex))
        else:
            rules.extend(_lexicon_rule(term, lex) for term in sorted(terms))
    return MappingTable(tuple(rules))


def _cluster_rules(
    cluster_id: str, terms: list[str], lex: Lexicon
) -> list[MappingRule]:
    points = []
    for term in terms:
        try:
            points.append(term_point(lex, term))
        except NotInLexicon:
            pass
    note = f"cluster {cluster_id} mean"
    if not points:
        return [
            MappingRule(t, UNMAPPED, PROVENANCE_LEXICON, f"{note}: not in lexicon")
            for t in sorted(terms)
        ]
    center = VAPoint(
        math.fsum(p.valence for p in points) / len(points),
        math.fsum(p.arousal for p in points) / len(points),
    )
    try:
        decision = quadrant_of(center, lex.midpoint).value
    except AmbiguousPoint:
        return [
            MappingRule(t, UNMAPPED, PROVENANCE_LEXICON, f"{note}: midpoint tie")
            for t in sorted(terms)
        ]
    return [
        MappingRule(t, decision, PROVENANCE_LEXICON, note) for t in sorted(terms)
    ]


def load_mapping_table(path: str | Path) -> MappingTable:
    """Read a ``term,decision,provenance`` CSV."""
    path = Path(path)
    rules = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for col in ("term", "decision", "provenance"):
            if col not in (reader.fieldnames or []):
                raise ParseError(f"{path}: missing column {col!r}")
        for lineno, row in enumerate(reader, start=2):
            term = (row.get("term") or "").strip().lower()
            decision = (row.get("decision") or "").strip()
            provenance = (row.get("provenance") or "").strip()
            if not term:
                raise ParseError(f"{path}:{lineno}: empty term")
            if decision not in DECISIONS:
                raise ParseError(f"{path}:{lineno}: unknown decision {decision!r}")
            if provenance not in PROVENANCES:
                raise ParseError(
                    f"{path}:{lineno}: unknown provenance {provenance!r}"
                )
            rules.append(MappingRule(term, decision, provenance))
    return MappingTable(tuple(rules))


def save_mapping_table(table: MappingTable, path: str | Path) -> None:
    """Write the ``term,decision,provenance`` CSV (rules in table order)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["term", "decision", "provenance"])
        for rule in table.rules:
            writer.writerow([rule.term, rule.decision, rule.provenance])


def load_vocabulary(path: str | Path) -> list[str]:
    """One term per line; blank lines and '#' comments are ignored."""
    terms = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                terms.append(line)
    return terms


def _builtin_text(name: str) -> str:
    return (resources.files("moodfuse.data") / name).read_text(encoding="utf-8")


def builtin_tag_overrides() -> MappingTable:
    """The shipped MediaEval tag override/exclusion table."""
    rules = []
    reader = csv.DictReader(_builtin_text("mediaeval_overrides.csv").splitlines())
    for row in reader:
        rules.append(MappingRule(row["term"], row["decision"], row["provenance"]))
    return MappingTable(tuple(rules))


def builtin_mediaeval_tags() -> list[str]:
    """The 56-tag MTG-Jamendo mood/theme vocabulary."""
    return [
        line.strip()
        for line in _builtin_text("mediaeval_mood_theme_tags.txt").splitlines()
        if line.strip() and not line.startswith("#")
    ]


def builtin_mirex_clusters() -> dict[str, list[str]]:
    """The five mood-cluster adjective lists, keyed by cluster number."""
    clusters: dict[str, list[str]] = {}
    reader = csv.DictReader(_builtin_text("mirex_clusters.csv").splitlines())
    for row in reader:
        clusters.setdefault(row["cluster"], []).append(row["term"])
    return clusters
