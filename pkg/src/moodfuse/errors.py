"""Exception hierarchy shared by every moodfuse module.

All domain failures derive from :class:`MoodfuseError` so callers (and the
CLI) can catch one base class. Programming errors (bad parameter types,
contract misuse) stay plain ``ValueError``/``TypeError``.
"""


class MoodfuseError(Exception):
    """Base class for all pipeline errors."""


class AmbiguousPoint(MoodfuseError):
    """A coordinate sits exactly on a midline, so no quadrant applies."""


class WrongLabelSet(MoodfuseError):
    """A distribution does not carry the label set the operation needs."""


class DistributionInvalid(MoodfuseError):
    """Probabilities are negative, non-finite, or do not sum to one."""


class MixedLabelSets(MoodfuseError):
    """Two distributions that must share a label set do not."""


class ParseError(MoodfuseError):
    """A tabular input file is malformed."""


class DuplicateWord(MoodfuseError):
    """The same word appears twice in a lexicon (after case folding)."""


class DuplicateTerm(MoodfuseError):
    """The same term appears twice in a mapping table."""


class OutOfScaleRating(MoodfuseError):
    """A lexicon rating falls outside the declared scale bounds."""


class NotInLexicon(MoodfuseError):
    """No constituent word of a term is present in the lexicon."""


class EmptyText(MoodfuseError):
    """Chunk planning was asked to split a text with no tokens."""


class LengthMismatch(MoodfuseError):
    """Two parallel sequences differ in length."""


class TieError(MoodfuseError):
    """A tie occurred and the tie-break policy is set to fail."""


class WeightOutOfRange(MoodfuseError):
    """A fusion weight is outside [0, 1]."""


class EmptyDataset(MoodfuseError):
    """An operation that needs at least one record received none."""


class UnknownLabel(MoodfuseError):
    """A gold or predicted label is not in the declared label set."""


class DuplicateSongId(MoodfuseError):
    """The same song_id appears twice in a manifest."""


class SchemaError(MoodfuseError):
    """A predictions file violates the JSON schema.

    Carries the JSON path of the offending element, e.g. ``records[3].probs``.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")
