"""Valence-arousal music sentiment pipeline.

Maps mood vocabularies and annotations onto the circumplex quadrants,
aggregates chunked lyrics classifications, fuses audio and text model
probabilities, and reports per-class precision/recall/F1.
"""

from .circumplex import (
    Axis,
    BINARY_LABELS,
    BinaryLabel,
    ClassDistribution,
    QUADRANT_LABELS,
    Quadrant,
    VAPoint,
    marginalize,
    project_quadrant,
    quadrant_of,
)
from .chunking import (
    ChunkPlan,
    TokenizedText,
    aggregate_chunks,
    plan_chunks,
    whitespace_tokenize,
)
from .fusion import (
    FusionConfig,
    FusionOutcome,
    FusionRecord,
    SweepResult,
    fuse,
    fuse_average,
    fuse_max,
    fuse_weighted,
    selection_proportions,
    sweep_weights,
)
from .ingest import (
    ChunkDetail,
    JoinReport,
    JoinResult,
    PredictionRecord,
    PredictionsFile,
    SongRecord,
    gold_label,
    join_modalities,
    load_manifest,
    load_predictions,
    normalize_categorical_annotations,
    normalize_va_annotations,
    resolve_to_space,
    save_manifest,
    save_predictions,
)
from .lexicon import (
    Lexicon,
    LexiconEntry,
    MappingRule,
    MappingTable,
    build_mapping_table,
    load_lexicon,
    load_mapping_table,
    map_mirex_cluster_terms,
    save_mapping_table,
    term_quadrant,
)
from .metrics import (
    ClassMetrics,
    ConfusionMatrix,
    MetricsReport,
    confusion,
    metrics,
    micro,
)

__version__ = "0.1.0"
