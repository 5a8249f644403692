"""Desk-scale time-aware encoder pre-training pipeline.

Annotate a news-style corpus with temporal expressions, temporal signals,
and person entities; build time-aware masking / document-dating / entity-
replacement training examples; train a small transformer encoder jointly on
those objectives; and evaluate it on time prediction, semantic change, and
similarity-ranking tasks.
"""

__version__ = "0.1.0"

from .annotate import (  # noqa: F401
    AnnotatedDocument,
    Span,
    SpanKind,
    Token,
    annotate_document,
    tag_temporal_expressions,
    tag_temporal_signals,
    tokenize_raw,
)
from .corpus import (  # noqa: F401
    EntityCalendar,
    build_entity_calendar,
    derive_corpus_span,
    refine_corpus,
    refine_document,
    split_dataset,
)
from .lexicon import Relation, SignalLexicon  # noqa: F401
from .objectives import (  # noqa: F401
    EntityDecision,
    MaskAction,
    MaskDecision,
    MaskSource,
    Objective,
    SamplingRates,
    TrainingExample,
    build_training_example,
)
from .timescale import (  # noqa: F401
    CorpusSpan,
    Granularity,
    TimeLabel,
    TimePoint,
    label_to_timepoint,
    timestamp_to_label,
)
from .vocab import Vocabulary, build_vocab  # noqa: F401
