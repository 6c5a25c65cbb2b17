"""Sentiment frames for attitude extraction.

Frame lexicon model and I/O, frame-entry matching with negation,
entity-pair attitude extraction with corpus aggregation, and expert
agreement over connotation sets.
"""

from .agreement import Agreement, Connotation, agreement_ratios, connotation_set, harmonic_mean
from .attitudes import EntityMention, PairAttitude, Pairing, extract_sentence_attitudes
from .corpus import (
    Direction,
    PairStats,
    PipelineConfig,
    aggregate_attitudes,
    merge_stats,
    rank_pairs,
    run_pipeline,
)
from .frames import (
    EffectAssertion,
    EntryKind,
    FrameEntry,
    PolarityAssertion,
    Role,
    SentimentFrame,
    Sign,
    StateAssertion,
    Violation,
    validate_frame,
)
from .lexicon import Lexicon, lexicon_stats, load_lexicon, read_lexicon, serialize_lexicon
from .matching import EntryIndex, EntryMatch, Token, build_entry_index, find_matches, tokenize

__version__ = "0.1.0"
