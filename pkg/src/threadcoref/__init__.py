"""Entity coreference toolkit for email threads.

Parse maildir-style thread files into sectioned, tokenized messages; filter
corpora by validity rules; resolve coreference with two rule-based header
baselines; score predictions with MUC, B³, CEAFE and LEA; and categorize
prediction errors. See README.md for the CLI and demos/ for worked
examples of each capability.
"""

from .model import (
    AnnotatedDocument,
    CoreferenceChain,
    EmailMessage,
    EmailThread,
    EntityType,
    Mention,
    Section,
    Token,
    ToolkitError,
    mention_text,
    mention_tokens,
    validate_document,
)
from .parsing import ParserConfig, RawThread, UnparseableThread, parse_thread
from .filtering import (
    ExclusionSet,
    FilterCategory,
    FilterConfig,
    FilterVerdict,
    filter_corpus,
    fingerprint_message,
)
from .features import (
    FeatureAnnotation,
    MissingDate,
    message_identifier,
    reverse_document,
    reverse_thread,
    section_info,
)
from .baselines import (
    ParticipantIndex,
    PronounClass,
    Resolution,
    build_participant_index,
    chain_overlapping_mentions,
    resolve_hb1,
    resolve_hb2,
)
from .metrics import (
    CorpusStats,
    CorrectionStats,
    MetricScore,
    ScoreReport,
    b_cubed,
    ceaf_e,
    conll_average,
    correction_stats,
    corpus_stats,
    lea,
    mention_detection_score,
    muc,
    score_documents,
)
from .errors import ChainAlignment, ErrorReport, align_chains, categorize_errors
from .serialization import (
    MalformedColumn,
    NativeSchemaError,
    OverlappingIdenticalSpan,
    read_conll,
    read_conll_documents,
    read_native,
    write_conll,
    write_conll_documents,
    write_native,
    write_native_string,
)

__version__ = "0.1.0"
