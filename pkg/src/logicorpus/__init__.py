"""Corpus construction for logically-dense masked pre-training data.

The package turns raw text into line-delimited masked records in four stages:
tokenize (:mod:`logicorpus.tokenizer`), match indicator phrases against a
category lexicon (:mod:`logicorpus.lexicon`, :mod:`logicorpus.matcher`),
filter paragraphs (:mod:`logicorpus.ingest`), and apply the three masking
channels (:mod:`logicorpus.masker`). :mod:`logicorpus.pipeline` runs the whole
flow in parallel, and :mod:`logicorpus.stats`, :mod:`logicorpus.ablate`, and
:mod:`logicorpus.loss` inspect, rewrite, and score the results.
"""

from .ablate import AblationResult, AblationSpec, ablate_text, parse_categories
from .errors import LogicorpusError
from .ingest import (
    FilterPolicy,
    TokenizedParagraph,
    drop_reason,
    filter_paragraphs,
    iter_paragraphs,
    paragraph_id,
    read_documents,
    split_paragraphs,
)
from .lexicon import (
    DEFAULT_EXCLUSIONS,
    IndicatorCategory,
    IndicatorLexicon,
    builtin_lexicon,
    load_lexicon,
)
from .loss import LcpBatch, LossConfig, cross_entropy, idol_loss, lcp_loss
from .masker import (
    LGMASK,
    MASK,
    MaskedSample,
    MaskPolicy,
    emit_samples,
    format_record,
    mask_paragraph,
    parse_record,
    read_records,
)
from .matcher import CompiledMatcher, IndicatorMatch, find_indicators
from .pipeline import BuildSummary, PipelineConfig, run_build
from .stats import CorpusReport, StatsAccumulator
from .tokenizer import fold_text, tokenize, tokenize_codepoints

__version__ = "0.1.0"

__all__ = [
    "AblationResult",
    "AblationSpec",
    "BuildSummary",
    "CompiledMatcher",
    "CorpusReport",
    "DEFAULT_EXCLUSIONS",
    "FilterPolicy",
    "IndicatorCategory",
    "IndicatorLexicon",
    "IndicatorMatch",
    "LGMASK",
    "LcpBatch",
    "LogicorpusError",
    "LossConfig",
    "MASK",
    "MaskPolicy",
    "MaskedSample",
    "PipelineConfig",
    "StatsAccumulator",
    "TokenizedParagraph",
    "ablate_text",
    "builtin_lexicon",
    "cross_entropy",
    "drop_reason",
    "emit_samples",
    "filter_paragraphs",
    "find_indicators",
    "fold_text",
    "format_record",
    "idol_loss",
    "iter_paragraphs",
    "lcp_loss",
    "load_lexicon",
    "mask_paragraph",
    "parse_record",
    "paragraph_id",
    "read_records",
    "run_build",
    "split_paragraphs",
    "tokenize",
    "tokenize_codepoints",
    "__version__",
]
