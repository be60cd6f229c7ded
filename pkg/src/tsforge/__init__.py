"""Translation Suggestion training-data augmentation toolkit."""
from .corpus import (
    DEFAULT_MASK,
    DEFAULT_SEP,
    Alignment,
    DataError,
    Origin,
    ParallelPair,
    Span,
    Triplet,
    TSExample,
    parse_alignment,
    render_model_input,
    tokenize,
)
from .evaluation import BleuScore, corpus_bleu, evaluate_topk, sentence_bleu
from .filters import DualCEScorer, LengthBounds, LexicalCEModel, NgramLM, language_id_filter, length_filter
from .phrase_align import BACKEND, PhrasePair, brute_force_extract, extract_phrases, trim_phrase
from .pipeline import Candidate, PipelineStats, Thresholds, accept_candidate, build_candidate, run_pipeline
from .sampler import SamplerConfig, apply_mask, make_golden_example, make_pseudo_example, sample_span

__version__ = "0.1.0"
