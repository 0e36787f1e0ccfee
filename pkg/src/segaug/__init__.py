"""Parallel corpus augmentation by long-sentence segmentation and back-translation."""

from .aligner import (
    Direction,
    Heuristic,
    TranslationTable,
    WordAlignment,
    align_corpus,
    format_pharaoh,
    parse_pharaoh,
    symmetrize,
    train_and_align,
    train_model1,
    viterbi_align,
)
from .augment import AugmentationMode, AugmentConfig, Augmenter, PseudoPair, make_pseudo, run_mode
from .backtranslate import Backtranslator, TranslationBatchResult, TranslatorKind, TranslatorSpec, backtranslate
from .corpus import (
    AugmentationReport,
    Corpus,
    ParallelPair,
    Provenance,
    Sentence,
    Token,
    corpus_stats,
    read_parallel,
    read_tsv,
    write_parallel,
)
from .kernels import BACKEND as KERNEL_BACKEND
from .pipeline import PipelineConfig, run_pipeline
from .segmenter import (
    PartialPair,
    Segment,
    SegmentAlignmentMatrix,
    SegmentedSentence,
    combine_one_to_one,
    extract_partials,
    infer_directional,
    is_long,
    segment_alignment_matrix,
    split_segments,
)
from .tokenizer import DelimiterSet, mark_delimiters, tokenize_chars, tokenize_whitespace

__version__ = "0.1.0"
