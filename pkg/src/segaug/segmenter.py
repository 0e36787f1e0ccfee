"""Split long sentence pairs into aligned partial sentence pairs.

Both sides are cut into punctuation-delimited segments. For every source
segment and target segment we count how many of the segment's aligned
tokens link into the other segment; a correspondence is inferred when
that rate reaches ``theta``. Correspondences found in either direction
are merged into connected components, and every component that covers
contiguous segments on both sides becomes one partial pair.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .aligner import WordAlignment
from .corpus import ParallelPair, Sentence
from .errors import ConfigError

DEFAULT_THETA = 0.5


class Side(enum.Enum):
    SOURCE = "source"
    TARGET = "target"


class RateDenominator(enum.Enum):
    ALIGNED = "aligned"
    ALL = "all"


@dataclass(frozen=True)
class Segment:
    start: int
    end: int
    side: Side = Side.SOURCE

    def __post_init__(self):
        if not self.start < self.end:
            raise ValueError(f"empty segment [{self.start}, {self.end})")

    def __len__(self):
        return self.end - self.start

    def indices(self):
        return range(self.start, self.end)


@dataclass(frozen=True)
class SegmentedSentence:
    sentence: Sentence
    segments: tuple

    @property
    def spans(self):
        return [(s.start, s.end) for s in self.segments]

    def tokens(self, first: int, last: int) -> tuple:
        """Tokens of segments ``first..last`` inclusive."""
        return self.sentence.tokens[self.segments[first].start:self.segments[last].end]


def split_segments(sentence: Sentence, side: Side = Side.SOURCE) -> SegmentedSentence:
    """Cut after every delimiter token.

    A delimiter stays with the segment it ends. A piece made only of
    delimiters (consecutive or leading punctuation) is merged into its
    neighbour, the preceding one if there is one.
    """
    pieces, start = [], 0
    toks = sentence.tokens
    for i, tok in enumerate(toks):
        if tok.is_delimiter:
            pieces.append([start, i + 1])
            start = i + 1
    if start < len(toks):
        pieces.append([start, len(toks)])

    merged = []
    for lo, hi in pieces:
        content = any(not t.is_delimiter for t in toks[lo:hi])
        if merged and (not content or not merged[-1][2]):
            merged[-1][1] = hi
            merged[-1][2] = merged[-1][2] or content
        else:
            merged.append([lo, hi, content])
    return SegmentedSentence(sentence, tuple(Segment(lo, hi, side) for lo, hi, _ in merged))


def is_long(sentence: Sentence, min_segments: int = 2) -> bool:
    return len(split_segments(sentence).segments) >= min_segments


@dataclass(frozen=True)
class SegmentAlignmentMatrix:
    """Link counts and rates between source and target segments.

    ``link_counts[i, j]`` counts tokens of source segment i with a link
    into target segment j; ``reverse_counts[i, j]`` counts tokens of target
    segment j with a link into source segment i. Each is divided by the
    denominator of its own segment to give ``rates`` / ``reverse_rates``.
    """

    link_counts: np.ndarray
    reverse_counts: np.ndarray
    source_denominators: np.ndarray
    target_denominators: np.ndarray
    theta: float = DEFAULT_THETA

    @staticmethod
    def _divide(counts, denom):
        out = np.zeros(counts.shape, dtype=np.float64)
        np.divide(counts, denom, out=out, where=denom > 0)
        return out

    @property
    def rates(self) -> np.ndarray:
        return self._divide(self.link_counts, self.source_denominators[:, None])

    @property
    def reverse_rates(self) -> np.ndarray:
        return self._divide(self.reverse_counts, self.target_denominators[None, :])

    def rate(self, i, j) -> Fraction:
        d = int(self.source_denominators[i])
        return Fraction(int(self.link_counts[i, j]), d) if d else Fraction(0)

    def reverse_rate(self, i, j) -> Fraction:
        d = int(self.target_denominators[j])
        return Fraction(int(self.reverse_counts[i, j]), d) if d else Fraction(0)


def segment_alignment_matrix(src: SegmentedSentence, tgt: SegmentedSentence, wa: WordAlignment,
                             theta: float = DEFAULT_THETA,
                             denominator: RateDenominator = RateDenominator.ALIGNED
                             ) -> SegmentAlignmentMatrix:
    if not 0.0 <= theta <= 1.0:
        raise ConfigError(f"theta must lie in [0, 1], got {theta}")
    n_src, n_tgt = len(src.sentence), len(tgt.sentence)
    wa.check_bounds(n_src, n_tgt)
    src_seg = np.empty(n_src, dtype=np.int64)
    for k, seg in enumerate(src.segments):
        src_seg[seg.start:seg.end] = k
    tgt_seg = np.empty(n_tgt, dtype=np.int64)
    for k, seg in enumerate(tgt.segments):
        tgt_seg[seg.start:seg.end] = k

    # distinct (token, opposite segment) pairs, so a token counts once per segment
    src_hits = {(s, int(tgt_seg[t])) for s, t in wa.links}
    tgt_hits = {(t, int(src_seg[s])) for s, t in wa.links}
    shape = (len(src.segments), len(tgt.segments))
    counts = np.zeros(shape, dtype=np.int64)
    rev = np.zeros(shape, dtype=np.int64)
    for s, j in src_hits:
        counts[src_seg[s], j] += 1
    for t, i in tgt_hits:
        rev[i, tgt_seg[t]] += 1

    if denominator is RateDenominator.ALL:
        src_den = np.array([len(seg) for seg in src.segments], dtype=np.int64)
        tgt_den = np.array([len(seg) for seg in tgt.segments], dtype=np.int64)
    else:
        src_den = np.bincount(src_seg[sorted({s for s, _ in wa.links})], minlength=shape[0])
        tgt_den = np.bincount(tgt_seg[sorted({t for _, t in wa.links})], minlength=shape[1])
    return SegmentAlignmentMatrix(counts, rev, src_den.astype(np.int64),
                                  tgt_den.astype(np.int64), theta)


class InferDirection(enum.Enum):
    SRC_TO_TGT = "src-to-tgt"
    TGT_TO_SRC = "tgt-to-src"


def infer_directional(m: SegmentAlignmentMatrix, direction: InferDirection) -> set:
    theta = Fraction(m.theta)
    out = set()
    n_src, n_tgt = m.link_counts.shape
    for i in range(n_src):
        for j in range(n_tgt):
            if direction is InferDirection.SRC_TO_TGT:
                ok = m.link_counts[i, j] >= 1 and m.rate(i, j) >= theta
            else:
                ok = m.reverse_counts[i, j] >= 1 and m.reverse_rate(i, j) >= theta
            if ok:
                out.add((i, j))
    return out


@dataclass(frozen=True)
class PartialPair:
    source_group: range
    target_group: range
    source_tokens: tuple
    target_tokens: tuple
    source_span: tuple
    target_span: tuple

    def __post_init__(self):
        if not self.source_group or not self.target_group:
            raise ValueError("partial pair groups must be non-empty")


def _components(edges):
    parent = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in edges:
        a, b = ("s", i), ("t", j)
        parent.setdefault(a, a)
        parent.setdefault(b, b)
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups = {}
    for node in parent:
        groups.setdefault(find(node), []).append(node)
    return list(groups.values())


def _contiguous(idx):
    return bool(idx) and max(idx) - min(idx) + 1 == len(idx)


def combine_one_to_one(fwd, rev, src: SegmentedSentence, tgt: SegmentedSentence) -> list[PartialPair]:
    out = []
    for comp in _components(set(fwd) | set(rev)):
        s_idx = sorted({k for side, k in comp if side == "s"})
        t_idx = sorted({k for side, k in comp if side == "t"})
        if not (_contiguous(s_idx) and _contiguous(t_idx)):
            continue
        s0, s1, t0, t1 = s_idx[0], s_idx[-1], t_idx[0], t_idx[-1]
        out.append(PartialPair(
            range(s0, s1 + 1), range(t0, t1 + 1),
            src.tokens(s0, s1), tgt.tokens(t0, t1),
            (src.segments[s0].start, src.segments[s1].end),
            (tgt.segments[t0].start, tgt.segments[t1].end),
        ))
    out.sort(key=lambda p: p.source_group.start)
    return out


def extract_partials(pair: ParallelPair, wa: WordAlignment, theta: float = DEFAULT_THETA,
                     min_segments: int = 2,
                     denominator: RateDenominator = RateDenominator.ALIGNED) -> list[PartialPair]:
    src = split_segments(pair.source, Side.SOURCE)
    tgt = split_segments(pair.target, Side.TARGET)
    if len(src.segments) < min_segments or len(tgt.segments) < min_segments:
        return []
    m = segment_alignment_matrix(src, tgt, wa, theta, denominator)
    fwd = infer_directional(m, InferDirection.SRC_TO_TGT)
    rev = infer_directional(m, InferDirection.TGT_TO_SRC)
    return combine_one_to_one(fwd, rev, src, tgt)


def strip_delimiters(tokens) -> tuple:
    """Drop delimiter tokens from both ends."""
    toks = list(tokens)
    lo, hi = 0, len(toks)
    while lo < hi and toks[lo].is_delimiter:
        lo += 1
    while hi > lo and toks[hi - 1].is_delimiter:
        hi -= 1
    return tuple(toks[lo:hi])


def content_span(tokens, start: int, end: int) -> tuple[int, int]:
    """Narrow ``[start, end)`` so it neither starts nor ends on a delimiter."""
    while start < end and tokens[start].is_delimiter:
        start += 1
    while end > start and tokens[end - 1].is_delimiter:
        end -= 1
    return start, end

