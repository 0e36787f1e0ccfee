"""Pseudo-parallel pair generation and the five augmentation modes."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .aligner import Heuristic, train_and_align
from .backtranslate import Backtranslator, TranslationBatchResult
from .corpus import AugmentationReport, Corpus, ParallelPair, Provenance, Sentence, Token, corpus_stats
from .errors import ConfigError, SpanMismatch
from .segmenter import (
    DEFAULT_THETA,
    PartialPair,
    RateDenominator,
    content_span,
    extract_partials,
    is_long,
    strip_delimiters,
)
from .tokenizer import DelimiterSet


class AugmentationMode(enum.Enum):
    BASELINE = "baseline"
    COPIED = "copied"
    PARTIAL = "partial"
    BACKTRANS = "backtrans"
    PROPOSED = "proposed"

    @classmethod
    def parse(cls, name: str) -> "AugmentationMode":
        aliases = {"back-translation": "backtrans", "backtranslation": "backtrans"}
        key = name.lower()
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ConfigError(f"unknown mode {name!r}") from None


@dataclass
class AugmentConfig:
    theta: float = DEFAULT_THETA
    min_segments: int = 2
    denominator: RateDenominator = RateDenominator.ALIGNED
    keep_duplicates: bool = False
    delims: DelimiterSet = DelimiterSet()
    iters: int = 5
    heuristic: Heuristic = Heuristic.GROW_DIAG_FINAL
    workers: int = 1

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ConfigError(f"theta must lie in [0, 1], got {self.theta}")
        if self.min_segments < 2:
            raise ConfigError("min_segments must be >= 2")


@dataclass(frozen=True)
class PseudoPair:
    origin_id: int
    replaced_group: PartialPair
    source: Sentence
    target: Sentence

    def to_pair(self, new_id: int) -> ParallelPair:
        return ParallelPair(new_id, self.source, self.target, Provenance.PSEUDO)


def _mark(texts, lang, delims) -> Sentence:
    return Sentence(tuple(Token(t, t in delims) for t in texts), lang)


def _check_partial(pair: ParallelPair, partial: PartialPair):
    for side, span, toks in (("source", partial.source_span, partial.source_tokens),
                             ("target", partial.target_span, partial.target_tokens)):
        sent = getattr(pair, side)
        lo, hi = span
        if not (0 <= lo < hi <= len(sent)) or sent.tokens[lo:hi] != tuple(toks):
            raise SpanMismatch(f"partial {side} span {lo}:{hi} does not belong to pair {pair.id}")


def make_pseudo(pair: ParallelPair, partial: PartialPair, bt_source, delims: DelimiterSet = DelimiterSet()) -> PseudoPair:
    """Swap the partial's source content for its back-translation.

    Delimiters at the edges of the partial's source span stay in place, so
    sentence punctuation survives the substitution. The target is copied.
    """
    bt = tuple(getattr(t, "text", t) for t in bt_source)
    if not bt:
        raise ValueError("back-translated source must be non-empty")
    _check_partial(pair, partial)
    toks = pair.source.tokens
    lo, hi = content_span(toks, *partial.source_span)
    texts = [t.text for t in toks[:lo]] + list(bt) + [t.text for t in toks[hi:]]
    return PseudoPair(pair.id, partial, _mark(texts, pair.source.lang, delims), pair.target)


@dataclass
class PairRecord:
    pair: ParallelPair
    partials: list


@dataclass
class _Generated:
    pairs: list = field(default_factory=list)
    attempts: int = 0
    emitted: int = 0
    dropped: int = 0
    failures: int = 0
    per_pair: list = field(default_factory=list)


class Augmenter:
    """Shares extraction and back-translation work across modes.

    Stages run lazily: ``extract`` then ``translate`` then ``build``.
    """

    def __init__(self, corpus: Corpus, cfg: AugmentConfig | None = None, alignments=None,
                 translator: Backtranslator | None = None):
        self.corpus = corpus
        self.cfg = cfg or AugmentConfig()
        self.alignments = alignments
        self.translator = translator
        self.records: list[PairRecord] | None = None
        self.partial_bt: TranslationBatchResult | None = None
        self.sentence_bt: TranslationBatchResult | None = None
        self._next_id = max((p.id for p in corpus.pairs), default=-1) + 1
        self._built = {}

    def align(self):
        if self.alignments is None:
            cfg = self.cfg
            self.alignments = train_and_align(self.corpus, cfg.iters, cfg.heuristic, cfg.workers).alignments
        if len(self.alignments) != len(self.corpus):
            raise ConfigError(f"{len(self.alignments)} alignments for {len(self.corpus)} pairs")
        for pair, a in zip(self.corpus.pairs, self.alignments):
            a.check_bounds(len(pair.source), len(pair.target))
        return self.alignments

    def extract(self) -> list[PairRecord]:
        if self.records is None:
            self.align()
            cfg = self.cfg
            self.records = [
                PairRecord(p, extract_partials(p, a, cfg.theta, cfg.min_segments, cfg.denominator))
                for p, a in zip(self.corpus.pairs, self.alignments)
            ]
        return self.records

    def _require_translator(self):
        if self.translator is None:
            raise ConfigError("this mode needs a translator")
        return self.translator

    def translate_partials(self) -> TranslationBatchResult:
        if self.partial_bt is None:
            items = [strip_delimiters(pp.target_tokens) for r in self.extract() for pp in r.partials]
            self.partial_bt = self._require_translator().translate(items)
        return self.partial_bt

    def translate_sentences(self) -> TranslationBatchResult:
        if self.sentence_bt is None:
            items = [r.pair.target.tokens for r in self.extract() if r.partials]
            self.sentence_bt = self._require_translator().translate(items)
        return self.sentence_bt

    def _new_ids(self, count):
        return range(self._next_id, self._next_id + count)

    def _dedup_emit(self, gen: _Generated, seen: set, candidate: tuple):
        src, tgt, prov = candidate
        key = (src.texts, tgt.texts)
        if key in seen and not self.cfg.keep_duplicates:
            gen.dropped += 1
            return False
        seen.add(key)
        gen.pairs.append((src, tgt, prov))
        gen.emitted += 1
        return True

    def _proposed(self) -> _Generated:
        if "proposed" in self._built:
            return self._built["proposed"]
        bt = self.translate_partials()
        seen = {p.key for p in self.corpus.pairs}
        gen = _Generated()
        k = 0
        for rec in self.extract():
            if not rec.partials:
                continue
            row = {"id": rec.pair.id, "partials": len(rec.partials), "attempted": 0,
                   "emitted": 0, "dropped": 0, "failed": 0}
            for pp in rec.partials:
                out = bt.outputs[k]
                k += 1
                gen.attempts += 1
                row["attempted"] += 1
                if out is None:
                    gen.failures += 1
                    row["failed"] += 1
                    continue
                pseudo = make_pseudo(rec.pair, pp, out, self.cfg.delims)
                if self._dedup_emit(gen, seen, (pseudo.source, pseudo.target, Provenance.PSEUDO)):
                    row["emitted"] += 1
                else:
                    row["dropped"] += 1
            gen.per_pair.append(row)
        self._built["proposed"] = gen
        return gen

    def _backtrans(self) -> _Generated:
        bt = self.translate_sentences()
        seen = {p.key for p in self.corpus.pairs}
        gen = _Generated()
        k = 0
        for rec in self.extract():
            if not rec.partials:
                continue
            out = bt.outputs[k]
            k += 1
            gen.attempts += 1
            row = {"id": rec.pair.id, "partials": len(rec.partials), "attempted": 1,
                   "emitted": 0, "dropped": 0, "failed": 0}
            if out is None:
                gen.failures += 1
                row["failed"] = 1
            else:
                src = _mark(out, self.corpus.source_lang, self.cfg.delims)
                row["emitted" if self._dedup_emit(gen, seen, (src, rec.pair.target, Provenance.BACK_TRANSLATED))
                    else "dropped"] = 1
            gen.per_pair.append(row)
        return gen

    def _partial(self) -> _Generated:
        gen = _Generated()
        sl, tl = self.corpus.source_lang, self.corpus.target_lang
        for rec in self.extract():
            for pp in rec.partials:
                src = Sentence(strip_delimiters(pp.source_tokens), sl)
                tgt = Sentence(strip_delimiters(pp.target_tokens), tl)
                gen.pairs.append((src, tgt, Provenance.PARTIAL))
        return gen

    def _copied(self) -> _Generated:
        target_total = len(self.corpus) + len(self._proposed().pairs)
        originals = self.corpus.pairs
        gen = _Generated()
        if not originals:
            return gen
        for k in range(target_total - len(originals)):
            p = originals[k % len(originals)]
            gen.pairs.append((p.source, p.target, Provenance.COPIED_DUPLICATE))
        return gen

    def run(self, mode: AugmentationMode) -> tuple[Corpus, AugmentationReport]:
        if mode is AugmentationMode.BASELINE:
            gen = _Generated()
        elif mode is AugmentationMode.PROPOSED:
            gen = self._proposed()
        elif mode is AugmentationMode.COPIED:
            gen = self._copied()
        elif mode is AugmentationMode.PARTIAL:
            gen = self._partial()
        else:
            gen = self._backtrans()
        extra = tuple(ParallelPair(i, s, t, prov)
                      for i, (s, t, prov) in zip(self._new_ids(len(gen.pairs)), gen.pairs))
        out = Corpus(tuple(self.corpus.pairs) + extra, self.corpus.source_lang, self.corpus.target_lang)
        return out, self._report(mode, out, gen)

    def _report(self, mode, out: Corpus, gen: _Generated) -> AugmentationReport:
        report = corpus_stats(out, self.cfg.min_segments)
        report.mode = mode.value
        report.originals = len(self.corpus)
        if mode is AugmentationMode.BASELINE:
            report.long_pairs = corpus_stats(self.corpus, self.cfg.min_segments).long_pairs
            return report
        records = self.extract()
        report.long_pairs = sum(1 for r in records if _both_long(r, self.cfg.min_segments))
        report.partial_pairs_extracted = sum(len(r.partials) for r in records)
        if mode in (AugmentationMode.PROPOSED, AugmentationMode.BACKTRANS):
            bt = self.partial_bt if mode is AugmentationMode.PROPOSED else self.sentence_bt
            report.pairs_backtranslated = sum(1 for r in records if r.partials)
            report.partials_backtranslated = bt.succeeded
            report.attempts = gen.attempts
            report.pseudo_pairs_emitted = gen.emitted
            report.duplicates_dropped = gen.dropped
            report.failures = gen.failures
            report.per_pair = gen.per_pair
        return report


def _both_long(rec: PairRecord, min_segments: int) -> bool:
    return is_long(rec.pair.source, min_segments) and is_long(rec.pair.target, min_segments)


def run_mode(corpus: Corpus, mode: AugmentationMode, cfg: AugmentConfig | None = None,
             alignments=None, translator: Backtranslator | None = None) -> tuple[Corpus, AugmentationReport]:
    return Augmenter(corpus, cfg, alignments, translator).run(mode)
