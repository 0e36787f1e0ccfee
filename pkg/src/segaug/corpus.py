"""Corpus data types and line-aligned corpus I/O."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import (
    CorpusIOError,
    EmptyLine,
    EncodingError,
    InvariantViolation,
    LineCountMismatch,
)


@dataclass(frozen=True)
class Token:
    text: str
    is_delimiter: bool = False

    def __post_init__(self):
        if not self.text:
            raise ValueError("token text must be non-empty")
        if "\n" in self.text or "\r" in self.text:
            raise ValueError(f"token contains a newline: {self.text!r}")


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]
    lang: str

    @classmethod
    def from_texts(cls, texts: Iterable[str], lang: str, delims=None) -> "Sentence":
        delims = frozenset(delims or ())
        return cls(tuple(Token(t, t in delims) for t in texts), lang)

    @property
    def texts(self) -> tuple[str, ...]:
        return tuple(t.text for t in self.tokens)

    def __len__(self):
        return len(self.tokens)

    def join(self, joiner: str = " ") -> str:
        return joiner.join(self.texts)


class Provenance(str, enum.Enum):
    ORIGINAL = "Original"
    PARTIAL = "Partial"
    PSEUDO = "Pseudo"
    COPIED_DUPLICATE = "CopiedDuplicate"
    BACK_TRANSLATED = "BackTranslated"


@dataclass(frozen=True)
class ParallelPair:
    id: int
    source: Sentence
    target: Sentence
    provenance: Provenance = Provenance.ORIGINAL

    def __post_init__(self):
        if self.id < 0:
            raise ValueError("pair id must be non-negative")
        if self.source.lang == self.target.lang:
            raise ValueError(f"source and target share language tag {self.source.lang!r}")

    @property
    def key(self) -> tuple[tuple[str, ...], tuple[str, ...]]:
        """Token-text identity of the pair, ignoring id and provenance."""
        return self.source.texts, self.target.texts


@dataclass(frozen=True)
class Corpus:
    pairs: tuple[ParallelPair, ...]
    source_lang: str
    target_lang: str

    def __post_init__(self):
        seen = set()
        for p in self.pairs:
            if p.source.lang != self.source_lang or p.target.lang != self.target_lang:
                raise InvariantViolation(f"pair {p.id} has wrong language orientation")
            if p.id in seen:
                raise InvariantViolation(f"duplicate pair id {p.id}")
            seen.add(p.id)

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def by_id(self) -> dict[int, ParallelPair]:
        return {p.id: p for p in self.pairs}


@dataclass
class AugmentationReport:
    """Size accounting for a corpus or for one augmentation run.

    The generation counters stay zero for plain ``corpus_stats`` output.
    ``attempts`` always equals ``pseudo_pairs_emitted + duplicates_dropped
    + failures``.
    """

    mode: str = "stats"
    total: int = 0
    by_provenance: dict = field(default_factory=lambda: {p.value: 0 for p in Provenance})
    originals: int = 0
    long_pairs: int = 0
    mean_source_tokens: float = 0.0
    mean_target_tokens: float = 0.0
    partial_pairs_extracted: int = 0
    pairs_backtranslated: int = 0
    partials_backtranslated: int = 0
    attempts: int = 0
    pseudo_pairs_emitted: int = 0
    duplicates_dropped: int = 0
    failures: int = 0
    per_pair: list = field(default_factory=list)

    def to_dict(self) -> dict:
        # field order is the JSON key order
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _read_lines(path) -> list[str]:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise CorpusIOError(f"cannot read {path}: {exc}") from exc
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise EncodingError(str(path), exc.start) from None
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [ln[:-1] if ln.endswith("\r") else ln for ln in lines]


def _check_blank(path, lines):
    for i, ln in enumerate(lines):
        if not ln.strip():
            raise EmptyLine(str(path), i + 1)


def _sentence(line: str, lang: str, pretokenized: bool) -> Sentence:
    if pretokenized:
        return Sentence(tuple(Token(t) for t in line.split()), lang)
    # raw mode: one pseudo-token holding the whole line, tokenized later
    return Sentence((Token(line.strip()),), lang)


def _build(src_lines, tgt_lines, langs, pretokenized) -> Corpus:
    src_lang, tgt_lang = langs
    pairs = tuple(
        ParallelPair(i, _sentence(s, src_lang, pretokenized), _sentence(t, tgt_lang, pretokenized))
        for i, (s, t) in enumerate(zip(src_lines, tgt_lines))
    )
    return Corpus(pairs, src_lang, tgt_lang)


def read_parallel(source_path, target_path, langs=("src", "tgt"), pretokenized=True) -> Corpus:
    """Read two line-aligned UTF-8 files into a corpus.

    In pre-tokenized mode each line is whitespace-split into tokens.
    Otherwise every sentence holds the raw line as a single pseudo-token,
    to be run through a tokenizer (see ``segaug.tokenizer.tokenize_corpus``).
    """
    src_lines = _read_lines(source_path)
    tgt_lines = _read_lines(target_path)
    if len(src_lines) != len(tgt_lines):
        raise LineCountMismatch(len(src_lines), len(tgt_lines), f"{source_path} vs {target_path}")
    _check_blank(source_path, src_lines)
    _check_blank(target_path, tgt_lines)
    return _build(src_lines, tgt_lines, langs, pretokenized)


def read_tsv(path, langs=("src", "tgt"), pretokenized=True) -> Corpus:
    """Read a single ``source<TAB>target`` file."""
    src_lines, tgt_lines = [], []
    for i, line in enumerate(_read_lines(path)):
        parts = line.split("\t")
        if len(parts) != 2:
            raise CorpusIOError(f"{path}: line {i + 1} has {len(parts)} tab-separated fields, expected 2")
        if not parts[0].strip() or not parts[1].strip():
            raise EmptyLine(str(path), i + 1)
        src_lines.append(parts[0])
        tgt_lines.append(parts[1])
    return _build(src_lines, tgt_lines, langs, pretokenized)


def write_parallel(corpus: Corpus, source_path, target_path, source_joiner=" ", target_joiner=" ") -> None:
    if not corpus.pairs:
        raise CorpusIOError("refusing to write an empty corpus")
    for path, joiner, side in (
        (source_path, source_joiner, "source"),
        (target_path, target_joiner, "target"),
    ):
        path = Path(path)
        lines = [getattr(p, side).join(joiner) for p in corpus.pairs]
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text("".join(ln + "\n" for ln in lines), encoding="utf-8")
        except OSError as exc:
            raise CorpusIOError(f"cannot write {path}: {exc}") from exc


def corpus_stats(corpus: Corpus, min_segments: int = 2) -> AugmentationReport:
    from .segmenter import is_long

    report = AugmentationReport()
    n = len(corpus.pairs)
    report.total = n
    for p in corpus.pairs:
        report.by_provenance[p.provenance.value] += 1
        if is_long(p.source, min_segments) and is_long(p.target, min_segments):
            report.long_pairs += 1
    report.originals = report.by_provenance[Provenance.ORIGINAL.value]
    if n:
        report.mean_source_tokens = sum(len(p.source) for p in corpus.pairs) / n
        report.mean_target_tokens = sum(len(p.target) for p in corpus.pairs) / n
    return report


def concat(corpus: Corpus, extra: Sequence[ParallelPair]) -> Corpus:
    return Corpus(tuple(corpus.pairs) + tuple(extra), corpus.source_lang, corpus.target_lang)
