"""Tokenizers and delimiter marking."""

from __future__ import annotations

from dataclasses import dataclass

import regex

from .corpus import Corpus, ParallelPair, Sentence, Token
from .errors import ConfigError, EmptyInput

DEFAULT_DELIMITERS = frozenset({",", ";", ":", "、", "，", "；", "："})

_GRAPHEME = regex.compile(r"\X")


@dataclass(frozen=True)
class DelimiterSet:
    delimiters: frozenset = DEFAULT_DELIMITERS

    def __post_init__(self):
        delims = frozenset(self.delimiters)
        object.__setattr__(self, "delimiters", delims)
        if not delims:
            raise ConfigError("delimiter set must be non-empty")
        for d in delims:
            if len(_GRAPHEME.findall(d)) != 1:
                raise ConfigError(f"delimiter {d!r} is not a single grapheme cluster")
            if d.isspace():
                raise ConfigError("whitespace cannot be a delimiter")

    def __contains__(self, text):
        return text in self.delimiters

    @classmethod
    def parse(cls, spec: str) -> "DelimiterSet":
        """Parse a comma-separated list of code points.

        Items may be ``U+FF0C``, ``0xff0c``, a decimal code point, or a
        literal single character other than a comma.
        """
        out = set()
        for item in spec.split(","):
            item = item.strip()
            if not item:
                continue
            upper = item.upper()
            try:
                if upper.startswith("U+"):
                    out.add(chr(int(item[2:], 16)))
                elif upper.startswith("0X"):
                    out.add(chr(int(item, 16)))
                elif item.isdigit() and len(item) > 1:
                    out.add(chr(int(item)))
                elif len(_GRAPHEME.findall(item)) == 1:
                    out.add(item)
                else:
                    raise ValueError(item)
            except ValueError:
                raise ConfigError(f"cannot parse delimiter {item!r}") from None
        return cls(frozenset(out))


def _require_text(raw: str) -> str:
    if raw is None or not raw.strip():
        raise EmptyInput("cannot tokenize empty input")
    return raw


def _split_word(word: str, delims: DelimiterSet) -> list[str]:
    pieces, buf = [], []
    for g in _GRAPHEME.findall(word):
        if g in delims:
            if buf:
                pieces.append("".join(buf))
                buf = []
            pieces.append(g)
        else:
            buf.append(g)
    if buf:
        pieces.append("".join(buf))
    return pieces


def tokenize_whitespace(raw: str, delims: DelimiterSet = DelimiterSet()) -> list[Token]:
    """Split on whitespace runs, then split delimiter characters off into their own tokens."""
    _require_text(raw)
    out = []
    for word in raw.split():
        out.extend(Token(p, p in delims) for p in _split_word(word, delims))
    return out


def tokenize_chars(raw: str, delims: DelimiterSet = DelimiterSet()) -> list[Token]:
    _require_text(raw)
    return [Token(g, g in delims) for g in _GRAPHEME.findall(raw) if not g.isspace()]


def mark_delimiters(tokens, delims: DelimiterSet = DelimiterSet()) -> list[Token]:
    return [Token(t.text, t.text in delims) for t in tokens]


def tokenize_pretokenized(raw: str, delims: DelimiterSet = DelimiterSet()) -> list[Token]:
    _require_text(raw)
    return [Token(w, w in delims) for w in raw.split()]


TOKENIZERS = {
    "pretokenized": tokenize_pretokenized,
    "whitespace": tokenize_whitespace,
    "chars": tokenize_chars,
}


def get_tokenizer(name: str):
    try:
        return TOKENIZERS[name]
    except KeyError:
        raise ConfigError(f"unknown tokenizer {name!r}; choose from {sorted(TOKENIZERS)}") from None


def _retokenize(sentence: Sentence, fn, delims) -> Sentence:
    raw = " ".join(sentence.texts)
    return Sentence(tuple(fn(raw, delims)), sentence.lang)


def tokenize_corpus(corpus: Corpus, delims: DelimiterSet = DelimiterSet(),
                    source_tokenizer="pretokenized", target_tokenizer="pretokenized") -> Corpus:
    """Tokenize (or re-mark) both sides of every pair."""
    src_fn = get_tokenizer(source_tokenizer)
    tgt_fn = get_tokenizer(target_tokenizer)
    pairs = tuple(
        ParallelPair(p.id, _retokenize(p.source, src_fn, delims),
                     _retokenize(p.target, tgt_fn, delims), p.provenance)
        for p in corpus.pairs
    )
    return Corpus(pairs, corpus.source_lang, corpus.target_lang)

