"""Word alignment: Pharaoh I/O, IBM Model 1 and symmetrization."""

from __future__ import annotations

import enum
import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .corpus import Corpus, ParallelPair
from .errors import (
    ConfigError,
    CorpusIOError,
    EmptyCorpus,
    IndexOutOfRange,
    InvariantViolation,
    LineCountMismatch,
    MalformedLink,
)

log = logging.getLogger(__name__)

NULL = "<NULL>"
OOV_NULL_PROB = 1e-12
NORM_TOL = 1e-9
LL_TOL = 1e-9

_LINK = re.compile(r"(\d+)-(\d+)")


@dataclass(frozen=True)
class WordAlignment:
    links: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "links", frozenset((int(s), int(t)) for s, t in self.links))

    def __iter__(self):
        return iter(sorted(self.links))

    def __len__(self):
        return len(self.links)

    def __contains__(self, link):
        return link in self.links

    def transpose(self) -> "WordAlignment":
        return WordAlignment(frozenset((t, s) for s, t in self.links))

    def check_bounds(self, source_len: int, target_len: int) -> None:
        for s, t in self.links:
            if not (0 <= s < source_len and 0 <= t < target_len):
                raise IndexOutOfRange(
                    f"link {s}-{t} outside a {source_len}x{target_len} sentence pair")


def parse_pharaoh(line: str) -> WordAlignment:
    links = set()
    for pos, item in enumerate(line.split(), start=1):
        m = _LINK.fullmatch(item)
        if m is None:
            raise MalformedLink(item, pos)
        links.add((int(m.group(1)), int(m.group(2))))
    return WordAlignment(frozenset(links))


def format_pharaoh(a: WordAlignment) -> str:
    return " ".join(f"{s}-{t}" for s, t in sorted(a.links))


def read_pharaoh(path, corpus: Corpus | None = None) -> list[WordAlignment]:
    """Read one alignment per line; when ``corpus`` is given, check line count and bounds."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise CorpusIOError(f"cannot read alignment file {path}: {exc}") from exc
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    out = []
    for lineno, line in enumerate(lines, start=1):
        try:
            out.append(parse_pharaoh(line))
        except MalformedLink as exc:
            raise MalformedLink(exc.item, f"{exc.position} on line {lineno}") from None
    if corpus is not None:
        if len(out) != len(corpus):
            raise LineCountMismatch(len(corpus), len(out), f"corpus vs alignment file {path}")
        for pair, a in zip(corpus.pairs, out):
            a.check_bounds(len(pair.source), len(pair.target))
    return out


def write_pharaoh(alignments, path) -> None:
    try:
        Path(path).write_text("".join(format_pharaoh(a) + "\n" for a in alignments), encoding="utf-8")
    except OSError as exc:
        raise CorpusIOError(f"cannot write {path}: {exc}") from exc


class Direction(enum.Enum):
    """Which side is generated: TGT_GIVEN_SRC models t(target word | source word)."""

    SRC_GIVEN_TGT = "src-given-tgt"
    TGT_GIVEN_SRC = "tgt-given-src"


def _sides(pair: ParallelPair, direction: Direction):
    """(dependent texts, conditioning texts)."""
    if direction is Direction.TGT_GIVEN_SRC:
        return pair.target.texts, pair.source.texts
    return pair.source.texts, pair.target.texts


@dataclass
class TranslationTable:
    """Sparse lexical table t(dependent word | conditioning word).

    Parameter ``p`` is t(dep_vocab[param_dep[p]] | cond_vocab[param_cond[p]]);
    ``cond_vocab[0]`` is the NULL word.
    """

    dep_vocab: list
    cond_vocab: list
    param_dep: np.ndarray
    param_cond: np.ndarray
    probs: np.ndarray
    direction: Direction = Direction.TGT_GIVEN_SRC
    loglik_history: list = field(default_factory=list)

    def __post_init__(self):
        self.dep_index = {w: i for i, w in enumerate(self.dep_vocab)}
        self.cond_index = {w: i for i, w in enumerate(self.cond_vocab) if i > 0}
        self._param = {(int(c), int(d)): p
                       for p, (c, d) in enumerate(zip(self.param_cond, self.param_dep))}

    def prob(self, f: str, e: str | None = None) -> float:
        """t(f | e); ``e=None`` asks for the NULL word."""
        d = self.dep_index.get(f)
        if e is None:
            if d is None:
                return OOV_NULL_PROB
            c = 0
        else:
            c = self.cond_index.get(e)
            if c is None or d is None:
                return 0.0
        p = self._param.get((c, d))
        return 0.0 if p is None else float(self.probs[p])

    def conditional_sums(self) -> np.ndarray:
        return np.bincount(self.param_cond, weights=self.probs, minlength=len(self.cond_vocab))

    def rows(self):
        """(conditioning word, dependent word, prob) triples in parameter order."""
        for c, d, p in zip(self.param_cond, self.param_dep, self.probs):
            yield (NULL if c == 0 else self.cond_vocab[c]), self.dep_vocab[d], float(p)


def save_table(table: TranslationTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e, f, p in table.rows():
            fh.write(f"{e}\t{f}\t{p!r}\n")


def load_table(path, direction: Direction = Direction.TGT_GIVEN_SRC) -> TranslationTable:
    cond_vocab, dep_vocab = [NULL], []
    cond_idx, dep_idx = {NULL: 0}, {}
    pc, pd, probs = [], [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 3:
                raise CorpusIOError(f"{path}: line {lineno}: expected e<TAB>f<TAB>prob")
            e, f, p = parts
            if e not in cond_idx:
                cond_idx[e] = len(cond_vocab)
                cond_vocab.append(e)
            if f not in dep_idx:
                dep_idx[f] = len(dep_vocab)
                dep_vocab.append(f)
            pc.append(cond_idx[e])
            pd.append(dep_idx[f])
            probs.append(float(p))
    return TranslationTable(dep_vocab, cond_vocab, np.array(pd, dtype=np.int64),
                            np.array(pc, dtype=np.int64), np.array(probs), direction)


@dataclass
class _Encoded:
    dep_vocab: list
    cond_vocab: list
    param_keys: np.ndarray
    cell_param: np.ndarray
    row_off: np.ndarray


def _encode(corpus: Corpus, direction: Direction) -> _Encoded:
    dep_index, cond_index = {}, {}
    cell_keys, row_lengths = [], []
    sides = [_sides(p, direction) for p in corpus.pairs]
    for dep, cond in sides:
        for w in dep:
            dep_index.setdefault(w, len(dep_index))
        for w in cond:
            cond_index.setdefault(w, len(cond_index) + 1)  # 0 is NULL
    n_dep = len(dep_index)
    for dep, cond in sides:
        d = np.fromiter((dep_index[w] for w in dep), dtype=np.int64, count=len(dep))
        c = np.fromiter((cond_index[w] for w in cond), dtype=np.int64, count=len(cond))
        c = np.concatenate(([0], c))
        cell_keys.append((c[None, :] * n_dep + d[:, None]).ravel())
        row_lengths.append(np.full(len(dep), len(c), dtype=np.int64))
    keys, cell_param = np.unique(np.concatenate(cell_keys), return_inverse=True)
    row_off = np.concatenate(([0], np.cumsum(np.concatenate(row_lengths)))).astype(np.int64)
    dep_vocab = [None] * n_dep
    for w, i in dep_index.items():
        dep_vocab[i] = w
    cond_vocab = [NULL] + [None] * len(cond_index)
    for w, i in cond_index.items():
        cond_vocab[i] = w
    return _Encoded(dep_vocab, cond_vocab, keys.astype(np.int64),
                    cell_param.astype(np.int64).ravel(), row_off)


def _shards(n_rows: int, workers: int):
    workers = max(1, min(workers, n_rows))
    bounds = np.linspace(0, n_rows, workers + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def _e_step(enc: _Encoded, params: np.ndarray, workers: int):
    shards = _shards(len(enc.row_off) - 1, workers)
    if len(shards) == 1:
        counts = np.zeros_like(params)
        ll = kernels.em_accumulate(enc.cell_param, enc.row_off, params, counts, *shards[0])
        return counts, ll

    def run(bounds):
        counts = np.zeros_like(params)
        ll = kernels.em_accumulate(enc.cell_param, enc.row_off, params, counts, *bounds)
        return counts, ll

    with ThreadPoolExecutor(max_workers=len(shards)) as pool:
        results = list(pool.map(run, shards))
    # merge in shard order so the result is independent of completion order
    counts = np.zeros_like(params)
    ll = 0.0
    for c, part in results:
        counts += c
        ll += part
    return counts, ll


def _check_normalized(param_cond, probs, n_cond, iteration):
    sums = np.bincount(param_cond, weights=probs, minlength=n_cond)
    bad = np.abs(sums - 1.0) > NORM_TOL
    if bad.any():
        raise InvariantViolation(
            f"EM iteration {iteration}: {int(bad.sum())} conditionals do not sum to 1")


def train_model1(corpus: Corpus, direction: Direction = Direction.TGT_GIVEN_SRC,
                 iters: int = 5, workers: int = 1) -> TranslationTable:
    """Train IBM Model 1 by exact EM.

    Parameters start uniform over the dependent words each conditioning
    word co-occurs with (NULL co-occurs with everything). The returned
    table's ``loglik_history`` holds ``iters + 1`` corpus log-likelihoods,
    one per parameter state from the initial table to the final one.
    """
    if not corpus.pairs:
        raise EmptyCorpus("cannot train an aligner on an empty corpus")
    if iters < 1:
        raise ConfigError("iters must be >= 1")
    enc = _encode(corpus, direction)
    n_dep, n_cond = len(enc.dep_vocab), len(enc.cond_vocab)
    param_cond = enc.param_keys // n_dep
    param_dep = enc.param_keys % n_dep
    params = 1.0 / np.bincount(param_cond, minlength=n_cond)[param_cond]
    history = []
    for it in range(iters):
        counts, ll = _e_step(enc, params, workers)
        if history and ll < history[-1] - LL_TOL * max(1.0, abs(ll)):
            raise InvariantViolation(f"EM log-likelihood decreased at iteration {it}")
        history.append(ll)
        totals = np.bincount(param_cond, weights=counts, minlength=n_cond)
        params = counts / totals[param_cond]
        _check_normalized(param_cond, params, n_cond, it + 1)
        log.debug("model1 %s iter %d loglik %.6f", direction.value, it + 1, ll)
    n_rows = len(enc.row_off) - 1
    final = sum(kernels.loglikelihood(enc.cell_param, enc.row_off, params, a, b)
                for a, b in _shards(n_rows, 1))
    if final < history[-1] - LL_TOL * max(1.0, abs(final)):
        raise InvariantViolation("EM log-likelihood decreased at the final iteration")
    history.append(final)
    return TranslationTable(enc.dep_vocab, enc.cond_vocab, param_dep, param_cond,
                            params, direction, history)


def _pair_values(pair: ParallelPair, table: TranslationTable, direction: Direction):
    dep, cond = _sides(pair, direction)
    rows = []
    for f in dep:
        rows.append([table.prob(f, None)] + [table.prob(f, e) for e in cond])
    return rows


def _links_from_best(best, dep_len, direction):
    links = set()
    for pos in range(dep_len):
        col = int(best[pos])
        if col == 0:
            continue
        if direction is Direction.TGT_GIVEN_SRC:
            links.add((col - 1, pos))
        else:
            links.add((pos, col - 1))
    return WordAlignment(frozenset(links))


def viterbi_align(pair: ParallelPair, table: TranslationTable,
                  direction: Direction | None = None) -> WordAlignment:
    """Link each dependent token to its most probable conditioning token.

    NULL sits at column 0, so it wins ties; ties between words go to the
    smaller index. Links are always returned as (source, target).
    """
    direction = direction or table.direction
    rows = _pair_values(pair, table, direction)
    if not rows:
        return WordAlignment()
    width = len(rows[0])
    values = np.asarray(rows, dtype=np.float64).ravel()
    row_off = np.arange(0, width * len(rows) + 1, width, dtype=np.int64)
    return _links_from_best(kernels.row_argmax(values, row_off), len(rows), direction)


def align_corpus(corpus: Corpus, table: TranslationTable,
                 direction: Direction | None = None) -> list[WordAlignment]:
    direction = direction or table.direction
    values, offsets, lengths = [], [0], []
    for pair in corpus.pairs:
        rows = _pair_values(pair, table, direction)
        lengths.append(len(rows))
        for row in rows:
            values.extend(row)
            offsets.append(offsets[-1] + len(row))
    best = kernels.row_argmax(np.asarray(values, dtype=np.float64),
                              np.asarray(offsets, dtype=np.int64))
    out, start = [], 0
    for n in lengths:
        out.append(_links_from_best(best[start:start + n], n, direction))
        start += n
    return out


class Heuristic(enum.Enum):
    INTERSECTION = "intersection"
    UNION = "union"
    GROW_DIAG_FINAL = "grow-diag-final"

    @classmethod
    def parse(cls, name: str) -> "Heuristic":
        try:
            return cls(name.lower().replace("_", "-"))
        except ValueError:
            raise ConfigError(f"unknown symmetrization heuristic {name!r}") from None


_NEIGHBORS = ((-1, 0), (0, -1), (1, 0), (0, 1), (-1, -1), (-1, 1), (1, -1), (1, 1))


def _grow_diag_final(fwd, rev, src_len, tgt_len):
    union = fwd | rev
    alignment = set(fwd & rev)
    src_aligned = {s for s, _ in alignment}
    tgt_aligned = {t for _, t in alignment}

    def add(s, t):
        alignment.add((s, t))
        src_aligned.add(s)
        tgt_aligned.add(t)

    added = True
    while added:
        added = False
        for s in range(src_len):
            for t in range(tgt_len):
                if (s, t) not in alignment:
                    continue
                for ds, dt in _NEIGHBORS:
                    ns, nt = s + ds, t + dt
                    if ((ns not in src_aligned or nt not in tgt_aligned)
                            and (ns, nt) in union and (ns, nt) not in alignment):
                        add(ns, nt)
                        added = True
    for directional in (fwd, rev):
        for s in range(src_len):
            for t in range(tgt_len):
                if ((s not in src_aligned or t not in tgt_aligned)
                        and (s, t) in directional and (s, t) not in alignment):
                    add(s, t)
    return alignment


def symmetrize(fwd: WordAlignment, rev: WordAlignment, h: Heuristic = Heuristic.GROW_DIAG_FINAL,
               src_len: int | None = None, tgt_len: int | None = None) -> WordAlignment:
    """Merge two alignments that are both in (source, target) orientation."""
    f, r = fwd.links, rev.links
    if h is Heuristic.INTERSECTION:
        return WordAlignment(f & r)
    if h is Heuristic.UNION:
        return WordAlignment(f | r)
    both = f | r
    if src_len is None:
        src_len = max((s for s, _ in both), default=-1) + 1
    if tgt_len is None:
        tgt_len = max((t for _, t in both), default=-1) + 1
    return WordAlignment(frozenset(_grow_diag_final(f, r, src_len, tgt_len)))


@dataclass
class AlignmentResult:
    alignments: list
    forward: TranslationTable
    reverse: TranslationTable


def train_and_align(corpus: Corpus, iters: int = 5,
                    heuristic: Heuristic = Heuristic.GROW_DIAG_FINAL,
                    workers: int = 1) -> AlignmentResult:
    """Train Model 1 in both directions, decode, and symmetrize each pair."""
    fwd_table = train_model1(corpus, Direction.TGT_GIVEN_SRC, iters, workers)
    rev_table = train_model1(corpus, Direction.SRC_GIVEN_TGT, iters, workers)
    fwd = align_corpus(corpus, fwd_table)
    rev = align_corpus(corpus, rev_table)
    merged = [
        symmetrize(a, b, heuristic, len(p.source), len(p.target))
        for p, a, b in zip(corpus.pairs, fwd, rev)
    ]
    return AlignmentResult(merged, fwd_table, rev_table)
