"""End-to-end orchestration: read, tokenize, align, segment, back-translate, generate, write."""

from __future__ import annotations

import contextlib
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

from . import aligner
from .augment import AugmentationMode, AugmentConfig, Augmenter
from .backtranslate import Backtranslator, TranslatorSpec
from .corpus import Corpus, read_parallel, read_tsv, write_parallel, corpus_stats
from .errors import ConfigError, CorpusIOError, SegaugError, StageError
from .segmenter import DEFAULT_THETA, RateDenominator, strip_delimiters
from .tokenizer import DelimiterSet, tokenize_corpus

log = logging.getLogger(__name__)

JOINERS = {"space": " ", "none": ""}


def env_workers(default: int = 1) -> int:
    raw = os.environ.get("SEGAUG_THREADS")
    if not raw:
        return default
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"SEGAUG_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("SEGAUG_THREADS must be >= 1")
    return n


@dataclass
class PipelineConfig:
    src: str | None = None
    tgt: str | None = None
    tsv: str | None = None
    langs: tuple = ("src", "tgt")
    source_tokenizer: str = "whitespace"
    target_tokenizer: str = "whitespace"
    source_joiner: str = " "
    target_joiner: str = " "
    delims: DelimiterSet = DelimiterSet()
    align: str | None = None
    iters: int = 5
    heuristic: aligner.Heuristic = aligner.Heuristic.GROW_DIAG_FINAL
    theta: float = DEFAULT_THETA
    min_segments: int = 2
    denominator: RateDenominator = RateDenominator.ALIGNED
    translator: str | None = None
    batch_size: int = 64
    timeout: float = 60.0
    cache: bool = True
    keep_duplicates: bool = False
    modes: list = field(default_factory=lambda: [AugmentationMode.PROPOSED])
    out_prefix: str = "out/"
    report: str | None = None
    intermediate_dir: str | None = None
    workers: int = 1

    def validate(self):
        if self.tsv is None and (self.src is None or self.tgt is None):
            raise ConfigError("give --src and --tgt, or --tsv")
        if self.langs[0] == self.langs[1]:
            raise ConfigError("source and target language tags must differ")
        needs_bt = {AugmentationMode.PROPOSED, AugmentationMode.COPIED, AugmentationMode.BACKTRANS}
        if needs_bt & set(self.modes) and not self.translator:
            raise ConfigError("modes proposed/copied/backtrans need --translator")

    def augment_config(self) -> AugmentConfig:
        return AugmentConfig(theta=self.theta, min_segments=self.min_segments,
                             denominator=self.denominator, keep_duplicates=self.keep_duplicates,
                             delims=self.delims, iters=self.iters, heuristic=self.heuristic,
                             workers=self.workers)

    def translator_spec(self) -> TranslatorSpec:
        return TranslatorSpec.parse(
            self.translator, batch_size=self.batch_size, timeout=self.timeout,
            joiner=self.target_joiner, tokenizer=self.source_tokenizer, delims=self.delims)


@contextlib.contextmanager
def stage(name: str):
    try:
        yield
    except StageError:
        raise
    except SegaugError as exc:
        raise StageError(name, exc) from exc
    except OSError as exc:
        raise StageError(name, CorpusIOError(str(exc))) from exc


def load_corpus(cfg: PipelineConfig) -> Corpus:
    pretok = cfg.source_tokenizer == cfg.target_tokenizer == "pretokenized"
    if cfg.tsv:
        corpus = read_tsv(cfg.tsv, cfg.langs, pretokenized=pretok)
    else:
        corpus = read_parallel(cfg.src, cfg.tgt, cfg.langs, pretokenized=pretok)
    return corpus


def _write_intermediate(cfg: PipelineConfig, aug: Augmenter):
    d = Path(cfg.intermediate_dir)
    d.mkdir(parents=True, exist_ok=True)
    aligner.write_pharaoh(aug.alignments, d / "alignment.pharaoh")
    write_partials(aug.records, d / "partials.src", d / "partials.tgt", d / "partials.tsv",
                   cfg.source_joiner, cfg.target_joiner)
    if aug.partial_bt is not None:
        items = [pp for r in aug.records for pp in r.partials]
        with open(d / "backtranslations.tsv", "w", encoding="utf-8") as fh:
            for pp, out in zip(items, aug.partial_bt.outputs):
                tgt = cfg.target_joiner.join(t.text for t in strip_delimiters(pp.target_tokens))
                fh.write(f"{tgt}\t{'' if out is None else cfg.source_joiner.join(out)}\n")


def write_partials(records, src_path, tgt_path, sidecar_path, source_joiner=" ", target_joiner=" "):
    """Write partial pairs as line-aligned files plus a ``pair_id, src_span, tgt_span`` TSV."""
    with open(src_path, "w", encoding="utf-8") as fs, open(tgt_path, "w", encoding="utf-8") as ft, \
            open(sidecar_path, "w", encoding="utf-8") as fc:
        for rec in records:
            for pp in rec.partials:
                fs.write(source_joiner.join(t.text for t in strip_delimiters(pp.source_tokens)) + "\n")
                ft.write(target_joiner.join(t.text for t in strip_delimiters(pp.target_tokens)) + "\n")
                fc.write(f"{rec.pair.id}\t{pp.source_span[0]}:{pp.source_span[1]}"
                         f"\t{pp.target_span[0]}:{pp.target_span[1]}\n")


def output_paths(cfg: PipelineConfig, mode: AugmentationMode):
    prefix = cfg.out_prefix
    return f"{prefix}{mode.value}.{cfg.langs[0]}", f"{prefix}{mode.value}.{cfg.langs[1]}"


def run_pipeline(cfg: PipelineConfig, transport=None) -> dict:
    """Run every requested mode and return the report (also written to ``cfg.report``)."""
    with stage("config"):
        cfg.validate()
        acfg = cfg.augment_config()
        translator = None
        if cfg.translator:
            translator = Backtranslator(cfg.translator_spec(), cache=cfg.cache, transport=transport)
    with stage("read"):
        corpus = load_corpus(cfg)
    with stage("tokenize"):
        corpus = tokenize_corpus(corpus, cfg.delims, cfg.source_tokenizer, cfg.target_tokenizer)
    with stage("align"):
        alignments = aligner.read_pharaoh(cfg.align, corpus) if cfg.align else None
        aug = Augmenter(corpus, acfg, alignments, translator)
        aug.align()
    with stage("segment"):
        aug.extract()
    modes = list(dict.fromkeys(cfg.modes))
    with stage("backtranslate"):
        if {AugmentationMode.PROPOSED, AugmentationMode.COPIED} & set(modes):
            aug.translate_partials()
        if AugmentationMode.BACKTRANS in modes:
            aug.translate_sentences()
    results = {}
    with stage("generate"):
        for mode in modes:
            results[mode] = aug.run(mode)
    report = {"input": corpus_stats(corpus, cfg.min_segments).to_dict(), "modes": {}}
    with stage("write"):
        for mode, (out, rep) in results.items():
            src_path, tgt_path = output_paths(cfg, mode)
            write_parallel(out, src_path, tgt_path, cfg.source_joiner, cfg.target_joiner)
            report["modes"][mode.value] = rep.to_dict()
            log.info("%s: %d pairs -> %s, %s", mode.value, len(out), src_path, tgt_path)
        if cfg.intermediate_dir:
            _write_intermediate(cfg, aug)
        if cfg.report:
            Path(cfg.report).parent.mkdir(parents=True, exist_ok=True)
            Path(cfg.report).write_text(json.dumps(report, indent=2, ensure_ascii=False) + "\n",
                                        encoding="utf-8")
    return report
