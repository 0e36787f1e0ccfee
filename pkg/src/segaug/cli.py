"""Command-line interface: ``segaug {augment,train-align,extract-partials,stats}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import aligner
from .augment import AugmentationMode, AugmentConfig, Augmenter
from .corpus import corpus_stats
from .errors import EXIT_INVARIANT, ConfigError, SegaugError
from .pipeline import JOINERS, PipelineConfig, env_workers, load_corpus, run_pipeline, stage, write_partials
from .segmenter import RateDenominator
from .tokenizer import DEFAULT_DELIMITERS, TOKENIZERS, DelimiterSet, tokenize_corpus

log = logging.getLogger("segaug")


def _add_corpus_args(p):
    p.add_argument("--src", help="source side, one sentence per line")
    p.add_argument("--tgt", help="target side, line-aligned with --src")
    p.add_argument("--tsv", help="single file of source<TAB>target lines instead of --src/--tgt")
    p.add_argument("--langs", default="src,tgt", help="source,target language tags (default: src,tgt)")
    p.add_argument("--tokenizer", choices=sorted(TOKENIZERS), default=None,
                   help="tokenizer for both sides")
    p.add_argument("--src-tokenizer", choices=sorted(TOKENIZERS), default="whitespace")
    p.add_argument("--tgt-tokenizer", choices=sorted(TOKENIZERS), default="whitespace")
    p.add_argument("--src-joiner", choices=sorted(JOINERS), default="space")
    p.add_argument("--tgt-joiner", choices=sorted(JOINERS), default="space")
    p.add_argument("--delims", default=None,
                   help="comma-separated delimiter code points, e.g. U+002C,U+FF0C")
    p.add_argument("--config", help="JSON file of option defaults (keys are option names)")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_align_args(p):
    p.add_argument("--iters", type=int, default=5, help="EM iterations per direction (default: 5)")
    p.add_argument("--heuristic", default="grow-diag-final",
                   choices=[h.value for h in aligner.Heuristic])


def _add_segment_args(p):
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--min-segments", type=int, default=2)
    p.add_argument("--rate-denominator", choices=[d.value for d in RateDenominator], default="aligned")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="segaug", description="Parallel corpus augmentation by "
                                     "long-sentence segmentation and back-translation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("augment", help="generate augmented corpora")
    _add_corpus_args(p)
    _add_align_args(p)
    _add_segment_args(p)
    p.add_argument("--mode", action="append", dest="modes",
                   choices=[m.value for m in AugmentationMode],
                   help="augmentation mode; repeat for several (default: proposed)")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--align", help="Pharaoh alignment file, one line per pair")
    group.add_argument("--train-align", action="store_true",
                       help="train the built-in IBM Model 1 aligner (default when --align is absent)")
    p.add_argument("--translator",
                   help='cmd:"COMMAND" | http:URL | mock-identity | mock-dict:FILE')
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--timeout", type=float, default=60.0)
    p.add_argument("--no-cache", action="store_true")
    p.add_argument("--keep-duplicates", action="store_true")
    p.add_argument("--out-prefix", default="out/")
    p.add_argument("--report", help="write the JSON report here")
    p.add_argument("--keep-intermediate", metavar="DIR",
                   help="persist alignments, partials and back-translations to DIR")

    p = sub.add_parser("train-align", help="train IBM Model 1 both ways and symmetrize")
    _add_corpus_args(p)
    _add_align_args(p)
    p.add_argument("--out", required=True, help="TSV table e<TAB>f<TAB>prob for t(target|source)")
    p.add_argument("--reverse-out", help="TSV table for t(source|target)")
    p.add_argument("--align-out", help="write symmetrized Pharaoh alignments here")

    p = sub.add_parser("extract-partials", help="write aligned partial sentence pairs")
    _add_corpus_args(p)
    _add_align_args(p)
    _add_segment_args(p)
    p.add_argument("--align", help="Pharaoh alignment file (trained with Model 1 if absent)")
    p.add_argument("--out", nargs=2, required=True, metavar=("SRC_OUT", "TGT_OUT"))
    p.add_argument("--sidecar", help="TSV of pair_id, src_span, tgt_span (default: SRC_OUT.tsv)")

    p = sub.add_parser("stats", help="print corpus statistics as JSON")
    _add_corpus_args(p)
    p.add_argument("--min-segments", type=int, default=2)
    return parser


def _config_defaults(argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return {}
    try:
        data = json.loads(Path(known.config).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read config {known.config}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def _common(args) -> dict:
    langs = tuple(s.strip() for s in args.langs.split(",")) if isinstance(args.langs, str) else tuple(args.langs)
    if len(langs) != 2:
        raise ConfigError("--langs takes exactly two comma-separated tags")
    delims = DelimiterSet.parse(args.delims) if args.delims else DelimiterSet(DEFAULT_DELIMITERS)
    src_tok = args.tokenizer or args.src_tokenizer
    tgt_tok = args.tokenizer or args.tgt_tokenizer
    return dict(src=args.src, tgt=args.tgt, tsv=args.tsv, langs=langs,
                source_tokenizer=src_tok, target_tokenizer=tgt_tok,
                source_joiner=JOINERS[args.src_joiner], target_joiner=JOINERS[args.tgt_joiner],
                delims=delims, workers=env_workers())


def _load(cfg: PipelineConfig):
    with stage("config"):
        cfg.validate()
    with stage("read"):
        corpus = load_corpus(cfg)
    with stage("tokenize"):
        return tokenize_corpus(corpus, cfg.delims, cfg.source_tokenizer, cfg.target_tokenizer)


def cmd_augment(args) -> int:
    modes = [AugmentationMode.parse(m) for m in (args.modes or ["proposed"])]
    cfg = PipelineConfig(
        **_common(args), align=args.align, iters=args.iters,
        heuristic=aligner.Heuristic.parse(args.heuristic), theta=args.theta,
        min_segments=args.min_segments, denominator=RateDenominator(args.rate_denominator),
        translator=args.translator, batch_size=args.batch_size, timeout=args.timeout,
        cache=not args.no_cache, keep_duplicates=args.keep_duplicates, modes=modes,
        out_prefix=args.out_prefix, report=args.report, intermediate_dir=args.keep_intermediate,
    )
    report = run_pipeline(cfg)
    for mode, rep in report["modes"].items():
        print(f"{mode}\t{rep['total']} pairs\t{rep['pseudo_pairs_emitted']} pseudo"
              f"\t{rep['duplicates_dropped']} dropped\t{rep['failures']} failed")
    return 0


def cmd_train_align(args) -> int:
    cfg = PipelineConfig(**_common(args), modes=[])
    corpus = _load(cfg)
    heuristic = aligner.Heuristic.parse(args.heuristic)
    with stage("align"):
        result = aligner.train_and_align(corpus, args.iters, heuristic, cfg.workers)
    with stage("write"):
        aligner.save_table(result.forward, args.out)
        if args.reverse_out:
            aligner.save_table(result.reverse, args.reverse_out)
        if args.align_out:
            aligner.write_pharaoh(result.alignments, args.align_out)
    print(f"forward loglik {result.forward.loglik_history[-1]:.4f}"
          f"\treverse loglik {result.reverse.loglik_history[-1]:.4f}")
    return 0


def cmd_extract_partials(args) -> int:
    cfg = PipelineConfig(**_common(args), modes=[])
    corpus = _load(cfg)
    acfg = AugmentConfig(theta=args.theta, min_segments=args.min_segments,
                         denominator=RateDenominator(args.rate_denominator), delims=cfg.delims,
                         iters=args.iters, heuristic=aligner.Heuristic.parse(args.heuristic),
                         workers=cfg.workers)
    with stage("align"):
        alignments = aligner.read_pharaoh(args.align, corpus) if args.align else None
        aug = Augmenter(corpus, acfg, alignments)
        aug.align()
    with stage("segment"):
        records = aug.extract()
    src_out, tgt_out = args.out
    with stage("write"):
        write_partials(records, src_out, tgt_out, args.sidecar or f"{src_out}.tsv",
                       cfg.source_joiner, cfg.target_joiner)
    print(f"{sum(len(r.partials) for r in records)} partial pairs from "
          f"{sum(1 for r in records if r.partials)} sentence pairs")
    return 0


def cmd_stats(args) -> int:
    cfg = PipelineConfig(**_common(args), modes=[])
    corpus = _load(cfg)
    report = corpus_stats(corpus, args.min_segments).to_dict()
    for key in ("attempts", "pseudo_pairs_emitted", "duplicates_dropped", "failures", "per_pair",
                "partial_pairs_extracted", "pairs_backtranslated", "partials_backtranslated"):
        report.pop(key)
    print(json.dumps(report, indent=2, ensure_ascii=False))
    return 0


COMMANDS = {
    "augment": cmd_augment,
    "train-align": cmd_train_align,
    "extract-partials": cmd_extract_partials,
    "stats": cmd_stats,
}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        defaults = _config_defaults(argv)
        if defaults:
            for action in parser._subparsers._group_actions:
                for sp in action.choices.values():
                    sp.set_defaults(**defaults)
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[args.command](args)
    except SegaugError as exc:
        print(f"segaug: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # noqa: BLE001 - last-resort exit code
        print(f"segaug: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
