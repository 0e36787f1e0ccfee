"""Compare the compiled and numpy E-step kernels on a synthetic corpus.

    python3 benchmarks/bench_kernels.py --pairs 20000 --repeat 5

Also times a full ``train_model1`` run per backend, including the
threaded E-step when ``--workers`` > 1.
"""

import argparse
import statistics
import time
from unittest import mock

import numpy as np

from segaug import aligner, kernels, _pykernels
from segaug.corpus import Corpus, ParallelPair, Sentence
from segaug.toy import make_toy_corpus


def _time(fn, repeat):
    runs = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        runs.append(time.perf_counter() - start)
    return statistics.median(runs)


def _corpus(n_pairs, vocab):
    toy = make_toy_corpus(n_pairs, seed=1, vocab_size=vocab)
    pairs = tuple(ParallelPair(i, Sentence.from_texts(s, "src"), Sentence.from_texts(t, "tgt"))
                  for i, (s, t) in enumerate(zip(toy.source, toy.target)))
    return Corpus(pairs, "src", "tgt")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pairs", type=int, default=20000)
    ap.add_argument("--vocab", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--iters", type=int, default=5)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args(argv)

    corpus = _corpus(args.pairs, args.vocab)
    enc = aligner._encode(corpus, aligner.Direction.TGT_GIVEN_SRC)
    n_rows = len(enc.row_off) - 1
    params = np.full(len(enc.param_keys), 0.01)
    print(f"pairs={args.pairs} rows={n_rows} cells={len(enc.cell_param)} params={len(params)}")

    backends = {"python": _pykernels}
    try:
        from segaug import _emkernel
        backends["cython"] = _emkernel
    except ImportError:
        print("compiled kernel not built; timing the numpy fallback only")

    e_step, train = {}, {}
    for name, mod in backends.items():
        def one_step(mod=mod):
            counts = np.zeros_like(params)
            mod.em_accumulate(enc.cell_param, enc.row_off, params, counts, 0, n_rows)
        e_step[name] = _time(one_step, args.repeat)
        with mock.patch.object(kernels, "em_accumulate", mod.em_accumulate), \
                mock.patch.object(kernels, "loglikelihood", mod.loglikelihood):
            train[name] = _time(lambda: aligner.train_model1(corpus, iters=args.iters,
                                                             workers=args.workers), 1)
        print(f"{name:>7}: e-step {e_step[name] * 1e3:9.2f} ms   "
              f"train_model1({args.iters} iters, {args.workers} workers) {train[name]:7.2f} s")
    if len(backends) == 2:
        print(f"speedup: e-step x{e_step['python'] / e_step['cython']:.1f}, "
              f"training x{train['python'] / train['cython']:.1f}")


if __name__ == "__main__":
    main()
